use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dist2;
use super::linalg::{for_each_combination, solve};
use crate::error::{Error, Result};

/// Half-space `normal · x ≤ offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Halfspace { normal, offset }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - self.offset
    }
}

/// Bounded, full-dimensional intersection of half-spaces.
///
/// Vertices and the bounding box are computed once at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Halfspace>", into = "Vec<Halfspace>")]
pub struct Polytope {
    halfspaces: Vec<Halfspace>,
    vertices: Vec<Vec<f64>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    volume: VolumeEstimate,
}

/// A volume, exact (`standard_error == 0`) or Monte-Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub standard_error: f64,
}

const PROBE: f64 = 1e6;
const POLY_MC_SAMPLES: usize = 1_000_000;

impl TryFrom<Vec<Halfspace>> for Polytope {
    type Error = Error;
    fn try_from(h: Vec<Halfspace>) -> Result<Self> {
        Polytope::new(h)
    }
}

impl From<Polytope> for Vec<Halfspace> {
    fn from(p: Polytope) -> Self {
        p.halfspaces
    }
}

impl Polytope {
    pub fn new(halfspaces: Vec<Halfspace>) -> Result<Self> {
        let dim = halfspaces
            .first()
            .map(|h| h.normal.len())
            .ok_or_else(|| Error::Domain("polytope needs at least one half-space".into()))?;
        if dim == 0 || halfspaces.iter().any(|h| h.normal.len() != dim) {
            return Err(Error::Domain("half-space normals must share a positive dimension".into()));
        }
        if halfspaces
            .iter()
            .any(|h| !h.offset.is_finite() || h.normal.iter().any(|v| !v.is_finite()) || h.normal.iter().all(|v| *v == 0.0))
        {
            return Err(Error::Domain("half-space with zero or non-finite normal".into()));
        }
        // Bounding-box probe: enumerate vertices of P ∩ [-PROBE, PROBE]^d; a vertex on the
        // probe box means P is unbounded.
        let mut all = halfspaces.clone();
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            all.push(Halfspace::new(e.clone(), PROBE));
            e[i] = -1.0;
            all.push(Halfspace::new(e, PROBE));
        }
        let vertices = enumerate_vertices(&all, dim);
        if vertices.is_empty() {
            return Err(Error::Domain("polytope is empty".into()));
        }
        if vertices.iter().any(|v| v.iter().any(|c| c.abs() >= PROBE * (1.0 - 1e-9))) {
            return Err(Error::Domain("polytope is unbounded".into()));
        }
        let mut lower = vec![f64::INFINITY; dim];
        let mut upper = vec![f64::NEG_INFINITY; dim];
        for v in &vertices {
            for i in 0..dim {
                lower[i] = lower[i].min(v[i]);
                upper[i] = upper[i].max(v[i]);
            }
        }
        if lower.iter().zip(&upper).any(|(l, u)| u - l <= 1e-12) {
            return Err(Error::Domain("polytope is not full-dimensional".into()));
        }
        let mut p = Polytope {
            halfspaces,
            vertices,
            lower,
            upper,
            volume: VolumeEstimate { value: 0.0, standard_error: 0.0 },
        };
        p.volume = p.compute_volume();
        if p.volume.value <= 0.0 {
            return Err(Error::Domain("polytope has zero volume".into()));
        }
        Ok(p)
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.halfspaces.iter().all(|h| h.eval(x) <= 0.0)
    }

    fn tol(&self) -> f64 {
        let ext = self.lower.iter().zip(&self.upper).fold(0.0_f64, |m, (l, u)| m.max(u - l).max(l.abs()).max(u.abs()));
        1e-9 * ext.max(1.0)
    }

    fn centroid(&self) -> Vec<f64> {
        let d = self.dim();
        let mut c = vec![0.0; d];
        for v in &self.vertices {
            for i in 0..d {
                c[i] += v[i];
            }
        }
        c.iter_mut().for_each(|x| *x /= self.vertices.len() as f64);
        c
    }

    fn compute_volume(&self) -> VolumeEstimate {
        match self.dim() {
            1 => VolumeEstimate { value: self.upper[0] - self.lower[0], standard_error: 0.0 },
            2 => {
                let c = self.centroid();
                let mut vs = self.vertices.clone();
                vs.sort_by(|a, b| (a[1] - c[1]).atan2(a[0] - c[0]).total_cmp(&(b[1] - c[1]).atan2(b[0] - c[0])));
                let n = vs.len();
                let area = (0..n)
                    .map(|i| {
                        let (p, q) = (&vs[i], &vs[(i + 1) % n]);
                        p[0] * q[1] - q[0] * p[1]
                    })
                    .sum::<f64>()
                    / 2.0;
                VolumeEstimate { value: area.abs(), standard_error: 0.0 }
            }
            3 => VolumeEstimate { value: self.volume_3d(), standard_error: 0.0 },
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0F_B0DE);
                let box_vol: f64 = self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).product();
                let mut x = vec![0.0; self.dim()];
                let mut hits = 0usize;
                for _ in 0..POLY_MC_SAMPLES {
                    for i in 0..x.len() {
                        x[i] = rng.random_range(self.lower[i]..self.upper[i]);
                    }
                    if self.contains(&x) {
                        hits += 1;
                    }
                }
                let p = hits as f64 / POLY_MC_SAMPLES as f64;
                VolumeEstimate {
                    value: box_vol * p,
                    standard_error: box_vol * (p * (1.0 - p) / POLY_MC_SAMPLES as f64).sqrt(),
                }
            }
        }
    }

    /// Cone decomposition from an interior point: each facet polygon is fanned into
    /// triangles and contributes `area · height / 3`.
    fn volume_3d(&self) -> f64 {
        let c = self.centroid();
        let tol = self.tol();
        let mut vol = 0.0;
        for h in &self.halfspaces {
            let norm = h.normal.iter().map(|v| v * v).sum::<f64>().sqrt();
            let face: Vec<&Vec<f64>> = self.vertices.iter().filter(|v| h.eval(v).abs() <= tol * norm).collect();
            if face.len() < 3 {
                continue;
            }
            let n: Vec<f64> = h.normal.iter().map(|v| v / norm).collect();
            let mut fc = [0.0; 3];
            for v in &face {
                for i in 0..3 {
                    fc[i] += v[i] / face.len() as f64;
                }
            }
            // in-plane basis
            let a = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
            let u = normalize(cross(&a, &n));
            let w = cross(&n, &u);
            let mut pts: Vec<(f64, f64)> = face
                .iter()
                .map(|v| {
                    let r = [v[0] - fc[0], v[1] - fc[1], v[2] - fc[2]];
                    (dot3(&r, &u), dot3(&r, &w))
                })
                .collect();
            pts.sort_by(|p, q| p.1.atan2(p.0).total_cmp(&q.1.atan2(q.0)));
            let m = pts.len();
            let area = (0..m)
                .map(|i| {
                    let (p, q) = (pts[i], pts[(i + 1) % m]);
                    p.0 * q.1 - q.0 * p.1
                })
                .sum::<f64>()
                .abs()
                / 2.0;
            let height = (h.offset - h.normal.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>()) / norm;
            vol += area * height / 3.0;
        }
        vol
    }

    /// Exact Euclidean distance from `x` to the polytope (0 inside).
    ///
    /// The nearest point lies in the relative interior of some face, so it is the
    /// projection of `x` onto the affine hull of an active set of constraints that
    /// happens to be feasible. All active sets of size ≤ d are tried.
    fn distance(&self, x: &[f64]) -> f64 {
        if self.contains(x) {
            return 0.0;
        }
        let d = self.dim();
        let tol = self.tol();
        let mut best = self.vertices.iter().map(|v| dist2(v, x)).fold(f64::INFINITY, f64::min);
        let m = self.halfspaces.len();
        for s in 1..d.min(m) + 1 {
            for_each_combination(m, s, |set| {
                // y = x - Nᵀ λ with (N Nᵀ) λ = N x - b
                let mut g = vec![0.0; s * s];
                let mut rhs = vec![0.0; s];
                for (r, &i) in set.iter().enumerate() {
                    let hi = &self.halfspaces[i];
                    for (c, &j) in set.iter().enumerate() {
                        g[r * s + c] = hi.normal.iter().zip(&self.halfspaces[j].normal).map(|(a, b)| a * b).sum();
                    }
                    rhs[r] = hi.eval(x);
                }
                if let Some(lambda) = solve(g, rhs, s) {
                    let mut y = x.to_vec();
                    for (r, &i) in set.iter().enumerate() {
                        for k in 0..d {
                            y[k] -= lambda[r] * self.halfspaces[i].normal[k];
                        }
                    }
                    if self.halfspaces.iter().all(|h| h.eval(&y) <= tol) {
                        best = best.min(dist2(&y, x));
                    }
                }
            });
        }
        best.sqrt()
    }
}

fn enumerate_vertices(hs: &[Halfspace], dim: usize) -> Vec<Vec<f64>> {
    let ext = hs.iter().fold(1.0_f64, |m, h| m.max(h.offset.abs()));
    let tol = 1e-9 * ext;
    let mut out: Vec<Vec<f64>> = Vec::new();
    for_each_combination(hs.len(), dim, |set| {
        let mut a = Vec::with_capacity(dim * dim);
        let mut b = Vec::with_capacity(dim);
        for &i in set {
            a.extend_from_slice(&hs[i].normal);
            b.push(hs[i].offset);
        }
        if let Some(v) = solve(a, b, dim) {
            if hs.iter().all(|h| h.eval(&v) <= tol) && !out.iter().any(|w| dist2(w, &v) <= tol * tol) {
                out.push(v);
            }
        }
    });
    out
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = dot3(&v, &v).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn dot3(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Geometric domain: observation window `Y`, target set `A`, or a distance target `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "spec", rename_all = "snake_case")]
pub enum Region {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    HalfspacePolytope(Polytope),
}

impl Region {
    pub fn new_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Region> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Domain("box corners must have equal positive dimension".into()));
        }
        if lower.iter().chain(&upper).any(|v| !v.is_finite()) {
            return Err(Error::Domain("box corners must be finite".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| l >= u) {
            return Err(Error::Domain("box needs lower[i] < upper[i]".into()));
        }
        Ok(Region::Box { lower, upper })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Region> {
        if center.is_empty() || center.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("ball centre must be a finite vector".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain("ball radius must be positive".into()));
        }
        Ok(Region::Ball { center, radius })
    }

    pub fn polytope(halfspaces: Vec<Halfspace>) -> Result<Region> {
        Ok(Region::HalfspacePolytope(Polytope::new(halfspaces)?))
    }

    /// `[-1/2, 1/2]^d`.
    pub fn centered_unit_cube(dim: usize) -> Region {
        Region::Box { lower: vec![-0.5; dim], upper: vec![0.5; dim] }
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Box { lower, .. } => lower.len(),
            Region::Ball { center, .. } => center.len(),
            Region::HalfspacePolytope(p) => p.dim(),
        }
    }

    /// Lebesgue measure; exact except for polytopes in more than three dimensions.
    pub fn volume(&self) -> f64 {
        self.volume_estimate().value
    }

    pub fn volume_estimate(&self) -> VolumeEstimate {
        let value = match self {
            Region::Box { lower, upper } => lower.iter().zip(upper).map(|(l, u)| u - l).product(),
            Region::Ball { center, radius } => unit_ball_volume(center.len()) * radius.powi(center.len() as i32),
            Region::HalfspacePolytope(p) => return p.volume,
        };
        VolumeEstimate { value, standard_error: 0.0 }
    }

    /// Closed containment.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Box { lower, upper } => x.iter().zip(lower.iter().zip(upper)).all(|(v, (l, u))| *l <= *v && *v <= *u),
            Region::Ball { center, radius } => dist2(x, center) <= radius * radius,
            Region::HalfspacePolytope(p) => p.contains(x),
        }
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Region::Box { lower, upper } => (lower.clone(), upper.clone()),
            Region::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Region::HalfspacePolytope(p) => (p.lower.clone(), p.upper.clone()),
        }
    }

    /// Dilation `factor · self` about the coordinate origin.
    pub fn scaled(&self, factor: f64) -> Region {
        assert!(factor > 0.0 && factor.is_finite(), "scale factor must be positive");
        match self {
            Region::Box { lower, upper } => Region::Box {
                lower: lower.iter().map(|v| v * factor).collect(),
                upper: upper.iter().map(|v| v * factor).collect(),
            },
            Region::Ball { center, radius } => Region::Ball {
                center: center.iter().map(|v| v * factor).collect(),
                radius: radius * factor,
            },
            Region::HalfspacePolytope(p) => Region::HalfspacePolytope(
                Polytope::new(p.halfspaces.iter().map(|h| Halfspace::new(h.normal.clone(), h.offset * factor)).collect())
                    .expect("dilation preserves a valid polytope"),
            ),
        }
    }

    pub fn translated(&self, shift: &[f64]) -> Region {
        match self {
            Region::Box { lower, upper } => Region::Box {
                lower: lower.iter().zip(shift).map(|(v, s)| v + s).collect(),
                upper: upper.iter().zip(shift).map(|(v, s)| v + s).collect(),
            },
            Region::Ball { center, radius } => Region::Ball {
                center: center.iter().zip(shift).map(|(v, s)| v + s).collect(),
                radius: *radius,
            },
            Region::HalfspacePolytope(p) => Region::HalfspacePolytope(
                Polytope::new(
                    p.halfspaces
                        .iter()
                        .map(|h| {
                            let off = h.offset + h.normal.iter().zip(shift).map(|(a, b)| a * b).sum::<f64>();
                            Halfspace::new(h.normal.clone(), off)
                        })
                        .collect(),
                )
                .expect("translation preserves a valid polytope"),
            ),
        }
    }

    /// Centre of the box or ball, vertex mean of a polytope.
    pub fn centroid(&self) -> Vec<f64> {
        match self {
            Region::Box { lower, upper } => lower.iter().zip(upper).map(|(l, u)| 0.5 * (l + u)).collect(),
            Region::Ball { center, .. } => center.clone(),
            Region::HalfspacePolytope(p) => p.centroid(),
        }
    }

    /// Shift that moves the region's centroid to the origin, or `None` when the
    /// region already contains the origin (dilations are taken about the origin).
    pub fn origin_anchor(&self) -> Option<Vec<f64>> {
        let zero = vec![0.0; self.dim()];
        if self.contains(&zero) {
            None
        } else {
            Some(self.centroid().iter().map(|c| -c).collect())
        }
    }

    /// Whether `other ⊆ self` (up to a relative tolerance of 1e-12).
    pub fn contains_region(&self, other: &Region) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let (olo, ohi) = other.bounding_box();
        let scale = olo.iter().chain(&ohi).fold(1.0_f64, |m, v| m.max(v.abs()));
        let eps = 1e-12 * scale;
        match (self, other) {
            (Region::Box { lower, upper }, _) => {
                lower.iter().zip(&olo).all(|(l, o)| *l <= o + eps) && upper.iter().zip(&ohi).all(|(u, o)| *u >= o - eps)
            }
            (Region::Ball { center, radius }, Region::Ball { center: c2, radius: r2 }) => {
                dist2(center, c2).sqrt() + r2 <= radius + eps
            }
            (Region::HalfspacePolytope(p), Region::Ball { center, radius }) => p.halfspaces.iter().all(|h| {
                let norm = h.normal.iter().map(|v| v * v).sum::<f64>().sqrt();
                h.eval(center) + radius * norm <= eps * norm
            }),
            // remaining targets are convex hulls of finitely many points
            (_, _) => other.extreme_points().iter().all(|v| match self {
                Region::Ball { center, radius } => dist2(v, center).sqrt() <= radius + eps,
                Region::HalfspacePolytope(p) => p.halfspaces.iter().all(|h| {
                    let norm = h.normal.iter().map(|v| v * v).sum::<f64>().sqrt();
                    h.eval(v) <= eps * norm
                }),
                Region::Box { .. } => unreachable!(),
            }),
        }
    }

    fn extreme_points(&self) -> Vec<Vec<f64>> {
        match self {
            Region::Box { lower, upper } => {
                let d = lower.len();
                (0..(1usize << d))
                    .map(|mask| (0..d).map(|i| if mask >> i & 1 == 1 { upper[i] } else { lower[i] }).collect())
                    .collect()
            }
            Region::HalfspacePolytope(p) => p.vertices.clone(),
            Region::Ball { .. } => unreachable!("balls are handled separately"),
        }
    }

    /// Euclidean distance from `x` to the region (0 for closed containment).
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            Region::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(v, (l, u))| {
                    let e = if v < l { l - v } else if v > u { v - u } else { 0.0 };
                    e * e
                })
                .sum::<f64>()
                .sqrt(),
            Region::Ball { center, radius } => (dist2(x, center).sqrt() - radius).max(0.0),
            Region::HalfspacePolytope(p) => p.distance(x),
        }
    }

    /// Longest distance between two points of the region's bounding box.
    pub fn diameter_bound(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        dist2(&lo, &hi).sqrt()
    }

    /// One uniform draw (rejection from the bounding box for balls and polytopes).
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self {
            Region::Box { lower, upper } => {
                for i in 0..out.len() {
                    out[i] = lower[i] + (upper[i] - lower[i]) * rng.random::<f64>();
                }
            }
            _ => {
                let (lo, hi) = self.bounding_box();
                loop {
                    for i in 0..out.len() {
                        out[i] = lo[i] + (hi[i] - lo[i]) * rng.random::<f64>();
                    }
                    if self.contains(out) {
                        return;
                    }
                }
            }
        }
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Config-file literal: `box(l1,l2; u1,u2)`, `ball(c1,c2; r)` or
/// `halfspaces(a1,a2: b; ...)`. Reals use the shortest round-trip form.
impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Region::Box { lower, upper } => write!(f, "box({}; {})", join(lower), join(upper)),
            Region::Ball { center, radius } => write!(f, "ball({}; {})", join(center), radius),
            Region::HalfspacePolytope(p) => {
                let parts: Vec<String> =
                    p.halfspaces.iter().map(|h| format!("{}: {}", join(&h.normal), h.offset)).collect();
                write!(f, "halfspaces({})", parts.join("; "))
            }
        }
    }
}

fn unit_ball_volume(d: usize) -> f64 {
    // V_d = π^{d/2} / Γ(d/2 + 1), via the two-step recursion V_d = 2π/d · V_{d-2}
    let mut v = if d % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if d % 2 == 0 { 2 } else { 3 };
    while k <= d {
        v *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    v
}

/// The set `K` in the decay condition: either a region itself or its boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "region", rename_all = "snake_case")]
pub enum DistanceTarget {
    WholeRegion(Region),
    Boundary(Region),
}

impl DistanceTarget {
    pub fn region(&self) -> &Region {
        match self {
            DistanceTarget::WholeRegion(r) | DistanceTarget::Boundary(r) => r,
        }
    }
}

/// `d(x, K) = inf_{y ∈ K} ‖x − y‖`.
pub fn distance_to_target(x: &[f64], target: &DistanceTarget) -> Result<f64> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Precondition("point must be finite".into()));
    }
    match target {
        DistanceTarget::WholeRegion(r) => Ok(r.distance(x)),
        DistanceTarget::Boundary(Region::Ball { center, radius }) => Ok((dist2(x, center).sqrt() - radius).abs()),
        DistanceTarget::Boundary(r @ Region::Box { lower, upper }) => {
            if r.contains(x) {
                Ok(x
                    .iter()
                    .zip(lower.iter().zip(upper))
                    .map(|(v, (l, u))| (v - l).min(u - v))
                    .fold(f64::INFINITY, f64::min))
            } else {
                Ok(r.distance(x))
            }
        }
        DistanceTarget::Boundary(Region::HalfspacePolytope(_)) => {
            Err(Error::Unsupported("distance to a polytope boundary".into()))
        }
    }
}
