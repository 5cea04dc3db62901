//! Score functions `ξ_n` and totals `H_n = Σ ξ_n(x, η_n ∩ Y)` for the four models.

mod clique;
mod knn;
mod voronoi;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use clique::{clique_count, clique_score, clique_scores};
pub use knn::{knn_score, knn_scores};
pub use voronoi::{voronoi_score, voronoi_scores, VoronoiMeasure};

use crate::domain::{scale_factor, DistanceTarget, PointConfiguration, Region};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    Exact2D,
    MonteCarlo { quadrature_count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Count,
    KnnEdgeLength { k: usize, m: f64 },
    CliqueCount { k: usize, r: f64 },
    VoronoiVolume { a: Region, method: VolumeMethod },
}

/// A functional `H_n` on `η_n ∩ Y` together with its variance exponent `τ` and the
/// set `K` its scores concentrate on.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreModel {
    kind: ModelKind,
    y: Region,
    tau: f64,
    target: DistanceTarget,
}

/// `raw` is `N`, `L^{(m)}`, `C_k` or `ℓ(A_n)`; `standardized` carries the model's prefactor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalValue {
    pub raw: f64,
    pub standardized: f64,
}

impl ScoreModel {
    pub fn count(y: Region) -> Self {
        let target = DistanceTarget::WholeRegion(y.clone());
        ScoreModel { kind: ModelKind::Count, y, tau: 1.0, target }
    }

    pub fn knn(y: Region, k: usize, m: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("kNN model needs k ≥ 1".into()));
        }
        if !(m >= 0.0 && m.is_finite()) {
            return Err(Error::Domain("kNN edge power m must be finite and non-negative".into()));
        }
        let target = DistanceTarget::WholeRegion(y.clone());
        Ok(ScoreModel { kind: ModelKind::KnnEdgeLength { k, m }, y, tau: 1.0, target })
    }

    pub fn clique(y: Region, k: usize, r: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("clique model needs k ≥ 1".into()));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain("clique radius must be positive".into()));
        }
        let target = DistanceTarget::WholeRegion(y.clone());
        Ok(ScoreModel { kind: ModelKind::CliqueCount { k, r }, y, tau: 1.0, target })
    }

    /// Voronoi approximation of `A` on `Y = [-1/2, 1/2]^d`, `d ≥ 2`.
    pub fn voronoi(y: Region, a: Region, method: VolumeMethod) -> Result<Self> {
        let d = y.dim();
        if d < 2 {
            return Err(Error::Domain("Voronoi model needs d ≥ 2".into()));
        }
        if y != Region::centered_unit_cube(d) {
            return Err(Error::Domain("Voronoi model needs Y = [-1/2, 1/2]^d".into()));
        }
        if a.dim() != d {
            return Err(Error::Domain("A and Y have different dimensions".into()));
        }
        let (lo, hi) = a.bounding_box();
        if lo.iter().chain(&hi).any(|v| v.abs() >= 0.5) {
            return Err(Error::Domain("A must lie strictly inside (-1/2, 1/2)^d".into()));
        }
        match method {
            VolumeMethod::Exact2D if d != 2 => {
                return Err(Error::Method("exact Voronoi volumes are only available in two dimensions".into()))
            }
            VolumeMethod::MonteCarlo { quadrature_count: 0 } => {
                return Err(Error::Method("quadrature count must be positive".into()))
            }
            _ => {}
        }
        let target = DistanceTarget::Boundary(a.clone());
        let tau = 1.0 - 1.0 / d as f64;
        Ok(ScoreModel { kind: ModelKind::VoronoiVolume { a, method }, y, tau, target })
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn y(&self) -> &Region {
        &self.y
    }

    pub fn dim(&self) -> usize {
        self.y.dim()
    }

    /// Theoretical variance exponent: 1 for volume order, `1 − 1/d` for the Voronoi model.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn target(&self) -> &DistanceTarget {
        &self.target
    }

    /// Whether `H` is linear in the points, so that `D² ≡ 0`.
    pub fn is_linear(&self) -> bool {
        matches!(self.kind, ModelKind::Count)
    }

    /// Distance beyond which `D²_{x1,x2} H_n` vanishes identically, when one is known.
    pub fn second_order_range(&self, n: u64) -> Option<f64> {
        match self.kind {
            ModelKind::Count => Some(0.0),
            ModelKind::CliqueCount { r, .. } => Some(r * scale_factor(n, self.dim())),
            _ => None,
        }
    }

    /// Prefactor turning `Σ ξ` into `H_n`.
    fn prefactor(&self, n: u64) -> f64 {
        match self.kind {
            ModelKind::KnnEdgeLength { m, .. } => (n as f64).powf(m / self.dim() as f64),
            ModelKind::VoronoiVolume { .. } => n as f64,
            _ => 1.0,
        }
    }

    fn scale_of(&self, config: &PointConfiguration) -> Result<u64> {
        if config.dim() != self.dim() {
            return Err(Error::Precondition("configuration and model have different dimensions".into()));
        }
        config
            .scale_index()
            .ok_or_else(|| Error::Precondition("configuration has no scale index".into()))
    }

    /// `ξ_n(p_i, config)`.
    pub fn score(&self, config: &PointConfiguration, i: usize) -> Result<f64> {
        let n = self.scale_of(config)?;
        if i >= config.len() {
            return Err(Error::Precondition(format!("point index {i} out of range")));
        }
        match &self.kind {
            ModelKind::Count => Ok(1.0),
            ModelKind::KnnEdgeLength { k, m } => knn_score(config, i, *k, *m),
            ModelKind::CliqueCount { k, r } => Ok(clique_score(config, i, *k, r * scale_factor(n, self.dim()))),
            ModelKind::VoronoiVolume { a, method } => voronoi_score(config, i, a, *method),
        }
    }

    /// All scores, in point order.
    pub fn scores(&self, config: &PointConfiguration) -> Result<Vec<f64>> {
        let n = self.scale_of(config)?;
        match &self.kind {
            ModelKind::Count => Ok(vec![1.0; config.len()]),
            ModelKind::KnnEdgeLength { k, m } => knn_scores(config, *k, *m),
            ModelKind::CliqueCount { k, r } => Ok(clique_scores(config, *k, r * scale_factor(n, self.dim()))),
            ModelKind::VoronoiVolume { a, method } => voronoi_scores(config, a, *method),
        }
    }

    /// `H_n` as the prefactor times the ordered sum of scores. This is an independent
    /// code path from [`evaluate`](Self::evaluate) for clique and Voronoi models.
    pub fn total_from_scores(&self, config: &PointConfiguration) -> Result<f64> {
        let n = self.scale_of(config)?;
        if matches!(self.kind, ModelKind::KnnEdgeLength { .. }) && config.len() < 2 {
            return Ok(0.0);
        }
        let s: f64 = self.scores(config)?.iter().sum();
        Ok(self.prefactor(n) * s)
    }

    pub fn evaluate(&self, config: &PointConfiguration) -> Result<FunctionalValue> {
        let n = self.scale_of(config)?;
        let raw = match &self.kind {
            ModelKind::Count => config.len() as f64,
            ModelKind::KnnEdgeLength { k, m } => {
                if config.len() < 2 {
                    0.0
                } else {
                    knn_scores(config, *k, *m)?.iter().sum::<f64>()
                }
            }
            ModelKind::CliqueCount { k, r } => clique_count(config, *k, r * scale_factor(n, self.dim())) as f64,
            ModelKind::VoronoiVolume { a, method } => {
                let m = VoronoiMeasure::compute(config, a, *method)?;
                return Ok(FunctionalValue { raw: m.approx_volume, standardized: n as f64 * (m.approx_volume - m.target_volume) });
            }
        };
        Ok(FunctionalValue { raw, standardized: self.prefactor(n) * raw })
    }
}

/// `H_n` for `model` on `config`; see [`ScoreModel::evaluate`].
pub fn evaluate_total(model: &ScoreModel, config: &PointConfiguration) -> Result<FunctionalValue> {
    model.evaluate(config)
}

impl fmt::Display for VolumeMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VolumeMethod::Exact2D => write!(f, "exact2d"),
            VolumeMethod::MonteCarlo { quadrature_count } => write!(f, "mc({quadrature_count})"),
        }
    }
}

/// Config-file literal of the model kind, e.g. `knn(k=1, m=1)`.
impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Count => write!(f, "count"),
            ModelKind::KnnEdgeLength { k, m } => write!(f, "knn(k={k}, m={m})"),
            ModelKind::CliqueCount { k, r } => write!(f, "clique(k={k}, r={r})"),
            ModelKind::VoronoiVolume { a, method } => write!(f, "voronoi(A={a}, method={method})"),
        }
    }
}

/// Identifier used in calibration tables and output headers: `<kind> on <Y>`.
impl fmt::Display for ScoreModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self.kind, self.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y2() -> Region {
        Region::centered_unit_cube(2)
    }

    #[test]
    fn count_total_is_point_number() {
        let m = ScoreModel::count(y2());
        let c = PointConfiguration::new(vec![vec![0.1, 0.1], vec![-0.2, 0.3]], y2(), Some(7), 0).unwrap();
        assert_eq!(m.evaluate(&c).unwrap(), FunctionalValue { raw: 2.0, standardized: 2.0 });
    }

    #[test]
    fn knn_line_total() {
        let y = Region::new_box(vec![-1.0], vec![4.0]).unwrap();
        let c = PointConfiguration::new(vec![vec![0.0], vec![1.0], vec![3.0]], y.clone(), Some(1), 0).unwrap();
        let m = ScoreModel::knn(y, 1, 1.0).unwrap();
        assert_eq!(m.evaluate(&c).unwrap().raw, 3.0);
        assert_eq!(m.evaluate(&c).unwrap().standardized, 3.0);
    }

    #[test]
    fn voronoi_single_point() {
        let a = Region::ball(vec![0.0, 0.0], 0.25).unwrap();
        let m = ScoreModel::voronoi(y2(), a.clone(), VolumeMethod::Exact2D).unwrap();
        let n = 10;
        let inside = PointConfiguration::new(vec![vec![0.1, 0.0]], y2(), Some(n), 0).unwrap();
        let v = m.evaluate(&inside).unwrap();
        assert_eq!(v.raw, 1.0);
        assert!((v.standardized - n as f64 * (1.0 - a.volume())).abs() < 1e-12);
        let outside = PointConfiguration::new(vec![vec![0.4, 0.0]], y2(), Some(n), 0).unwrap();
        assert!((m.evaluate(&outside).unwrap().standardized + n as f64 * a.volume()).abs() < 1e-12);
        let empty = PointConfiguration::empty(y2(), Some(n), 0);
        assert_eq!(m.evaluate(&empty).unwrap().raw, 0.0);
    }

    #[test]
    fn model_invariants() {
        let a = Region::ball(vec![0.0, 0.0], 0.25).unwrap();
        assert!(ScoreModel::voronoi(Region::new_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(), a.clone(), VolumeMethod::Exact2D).is_err());
        assert!(ScoreModel::voronoi(y2(), Region::ball(vec![0.0, 0.0], 0.5).unwrap(), VolumeMethod::Exact2D).is_err());
        let y3 = Region::centered_unit_cube(3);
        let a3 = Region::ball(vec![0.0; 3], 0.25).unwrap();
        assert!(matches!(ScoreModel::voronoi(y3.clone(), a3.clone(), VolumeMethod::Exact2D), Err(Error::Method(_))));
        let m = ScoreModel::voronoi(y3, a3, VolumeMethod::MonteCarlo { quadrature_count: 1000 }).unwrap();
        assert!((m.tau() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(ScoreModel::clique(y2(), 2, 1.0).unwrap().tau(), 1.0);
        assert_eq!(
            ScoreModel::voronoi(y2(), a, VolumeMethod::Exact2D).unwrap().to_string(),
            "voronoi(A=ball(0,0; 0.25), method=exact2d) on box(-0.5,-0.5; 0.5,0.5)"
        );
    }
}
