//! Convex polygon helpers: half-plane clipping, shoelace area and exact
//! polygon–disk intersection area.

pub type Point2 = [f64; 2];

const DEDUP_TOL: f64 = 1e-12;

#[inline]
fn cross(a: Point2, b: Point2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn area(poly: &[Point2]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        s += cross(poly[i], poly[(i + 1) % n]);
    }
    0.5 * s
}

/// Clips `poly` to `{v : f(v) ≤ 0}` where `f` is affine. Returns `None` when every
/// vertex already satisfies the constraint, so callers can keep the input untouched.
pub fn clip_halfplane(poly: &[Point2], f: impl Fn(Point2) -> f64) -> Option<Vec<Point2>> {
    let vals: Vec<f64> = poly.iter().map(|&v| f(v)).collect();
    if vals.iter().all(|&v| v <= 0.0) {
        return None;
    }
    let n = poly.len();
    let mut out: Vec<Point2> = Vec::with_capacity(n + 1);
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let (fp, fq) = (vals[i], vals[(i + 1) % n]);
        if fp <= 0.0 {
            out.push(p);
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            let t = fp / (fp - fq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    dedup(&mut out);
    Some(out)
}

fn dedup(poly: &mut Vec<Point2>) {
    let close = |a: Point2, b: Point2| (a[0] - b[0]).abs() <= DEDUP_TOL && (a[1] - b[1]).abs() <= DEDUP_TOL;
    poly.dedup_by(|b, a| close(*a, *b));
    while poly.len() > 1 && close(poly[0], poly[poly.len() - 1]) {
        poly.pop();
    }
}

/// `{v : normal · v ≤ offset}`.
pub fn clip_linear(poly: &[Point2], normal: Point2, offset: f64) -> Vec<Point2> {
    clip_halfplane(poly, |v| normal[0] * v[0] + normal[1] * v[1] - offset).unwrap_or_else(|| poly.to_vec())
}

pub fn clip_box(poly: &[Point2], lower: Point2, upper: Point2) -> Vec<Point2> {
    let mut p = poly.to_vec();
    for (normal, offset) in [
        ([1.0, 0.0], upper[0]),
        ([-1.0, 0.0], -lower[0]),
        ([0.0, 1.0], upper[1]),
        ([0.0, -1.0], -lower[1]),
    ] {
        if p.is_empty() {
            break;
        }
        p = clip_linear(&p, normal, offset);
    }
    p
}

/// Signed area of the triangle `(0, a, b)` intersected with the disk of radius `r`
/// centred at the origin.
fn triangle_disk_area(a: Point2, b: Point2, r: f64) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let aa = d[0] * d[0] + d[1] * d[1];
    if aa == 0.0 {
        return 0.0;
    }
    // |a + t d|² = r²
    let bb = a[0] * d[0] + a[1] * d[1];
    let cc = a[0] * a[0] + a[1] * a[1] - r * r;
    let disc = bb * bb - aa * cc;
    let mut cuts = vec![0.0];
    if disc > 0.0 {
        let s = disc.sqrt();
        for t in [(-bb - s) / aa, (-bb + s) / aa] {
            if t > 0.0 && t < 1.0 {
                cuts.push(t);
            }
        }
    }
    cuts.push(1.0);
    let at = |t: f64| [a[0] + t * d[0], a[1] + t * d[1]];
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (p, q) = (at(w[0]), at(w[1]));
        let m = at(0.5 * (w[0] + w[1]));
        if m[0] * m[0] + m[1] * m[1] <= r * r {
            total += 0.5 * cross(p, q);
        } else {
            let ang = cross(p, q).atan2(p[0] * q[0] + p[1] * q[1]);
            total += 0.5 * r * r * ang;
        }
    }
    total
}

/// Squared distance from the origin to a counter-clockwise convex polygon (0 inside).
fn dist2_to_convex(poly: &[Point2]) -> f64 {
    let n = poly.len();
    if (0..n).all(|i| cross(poly[i], poly[(i + 1) % n]) >= 0.0) {
        return 0.0;
    }
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            let e = [b[0] - a[0], b[1] - a[1]];
            let len2 = e[0] * e[0] + e[1] * e[1];
            let t = if len2 > 0.0 { (-(a[0] * e[0] + a[1] * e[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
            let q = [a[0] + t * e[0], a[1] + t * e[1]];
            q[0] * q[0] + q[1] * q[1]
        })
        .fold(f64::INFINITY, f64::min)
}

/// Area of `poly ∩ B(center, r)` for a counter-clockwise convex polygon.
pub fn disk_intersection_area(poly: &[Point2], center: Point2, r: f64) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let rel: Vec<Point2> = poly.iter().map(|v| [v[0] - center[0], v[1] - center[1]]).collect();
    // exact answers in the two non-crossing cases, so that a cell away from the circle
    // scores exactly 0 instead of round-off
    if rel.iter().all(|v| v[0] * v[0] + v[1] * v[1] <= r * r) {
        return area(poly);
    }
    if dist2_to_convex(&rel) >= r * r {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        s += triangle_disk_area(rel[i], rel[(i + 1) % n], r);
    }
    s.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn square(h: f64) -> Vec<Point2> {
        vec![[-h, -h], [h, -h], [h, h], [-h, h]]
    }

    #[test]
    fn shoelace() {
        assert_abs_diff_eq!(area(&square(0.5)), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn clipping() {
        let half = clip_linear(&square(0.5), [1.0, 0.0], 0.0);
        assert_abs_diff_eq!(area(&half), 0.5, epsilon = 1e-15);
        assert!(clip_halfplane(&square(0.5), |v| v[0] - 1.0).is_none());
        assert!(clip_linear(&square(0.5), [1.0, 0.0], -1.0).is_empty());
        let b = clip_box(&square(1.0), [0.0, 0.0], [2.0, 2.0]);
        assert_abs_diff_eq!(area(&b), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn disk_area() {
        // disk inside the polygon
        assert_abs_diff_eq!(disk_intersection_area(&square(1.0), [0.0, 0.0], 0.5), PI * 0.25, epsilon = 1e-14);
        // polygon inside the disk
        assert_abs_diff_eq!(disk_intersection_area(&square(0.5), [0.0, 0.0], 2.0), 1.0, epsilon = 1e-14);
        // quarter disk
        let q = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert_abs_diff_eq!(disk_intersection_area(&q, [0.0, 0.0], 0.5), PI * 0.25 / 4.0, epsilon = 1e-14);
        // half-plane cut of a disk at distance h: segment area r² acos(h/r) − h √(r² − h²)
        let (r, h) = (1.0_f64, 0.3_f64);
        let strip = vec![[h, -5.0], [5.0, -5.0], [5.0, 5.0], [h, 5.0]];
        let seg = r * r * (h / r).acos() - h * (r * r - h * h).sqrt();
        assert_abs_diff_eq!(disk_intersection_area(&strip, [0.0, 0.0], r), seg, epsilon = 1e-13);
        // disjoint, including a near miss where the triangle decomposition leaves round-off
        assert_eq!(disk_intersection_area(&square(0.5), [3.0, 0.0], 1.0), 0.0);
        let cell = vec![[0.2927, -0.0213], [0.3161, -0.0087], [0.3102, 0.0244], [0.2881, 0.0179]];
        assert_eq!(disk_intersection_area(&cell, [0.0, 0.0], 0.25), 0.0);
        assert_eq!(disk_intersection_area(&square(0.1), [0.0, 0.0], 1.0), area(&square(0.1)));
    }
}
