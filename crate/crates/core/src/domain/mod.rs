//! Regions, point configurations, Poisson sampling and the coupled scaling
//! `η_n ∩ Y = n^{-1/d} (η ∩ n^{1/d} Y)`.

mod configuration;
mod linalg;
mod region;
mod sampling;

pub(crate) use configuration::lex_cmp;
pub use configuration::PointConfiguration;
pub use region::{distance_to_target, DistanceTarget, Halfspace, Polytope, Region, VolumeEstimate};
pub use sampling::{restrict_scaled, sample_master, sample_poisson, sample_scaled, sample_uniform};

/// `n^{-1/d}`, computed the same way everywhere so that scaled coordinates agree bit-for-bit.
pub fn scale_factor(n: u64, dim: usize) -> f64 {
    let n = n as f64;
    match dim {
        1 => 1.0 / n,
        2 => 1.0 / n.sqrt(),
        3 => 1.0 / n.cbrt(),
        d => n.powf(-1.0 / d as f64),
    }
}

/// `n^{1/d}`.
pub fn dilation_factor(n: u64, dim: usize) -> f64 {
    let n = n as f64;
    match dim {
        1 => n,
        2 => n.sqrt(),
        3 => n.cbrt(),
        d => n.powf(1.0 / d as f64),
    }
}

#[inline]
pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
