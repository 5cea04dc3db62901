use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::configuration::PointConfiguration;
use super::region::Region;
use super::{dilation_factor, scale_factor};
use crate::error::{Error, Result};
use crate::rng::{Purpose, RngStream};

fn draw_poisson_count<R: Rng>(mean: f64, rng: &mut R) -> Result<usize> {
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::Domain(format!("Poisson mean {mean} is not a finite non-negative number")));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(dist.sample(rng) as usize)
}

fn poisson_on(
    intensity: f64,
    region: &Region,
    stream: RngStream,
    scale_index: Option<u64>,
) -> Result<PointConfiguration> {
    if !(intensity >= 0.0 && intensity.is_finite()) {
        return Err(Error::Domain("intensity must be finite and non-negative".into()));
    }
    let mut rng = stream.rng();
    let count = draw_poisson_count(intensity * region.volume(), &mut rng)?;
    let dim = region.dim();
    let mut coords = vec![0.0; count * dim];
    for p in coords.chunks_exact_mut(dim) {
        region.sample_point(&mut rng, p);
    }
    PointConfiguration::from_flat(coords, region.clone(), scale_index, stream.master_seed)
}

/// Homogeneous Poisson process with the given intensity on `region`.
pub fn sample_poisson(intensity: f64, region: &Region, stream: RngStream) -> Result<PointConfiguration> {
    poisson_on(intensity, region, stream, None)
}

/// `count` i.i.d. uniform points on `region`.
pub fn sample_uniform(region: &Region, count: usize, stream: RngStream) -> Vec<Vec<f64>> {
    let mut rng = stream.rng();
    (0..count)
        .map(|_| {
            let mut p = vec![0.0; region.dim()];
            region.sample_point(&mut rng, &mut p);
            p
        })
        .collect()
}

/// The unit-intensity master process on `n_max^{1/d} Y`, from which every
/// `η_n ∩ Y` with `n ≤ n_max` is obtained by [`restrict_scaled`].
pub fn sample_master(y: &Region, n_max: u64, master_seed: u64) -> Result<PointConfiguration> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be positive".into()));
    }
    let window = y.scaled(dilation_factor(n_max, y.dim()));
    poisson_on(1.0, &window, RngStream::tagged(master_seed, Purpose::Master, 0), None)
}

/// An independent draw of `η_n ∩ Y` (intensity `n` on `Y`), as used for replications
/// that need no coupling across `n`.
pub fn sample_scaled(y: &Region, n: u64, stream: RngStream) -> Result<PointConfiguration> {
    if n == 0 {
        return Err(Error::Domain("scale index must be positive".into()));
    }
    poisson_on(n as f64, y, stream, Some(n))
}

/// `η_n ∩ Y = {n^{-1/d} x : x ∈ master, n^{-1/d} x ∈ Y}`.
pub fn restrict_scaled(master: &PointConfiguration, n: u64, y: &Region) -> Result<PointConfiguration> {
    if n == 0 {
        return Err(Error::Domain("scale index must be positive".into()));
    }
    let dim = y.dim();
    if master.dim() != dim {
        return Err(Error::Domain("master and Y have different dimensions".into()));
    }
    if !master.window().contains_region(&y.scaled(dilation_factor(n, dim))) {
        return Err(Error::Coverage(format!("master window does not contain n^(1/d) Y for n = {n}")));
    }
    let s = scale_factor(n, dim);
    let mut coords = Vec::new();
    let mut q = vec![0.0; dim];
    for p in master.points() {
        for (qi, pi) in q.iter_mut().zip(p) {
            *qi = pi * s;
        }
        if y.contains(&q) {
            coords.extend_from_slice(&q);
        }
    }
    // multiplication by a positive constant preserves order, hence distinctness up to
    // underflow, which cannot happen for points of a bounded master window
    Ok(PointConfiguration::from_parts_unchecked(coords, y.clone(), Some(n), master.master_seed()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Region {
        Region::new_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn zero_intensity_is_empty() {
        let c = sample_poisson(0.0, &unit(), RngStream::new(1, 0)).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn negative_intensity_is_rejected() {
        assert!(sample_poisson(-1.0, &unit(), RngStream::new(1, 0)).is_err());
    }

    #[test]
    fn poisson_counts_have_the_right_mean() {
        let reps = 10_000;
        let total: usize = (0..reps)
            .map(|r| sample_poisson(100.0, &unit(), RngStream::new(5, r)).unwrap().len())
            .sum();
        let mean = total as f64 / reps as f64;
        assert!((mean - 100.0).abs() <= 0.3, "mean {mean}");

        let wide = Region::new_box(vec![0.0, 0.0], vec![2.0, 1.0]).unwrap();
        let total: usize = (0..2000)
            .map(|r| sample_poisson(50.0, &wide, RngStream::new(6, r)).unwrap().len())
            .sum();
        let mean = total as f64 / 2000.0;
        // sd of the mean is 10/sqrt(2000)
        assert!((mean - 100.0).abs() <= 4.0 * 10.0 / 2000f64.sqrt(), "mean {mean}");
    }

    #[test]
    fn uniform_points() {
        assert!(sample_uniform(&unit(), 0, RngStream::new(1, 1)).is_empty());
        let pts = sample_uniform(&unit(), 100_000, RngStream::new(1, 1));
        for axis in 0..2 {
            let m = pts.iter().map(|p| p[axis]).sum::<f64>() / pts.len() as f64;
            assert!((m - 0.5).abs() < 0.003);
        }
        let ball = Region::ball(vec![0.3, -0.2], 0.4).unwrap();
        assert!(sample_uniform(&ball, 5000, RngStream::new(2, 1)).iter().all(|p| ball.contains(p)));
        assert_eq!(sample_uniform(&ball, 10, RngStream::new(2, 1)), sample_uniform(&ball, 10, RngStream::new(2, 1)));
    }

    #[test]
    fn restriction_examples() {
        let y = Region::centered_unit_cube(2);
        let window = y.scaled(4.0);
        let master = PointConfiguration::new(vec![vec![0.0, 0.0], vec![2.0, 0.0]], window, None, 3).unwrap();
        let r1 = restrict_scaled(&master, 1, &y).unwrap();
        assert_eq!(r1.len(), 1);
        assert_eq!(r1.point(0), &[0.0, 0.0]);
        let r4 = restrict_scaled(&master, 4, &y).unwrap();
        assert_eq!(r4.len(), 1);
        let r16 = restrict_scaled(&master, 16, &y).unwrap();
        assert_eq!(r16.len(), 2);
        assert_eq!(r16.point(1), &[0.5, 0.0]);
        assert_eq!(r16.scale_index(), Some(16));
        assert!(matches!(restrict_scaled(&master, 17, &y), Err(Error::Coverage(_))));
    }

    #[test]
    fn restriction_mean_count() {
        let y = Region::centered_unit_cube(2);
        let n = 50;
        let reps = 1000;
        let total: usize = (0..reps)
            .map(|s| restrict_scaled(&sample_master(&y, 64, s).unwrap(), n, &y).unwrap().len())
            .sum();
        let mean = total as f64 / reps as f64;
        assert!((mean - n as f64).abs() <= 4.0 * (n as f64 / reps as f64).sqrt(), "mean {mean}");
    }
}
