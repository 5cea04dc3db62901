use crate::domain::dilation_factor;
use crate::error::{Error, Result};
use crate::stats::ols;

pub const ALPHA_GRID: [f64; 4] = [0.5, 1.0, 1.5, 2.0];

/// Fit of `p ≈ C exp(−c (n^{1/d} dist)^α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub amplitude: f64,
    pub rate: f64,
    pub alpha: f64,
    /// Largest absolute deviation of `log p` from the fitted curve.
    pub residual: f64,
    /// Same deviation for the best constant fit, as a no-decay baseline.
    pub flat_residual: f64,
}

/// Least-squares fit of `log p` against `(n^{1/d} dist)^α` for each `α` in
/// [`ALPHA_GRID`], keeping the `α` with the smallest squared error.
pub fn fit_decay(distances: &[f64], probabilities: &[f64], n: u64, dim: usize) -> Result<DecayFit> {
    if distances.len() != probabilities.len() || distances.len() < 4 {
        return Err(Error::Precondition("need at least four (distance, probability) pairs".into()));
    }
    if probabilities.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
        return Err(Error::Precondition("probabilities must lie in (0, 1]".into()));
    }
    if distances.iter().any(|&d| !(d >= 0.0 && d.is_finite())) {
        return Err(Error::Precondition("distances must be finite and non-negative".into()));
    }
    if probabilities.iter().all(|&p| p == probabilities[0]) {
        return Err(Error::FlatData("all probabilities are equal".into()));
    }
    if probabilities.iter().filter(|&&p| p < 0.5).count() < 4 {
        return Err(Error::Precondition("need at least four probabilities below 0.5".into()));
    }
    let logs: Vec<f64> = probabilities.iter().map(|p| p.ln()).collect();
    let mean_log = logs.iter().sum::<f64>() / logs.len() as f64;
    let flat_residual = logs.iter().map(|l| (l - mean_log).abs()).fold(0.0, f64::max);
    let s = dilation_factor(n, dim);

    let mut best: Option<(f64, DecayFit)> = None;
    for alpha in ALPHA_GRID {
        let xs: Vec<f64> = distances.iter().map(|d| (s * d).powf(alpha)).collect();
        let (a, b) = ols(&xs, &logs);
        let fitted = |x: f64| a + b * x;
        let sse: f64 = xs.iter().zip(&logs).map(|(&x, l)| (l - fitted(x)).powi(2)).sum();
        let residual = xs.iter().zip(&logs).map(|(&x, l)| (l - fitted(x)).abs()).fold(0.0, f64::max);
        let fit = DecayFit { amplitude: a.exp(), rate: -b, alpha, residual, flat_residual };
        if best.as_ref().is_none_or(|(e, _)| sse < *e) {
            best = Some((sse, fit));
        }
    }
    let (_, fit) = best.expect("alpha grid is non-empty");
    if fit.rate <= 0.0 {
        return Err(Error::FlatData("fitted probabilities do not decay with distance".into()));
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> Vec<f64> {
        (1..=12).map(|i| 0.2 * i as f64).collect()
    }

    #[test]
    fn exact_exponential() {
        let d = grid();
        let p: Vec<f64> = d.iter().map(|x| (-2.0 * x).exp()).collect();
        let fit = fit_decay(&d, &p, 1, 2).unwrap();
        assert_eq!(fit.alpha, 1.0);
        assert!((fit.amplitude - 1.0).abs() < 1e-10);
        assert!((fit.rate - 2.0).abs() < 1e-10);
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn noisy_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = grid();
        let p: Vec<f64> = d
            .iter()
            .map(|x| (-2.0 * x).exp() * (1.0 + 0.05 * (2.0 * rng.random::<f64>() - 1.0)))
            .collect();
        let fit = fit_decay(&d, &p, 1, 2).unwrap();
        assert!((fit.rate - 2.0).abs() < 0.3, "rate {}", fit.rate);
    }

    #[test]
    fn flat_data() {
        assert!(matches!(fit_decay(&grid(), &[0.3; 12], 1, 2), Err(Error::FlatData(_))));
    }

    #[test]
    fn too_few_small_probabilities() {
        let p = [0.9, 0.8, 0.7, 0.6, 0.4];
        assert!(matches!(fit_decay(&[0.1, 0.2, 0.3, 0.4, 0.5], &p, 1, 2), Err(Error::Precondition(_))));
    }
}
