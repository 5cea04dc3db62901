//! Small statistical helpers shared by the estimators.

use libm::erfc;

/// Standard normal CDF, `Φ(x) = erfc(-x/√2)/2`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
}

/// Standard error of the sample mean.
pub fn std_error(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Jackknife standard errors of the sample mean and the unbiased sample variance.
///
/// Leave-one-out statistics are computed from running sums, O(n).
pub fn jackknife_mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n < 3 {
        return (f64::NAN, f64::NAN);
    }
    let nf = n as f64;
    let m = mean(xs);
    // centred sums keep cancellation small
    let s2: f64 = xs.iter().map(|x| (x - m).powi(2)).sum();
    let mut loo_mean = Vec::with_capacity(n);
    let mut loo_var = Vec::with_capacity(n);
    for &x in xs {
        let d = x - m;
        let mi = m - d / (nf - 1.0);
        // sum of squares about the leave-one-out mean
        let ss = s2 - d * d * nf / (nf - 1.0);
        loo_mean.push(mi);
        loo_var.push(ss / (nf - 2.0));
    }
    let jk = |v: &[f64]| {
        let mv = mean(v);
        ((nf - 1.0) / nf * v.iter().map(|x| (x - mv).powi(2)).sum::<f64>()).sqrt()
    };
    (jk(&loo_mean), jk(&loo_var))
}

/// Wilson score interval standard error (z = 1) for a binomial proportion.
pub fn wilson_se(successes: usize, trials: usize) -> f64 {
    if trials == 0 {
        return f64::NAN;
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    (p * (1.0 - p) / n + 1.0 / (4.0 * n * n)).sqrt() / (1.0 + 1.0 / n)
}

/// Upper end of the Wilson interval at level `z`.
pub fn wilson_upper(successes: usize, trials: usize, z: f64) -> f64 {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    (centre + half).min(1.0)
}

/// Ordinary least squares fit `y ≈ a + b x`; returns `(a, b)`.
pub fn ols(x: &[f64], y: &[f64]) -> (f64, f64) {
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

/// Two-sided one-sample KS distance of `samples` to the standard normal.
pub fn ks_normal(samples: &[f64]) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0_f64, |acc, (i, &x)| {
        let phi = normal_cdf(x);
        let hi = ((i + 1) as f64 / n - phi).abs();
        let lo = (phi - i as f64 / n).abs();
        acc.max(hi).max(lo)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normal_cdf_reference_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert_abs_diff_eq!(normal_cdf(1.0), 0.841_344_746_068_542_9, epsilon = 1e-14);
        assert_abs_diff_eq!(normal_cdf(-1.96), 0.024_997_895_148_220_43, epsilon = 1e-14);
        assert_abs_diff_eq!(normal_cdf(-8.0), 6.220_960_574_271_785e-16, epsilon = 1e-25);
    }

    #[test]
    fn jackknife_mean_matches_classical_se() {
        let xs: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64 + 0.1 * i as f64).collect();
        let (se_m, _) = jackknife_mean_var(&xs);
        assert_abs_diff_eq!(se_m, std_error(&xs), epsilon = 1e-12);
    }

    #[test]
    fn jackknife_var_matches_brute_force() {
        let xs: Vec<f64> = (0..20).map(|i| ((i * 7) % 5) as f64 * 1.3 + (i as f64).sqrt()).collect();
        let n = xs.len() as f64;
        let loo: Vec<f64> = (0..xs.len())
            .map(|j| {
                let v: Vec<f64> = xs.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, x)| *x).collect();
                variance(&v)
            })
            .collect();
        let m = mean(&loo);
        let brute = ((n - 1.0) / n * loo.iter().map(|x| (x - m).powi(2)).sum::<f64>()).sqrt();
        let (_, se_v) = jackknife_mean_var(&xs);
        assert_abs_diff_eq!(se_v, brute, epsilon = 1e-10);
    }

    #[test]
    fn ols_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 0.5 + 2.0 * v).collect();
        let (a, b) = ols(&x, &y);
        assert_abs_diff_eq!(a, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(b, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn wilson_bounds() {
        assert!(wilson_se(0, 100) > 0.0);
        assert!(wilson_upper(0, 100, 1.96) > 0.0);
        assert!(wilson_upper(100, 100, 1.96) <= 1.0);
    }
}
