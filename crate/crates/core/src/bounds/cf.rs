use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::BoundEstimate;
use crate::error::{Error, Result};
use crate::stats::{jackknife_mean_var, variance};

fn require_samples(samples: &[f64]) -> Result<()> {
    if samples.len() < 100 {
        return Err(Error::Precondition("at least 100 samples are required".into()));
    }
    Ok(())
}

fn empirical_cf(samples: &[f64], t: f64) -> Complex64 {
    let sum: Complex64 = samples.iter().map(|&f| Complex64::from_polar(1.0, t * f)).sum();
    sum / samples.len() as f64
}

/// `|mean(e^{itF}) − e^{−t²/2}|`.
pub fn cf_gap(samples: &[f64], t: f64) -> Result<f64> {
    require_samples(samples)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok((empirical_cf(samples, t) - (-t * t / 2.0).exp()).norm())
}

/// Standard error of the empirical characteristic function at `t`, which bounds the
/// sampling error of [`cf_gap`] to first order.
pub fn cf_gap_se(samples: &[f64], t: f64) -> Result<f64> {
    require_samples(samples)?;
    let cos: Vec<f64> = samples.iter().map(|f| (t * f).cos()).collect();
    let sin: Vec<f64> = samples.iter().map(|f| (t * f).sin()).collect();
    Ok(((variance(&cos) + variance(&sin)) / samples.len() as f64).sqrt())
}

/// One-sided statistical check of the Gaussian CF bound
/// `|E e^{itF} − e^{−t²/2}| ≤ t²(|1 − E F²| + γ₁(F)) + |t|³ γ₂(F)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfCheck {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub combined_se: f64,
    pub passes: bool,
}

/// `gamma1`, `gamma2` are estimates for the standardized `F`; `V̂` is the sample
/// variance of `samples`. The check passes when `lhs ≤ rhs + 5·combined_se`.
pub fn lemma_cf_check(samples: &[f64], t: f64, gamma1: &BoundEstimate, gamma2: &BoundEstimate) -> Result<CfCheck> {
    let lhs = cf_gap(samples, t)?;
    let v = variance(samples);
    let (_, se_v) = jackknife_mean_var(samples);
    let t2 = t * t;
    let t3 = t.abs().powi(3) / std::f64::consts::SQRT_2;
    let rhs = t2 * ((1.0 - v).abs() + gamma1.value) + t3 * gamma2.value;
    let combined_se = (cf_gap_se(samples, t)?.powi(2)
        + (t2 * se_v).powi(2)
        + (t2 * gamma1.standard_error).powi(2)
        + (t3 * gamma2.standard_error).powi(2))
    .sqrt();
    Ok(CfCheck { t, lhs, rhs, combined_se, passes: lhs <= rhs + 5.0 * combined_se })
}
