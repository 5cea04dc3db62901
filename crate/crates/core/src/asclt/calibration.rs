use serde::{Deserialize, Serialize};

use crate::bounds::VarianceSource;
use crate::domain::{sample_scaled, scale_factor};
use crate::error::{Error, Result};
use crate::exec;
use crate::functionals::ScoreModel;
use crate::rng::{Purpose, RngStream};
use crate::stats::{jackknife_mean_var, mean, ols, variance};

/// Smallest variance accepted when standardizing.
pub const VARIANCE_FLOOR: f64 = 1e-12;

pub const MIN_CALIBRATION_REPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEntry {
    pub k: u64,
    pub mean: f64,
    pub variance: f64,
    pub reps: usize,
    pub se_mean: f64,
    pub se_var: f64,
}

/// `log Var(H_k) ≈ τ̂ log k + log_multiplier`, and `E H_k / k ≈ c0 + c1 k^{-1/d}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFit {
    pub tau_hat: f64,
    pub log_multiplier: f64,
    pub mean_fit: [f64; 2],
}

/// Per-`k` moments of `H_k` from independent replications, with interpolation
/// between grid points and fitted extrapolation outside the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTable {
    pub model_id: String,
    pub dim: usize,
    pub entries: Vec<CalibrationEntry>,
    pub fit: CalibrationFit,
}

/// Estimates `E H_k` and `Var H_k` on `k_grid` from `reps` independent draws each.
pub fn calibrate(model: &ScoreModel, k_grid: &[u64], reps: usize, stream: RngStream) -> Result<CalibrationTable> {
    if reps < MIN_CALIBRATION_REPS {
        return Err(Error::Precondition(format!("calibration needs at least {MIN_CALIBRATION_REPS} replications")));
    }
    if k_grid.len() < 4 || k_grid.windows(2).any(|w| w[0] >= w[1]) || k_grid[0] == 0 {
        return Err(Error::Precondition("k grid must have at least 4 increasing positive points".into()));
    }
    if k_grid[k_grid.len() - 1] < 8 * k_grid[0] {
        return Err(Error::Precondition("k grid must span a factor of at least 8".into()));
    }
    let mut entries = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        let base = stream.sub(Purpose::Calibration, k);
        let hs = exec::try_map_indexed(reps, |r| -> Result<f64> {
            let config = sample_scaled(model.y(), k, base.child(r as u64))?;
            Ok(model.evaluate(&config)?.standardized)
        })?;
        let v = variance(&hs);
        if !(v > 0.0) {
            return Err(Error::DegenerateModel(format!("{model}: zero sample variance at k = {k}")));
        }
        let (se_mean, se_var) = jackknife_mean_var(&hs);
        entries.push(CalibrationEntry { k, mean: mean(&hs), variance: v, reps, se_mean, se_var });
    }
    CalibrationTable::from_entries(model.to_string(), model.dim(), entries)
}

impl CalibrationTable {
    /// Builds a table from stored moments and refits the scaling laws.
    pub fn from_entries(model_id: String, dim: usize, entries: Vec<CalibrationEntry>) -> Result<Self> {
        if entries.len() < 2 || entries.windows(2).any(|w| w[0].k >= w[1].k) {
            return Err(Error::Precondition("calibration entries must have increasing k".into()));
        }
        if let Some(e) = entries.iter().find(|e| !(e.variance > 0.0)) {
            return Err(Error::DegenerateModel(format!("non-positive variance at k = {}", e.k)));
        }
        let lk: Vec<f64> = entries.iter().map(|e| (e.k as f64).ln()).collect();
        let lv: Vec<f64> = entries.iter().map(|e| e.variance.ln()).collect();
        let (log_multiplier, tau_hat) = ols(&lk, &lv);
        let sk: Vec<f64> = entries.iter().map(|e| scale_factor(e.k, dim)).collect();
        let ratio: Vec<f64> = entries.iter().map(|e| e.mean / e.k as f64).collect();
        let (c0, c1) = ols(&sk, &ratio);
        Ok(CalibrationTable { model_id, dim, entries, fit: CalibrationFit { tau_hat, log_multiplier, mean_fit: [c0, c1] } })
    }

    /// Position of `k` relative to the grid: `Ok(i)` on grid point `i`, `Err(i)` when
    /// `k` lies between entries `i − 1` and `i`.
    fn locate(&self, k: u64) -> std::result::Result<usize, usize> {
        self.entries.binary_search_by_key(&k, |e| e.k)
    }

    fn bracket(&self, k: u64) -> Option<(&CalibrationEntry, &CalibrationEntry, f64)> {
        match self.locate(k) {
            Err(i) if i > 0 && i < self.entries.len() => {
                let (lo, hi) = (&self.entries[i - 1], &self.entries[i]);
                Some((lo, hi, (k - lo.k) as f64 / (hi.k - lo.k) as f64))
            }
            _ => None,
        }
    }

    /// `E H_k`: stored value on the grid, linear interpolation of `mean/k` between grid
    /// points, and the fitted `c0 + c1 k^{-1/d}` ratio outside.
    pub fn mean_at(&self, k: u64) -> f64 {
        if let Ok(i) = self.locate(k) {
            return self.entries[i].mean;
        }
        let kf = k as f64;
        match self.bracket(k) {
            Some((lo, hi, w)) => {
                let r = (1.0 - w) * lo.mean / lo.k as f64 + w * hi.mean / hi.k as f64;
                r * kf
            }
            None => {
                let [c0, c1] = self.fit.mean_fit;
                (c0 + c1 * scale_factor(k, self.dim)) * kf
            }
        }
    }

    /// `Var H_k`: stored value on the grid, log-log interpolation between grid points,
    /// and the fitted power law outside.
    pub fn variance_at(&self, k: u64) -> f64 {
        if let Ok(i) = self.locate(k) {
            return self.entries[i].variance;
        }
        let lk = (k as f64).ln();
        match self.bracket(k) {
            Some((lo, hi, _)) => {
                let (l0, l1) = ((lo.k as f64).ln(), (hi.k as f64).ln());
                let w = (lk - l0) / (l1 - l0);
                ((1.0 - w) * lo.variance.ln() + w * hi.variance.ln()).exp()
            }
            None => (self.fit.log_multiplier + self.fit.tau_hat * lk).exp(),
        }
    }

    /// `(H − E H_k) / Var(H_k)^{1/2}`.
    pub fn standardize_value(&self, k: u64, h: f64) -> Result<f64> {
        let v = self.variance_at(k);
        if !(v >= VARIANCE_FLOOR) {
            return Err(Error::DegenerateModel(format!("calibrated variance at k = {k} is below {VARIANCE_FLOOR:e}")));
        }
        Ok((h - self.mean_at(k)) / v.sqrt())
    }
}

impl VarianceSource for CalibrationTable {
    fn variance_at(&self, n: u64) -> Result<f64> {
        Ok(CalibrationTable::variance_at(self, n))
    }
}
