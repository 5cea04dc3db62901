//! Coupled trajectories `(H_k)`, their calibration and standardization, the
//! logarithmic average `Σ (1/k) ε_{F_k}` and its distance to the normal law.

mod calibration;
mod diagnostic;
mod measure;
mod trajectory;

pub use calibration::{calibrate, CalibrationEntry, CalibrationFit, CalibrationTable, MIN_CALIBRATION_REPS, VARIANCE_FLOOR};
pub use diagnostic::{il_diagnostic, log_grid, trajectory_seed, IlRow};
pub use measure::{delta_n, ks_to_normal, log_average_measure, standardize, LogAverageMeasure};
pub use trajectory::{run_trajectory, Schedule, Trajectory, TrajectoryPoint};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Summary of a standardized trajectory at one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AscltRow {
    pub n: u64,
    pub total_weight: f64,
    pub ks: f64,
    pub unnormalized_mass: f64,
}

pub fn asclt_rows(trajectory: &Trajectory, n_grid: &[u64]) -> Result<Vec<AscltRow>> {
    n_grid
        .iter()
        .map(|&n| {
            let m = log_average_measure(trajectory, n)?;
            Ok(AscltRow { n, total_weight: m.total_weight, ks: ks_to_normal(&m), unnormalized_mass: m.unnormalized_mass() })
        })
        .collect()
}
