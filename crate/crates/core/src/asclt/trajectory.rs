use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::{restrict_scaled, sample_master};
use crate::error::{Error, Result};
use crate::exec;
use crate::functionals::ScoreModel;

/// Which scale indices `k ≤ n_max` a trajectory visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// Every `k` in `1..=n_max`.
    Complete,
    /// `base, base + stride, base + 2 stride, …` up to `n_max`.
    Strided { base: u64, stride: u64 },
}

impl Schedule {
    pub fn indices(&self, n_max: u64) -> Result<Vec<u64>> {
        match *self {
            Schedule::Complete => Ok((1..=n_max).collect()),
            Schedule::Strided { base, stride } => {
                if base == 0 || stride == 0 {
                    return Err(Error::Precondition("strided schedule needs positive base and stride".into()));
                }
                Ok((base..=n_max).step_by(stride as usize).collect())
            }
        }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self, Schedule::Complete)
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Complete => write!(f, "complete"),
            Schedule::Strided { base, stride } => write!(f, "strided(base={base}, stride={stride})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub k: u64,
    pub h: f64,
    /// Standardized value, filled by [`standardize`](super::standardize).
    pub f: Option<f64>,
}

/// `(H_k)_{k ∈ schedule}` computed pathwise from one master process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub model_id: String,
    pub master_seed: u64,
    pub n_max: u64,
    pub schedule: Schedule,
    pub values: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn is_standardized(&self) -> bool {
        self.values.iter().all(|v| v.f.is_some())
    }

    /// Standardized values for `k ≤ n`, paired with `k`.
    pub(crate) fn standardized_upto(&self, n: u64) -> Result<Vec<(u64, f64)>> {
        self.values
            .iter()
            .take_while(|v| v.k <= n)
            .map(|v| v.f.map(|f| (v.k, f)).ok_or_else(|| Error::Precondition("trajectory is not standardized".into())))
            .collect()
    }
}

/// Samples one master process on `n_max^{1/d} Y` and evaluates `H_k` on
/// `η_k ∩ Y` for every scheduled `k`.
pub fn run_trajectory(model: &ScoreModel, n_max: u64, schedule: Schedule, master_seed: u64) -> Result<Trajectory> {
    let ks = schedule.indices(n_max)?;
    let master = sample_master(model.y(), n_max, master_seed)?;
    let hs = exec::try_map_indexed(ks.len(), |j| -> Result<f64> {
        let config = restrict_scaled(&master, ks[j], model.y())?;
        Ok(model.evaluate(&config)?.standardized)
    })?;
    Ok(Trajectory {
        model_id: model.to_string(),
        master_seed,
        n_max,
        schedule,
        values: ks.into_iter().zip(hs).map(|(k, h)| TrajectoryPoint { k, h, f: None }).collect(),
    })
}
