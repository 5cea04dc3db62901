use serde::{Deserialize, Serialize};

use super::{delta_n, run_trajectory, standardize, CalibrationTable, Schedule};
use crate::error::{Error, Result};
use crate::exec;
use crate::functionals::ScoreModel;
use crate::stats::{mean, std_error};

/// One `(n, t)` cell of the Ibragimov–Lifshits table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IlRow {
    pub n: u64,
    pub t: f64,
    pub mean_sq: f64,
    pub se: f64,
    /// Indicative partial sum of `Ê|Δ_m(t)|² / (m ln m)` over `m ≤ n`, by the
    /// trapezoidal rule in `ln m` on the grid (not an exact sum over all `m`).
    pub partial_sum: f64,
}

/// Up to `count` distinct integers log-spaced between `lo` and `hi` inclusive.
pub fn log_grid(lo: u64, hi: u64, count: usize) -> Vec<u64> {
    if count < 2 || lo >= hi {
        return vec![hi];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut g: Vec<u64> =
        (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as u64).collect();
    g[0] = lo;
    g[count - 1] = hi;
    g.dedup();
    g
}

/// Seed of the `r`-th trajectory of a diagnostic run.
pub fn trajectory_seed(base_seed: u64, r: usize) -> u64 {
    base_seed.wrapping_add(r as u64)
}

/// `Ê|Δ_n(t)|²` over `trajectories` independent complete trajectories on the
/// seeds `base_seed, base_seed + 1, …`, for every `n` in `n_grid` and `t` in `t_grid`.
pub fn il_diagnostic(
    model: &ScoreModel,
    table: &CalibrationTable,
    n_grid: &[u64],
    t_grid: &[f64],
    trajectories: usize,
    base_seed: u64,
) -> Result<Vec<IlRow>> {
    if trajectories < 50 {
        return Err(Error::Precondition("the diagnostic needs at least 50 trajectories".into()));
    }
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] < 2 {
        return Err(Error::Precondition("n grid must be increasing and start at 2 or above".into()));
    }
    let n_max = n_grid[n_grid.len() - 1];
    // per trajectory: |Δ_n(t)|² in (n, t) order
    let sq = exec::try_map_indexed(trajectories, |r| -> Result<Vec<f64>> {
        let traj = run_trajectory(model, n_max, Schedule::Complete, trajectory_seed(base_seed, r))?;
        let traj = standardize(&traj, table)?;
        let mut out = Vec::with_capacity(n_grid.len() * t_grid.len());
        for &n in n_grid {
            for &t in t_grid {
                out.push(delta_n(&traj, n, t)?.norm_sqr());
            }
        }
        Ok(out)
    })?;
    let mut rows = Vec::with_capacity(n_grid.len() * t_grid.len());
    for (ti, &t) in t_grid.iter().enumerate() {
        let mut partial = 0.0;
        let mut prev: Option<(f64, f64)> = None;
        for (ni, &n) in n_grid.iter().enumerate() {
            let cell: Vec<f64> = sq.iter().map(|v| v[ni * t_grid.len() + ti]).collect();
            let m = mean(&cell);
            // Σ_m a_m ≈ ∫ a(e^u) e^u du with a_m = Ê|Δ_m|²/(m ln m)
            let u = (n as f64).ln();
            let g = m / u;
            if let Some((pu, pg)) = prev {
                partial += 0.5 * (g + pg) * (u - pu);
            }
            prev = Some((u, g));
            rows.push(IlRow { n, t, mean_sq: m, se: std_error(&cell), partial_sum: partial });
        }
    }
    rows.sort_by(|a, b| a.n.cmp(&b.n).then(a.t.total_cmp(&b.t)));
    Ok(rows)
}
