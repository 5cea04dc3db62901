//! Add-one costs `D_y H_n`, second differences `D²_{y1,y2} H_n` and empirical
//! stabilization and decay diagnostics.

mod decay;

pub use decay::{fit_decay, DecayFit, ALPHA_GRID};

use rand::Rng;

use crate::domain::{sample_scaled, PointConfiguration, Region};
use crate::error::{Error, Result};
use crate::exec;
use crate::functionals::ScoreModel;
use crate::rng::RngStream;
use crate::stats::wilson_se;

/// Largest number of extra points in a stabilization check.
pub const MAX_EXTRA_POINTS: usize = 7;

fn check_new_point(model: &ScoreModel, config: &PointConfiguration, y: &[f64]) -> Result<bool> {
    if y.len() != model.dim() {
        return Err(Error::Precondition("added point has the wrong dimension".into()));
    }
    if !model.y().contains(y) {
        return Ok(false);
    }
    if config.position(y).is_some() {
        return Err(Error::Precondition("added point already belongs to the configuration".into()));
    }
    Ok(true)
}

fn total(model: &ScoreModel, config: &PointConfiguration) -> Result<f64> {
    Ok(model.evaluate(config)?.standardized)
}

/// `D_y H_n = H_n(config ∪ {y}) − H_n(config)`, which is exactly 0 for `y ∉ Y`.
pub fn add_one_cost(model: &ScoreModel, config: &PointConfiguration, y: &[f64]) -> Result<f64> {
    if !check_new_point(model, config, y)? {
        return Ok(0.0);
    }
    Ok(total(model, &config.with_point(y)?)? - total(model, config)?)
}

/// Same quantity computed from the per-point score sums instead of the model totals.
pub fn add_one_cost_from_scores(model: &ScoreModel, config: &PointConfiguration, y: &[f64]) -> Result<f64> {
    if !check_new_point(model, config, y)? {
        return Ok(0.0);
    }
    Ok(model.total_from_scores(&config.with_point(y)?)? - model.total_from_scores(config)?)
}

/// `D²_{y1,y2} H_n = H(η+y1+y2) − H(η+y1) − H(η+y2) + H(η)`.
pub fn second_difference(model: &ScoreModel, config: &PointConfiguration, y1: &[f64], y2: &[f64]) -> Result<f64> {
    if y1 == y2 {
        return Err(Error::Precondition("second difference needs two distinct points".into()));
    }
    let in1 = check_new_point(model, config, y1)?;
    let in2 = check_new_point(model, config, y2)?;
    if !(in1 && in2) {
        return Ok(0.0);
    }
    let with1 = config.with_point(y1)?;
    let with2 = config.with_point(y2)?;
    // canonical insertion order and grouping make the result exactly symmetric
    let both = if crate::domain::lex_cmp(y1, y2).is_le() { with1.with_point(y2)? } else { with2.with_point(y1)? };
    Ok((total(model, &both)? + total(model, config)?) - (total(model, &with1)? + total(model, &with2)?))
}

/// Result of [`stabilization_radius_proxy`]; `stable` is false when even the largest
/// grid radius did not reproduce the full score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusProxy {
    pub radius: f64,
    pub stable: bool,
}

/// Smallest grid radius `r` from which on the score of `p_i` computed on
/// `(config ∪ extra) ∩ B(p_i, r)` equals its score on the full set.
///
/// This certifies stabilization for one realization and one extra set only.
pub fn stabilization_radius_proxy(
    model: &ScoreModel,
    config: &PointConfiguration,
    i: usize,
    r_grid: &[f64],
    extra_points: &[Vec<f64>],
) -> Result<RadiusProxy> {
    if r_grid.is_empty() {
        return Err(Error::Precondition("radius grid is empty".into()));
    }
    if r_grid.windows(2).any(|w| w[0] >= w[1]) || r_grid[0] < 0.0 {
        return Err(Error::Precondition("radius grid must be non-negative and increasing".into()));
    }
    if extra_points.len() > MAX_EXTRA_POINTS {
        return Err(Error::Precondition(format!("at most {MAX_EXTRA_POINTS} extra points")));
    }
    if i >= config.len() {
        return Err(Error::Precondition(format!("point index {i} out of range")));
    }
    let full = config.with_points(extra_points)?;
    let reference = model.score(&full, i)?;
    let x = full.point(i).to_vec();
    let matches_at = |r: f64| -> bool {
        let members: Vec<usize> = (0..full.len())
            .filter(|&j| crate::domain::dist2(full.point(j), &x) <= r * r)
            .collect();
        let pos = members.iter().position(|&j| j == i).expect("centre is in its own ball");
        model.score(&full.subset(&members), pos).is_ok_and(|s| s == reference)
    };
    let mut first_stable = None;
    for g in (0..r_grid.len()).rev() {
        if matches_at(r_grid[g]) {
            first_stable = Some(g);
        } else {
            break;
        }
    }
    Ok(match first_stable {
        Some(g) => RadiusProxy { radius: r_grid[g], stable: true },
        None => RadiusProxy { radius: r_grid[r_grid.len() - 1], stable: false },
    })
}

/// Extra point set for a stabilization trial: cardinality uniform on `0..=7`, points
/// uniform in `Y`.
pub fn sample_extra_points(y: &Region, stream: RngStream) -> Vec<Vec<f64>> {
    let mut rng = stream.rng();
    let count = rng.random_range(0..=MAX_EXTRA_POINTS);
    (0..count)
        .map(|_| {
            let mut p = vec![0.0; y.dim()];
            y.sample_point(&mut rng, &mut p);
            p
        })
        .collect()
}

/// Binomial proportion with a Wilson-based standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityEstimate {
    pub p: f64,
    pub standard_error: f64,
    pub successes: usize,
    pub reps: usize,
}

/// Fraction of fresh realizations of `η_n ∩ Y` for which
/// `ξ_n(x, (η_n ∩ Y) ∪ {x} ∪ extra) ≠ 0`.
pub fn nonzero_score_prob(
    model: &ScoreModel,
    n: u64,
    x: &[f64],
    extra: &[Vec<f64>],
    reps: usize,
    stream: RngStream,
) -> Result<ProbabilityEstimate> {
    if reps < 100 {
        return Err(Error::Precondition("at least 100 replications are required".into()));
    }
    if extra.len() > MAX_EXTRA_POINTS {
        return Err(Error::Precondition(format!("at most {MAX_EXTRA_POINTS} extra points")));
    }
    if !model.y().contains(x) {
        return Err(Error::Precondition("x must lie in Y".into()));
    }
    let hits = exec::try_map_indexed(reps, |r| -> Result<bool> {
        let base = sample_scaled(model.y(), n, stream.child(r as u64))?;
        let at = base.len();
        let cfg = base.with_point(x)?.with_points(extra)?;
        Ok(model.score(&cfg, at)? != 0.0)
    })?;
    let successes = hits.iter().filter(|&&h| h).count();
    Ok(ProbabilityEstimate {
        p: successes as f64 / reps as f64,
        standard_error: wilson_se(successes, reps),
        successes,
        reps,
    })
}
