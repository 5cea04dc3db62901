//! Monte-Carlo estimators of the quantities controlling the almost sure CLT:
//! `I_{K,n}`, `ψ_x`, `Γ₁`, `Γ₂`, `Θ`, `Λ`, and the characteristic-function gap
//! together with the direct `γ₁`, `γ₂` of the Gaussian CF bound.
//!
//! Integrals over `R^d` are reduced to `Y` with the indicator
//! `D_x H_n = 1{n^{-1/d} x ∈ Y} 𝒟_{n^{-1/d} x} H_n`, so `∫ g dx = n ∫_Y g dy`.

mod cf;
mod gamma;

pub use cf::{cf_gap, cf_gap_se, lemma_cf_check, CfCheck};
pub use gamma::{estimate_cf_gamma1, estimate_cf_gamma2};

use serde::{Deserialize, Serialize};

use crate::domain::{distance_to_target, sample_scaled, scale_factor, DistanceTarget, Region};
use crate::error::{Error, Result};
use crate::exec;
use crate::functionals::ScoreModel;
use crate::malliavin::{add_one_cost, second_difference};
use crate::rng::{Purpose, RngStream};
use crate::stats::{mean, std_error, wilson_se, wilson_upper};

/// Exponents and Monte-Carlo budget for the bound estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConfig {
    pub p_dprime: f64,
    pub c_pprime: f64,
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    pub outer_samples: usize,
    pub inner_reps: usize,
}

impl Default for BoundConfig {
    /// `p = q = p″ = 1/2`, `α = 1`, and `c_{p′}` normalized so that the decay factor
    /// `p″ c_{p′} / (2^{2α+3} (4 + p″))` equals one.
    fn default() -> Self {
        let (p_dprime, alpha) = (0.5, 1.0);
        BoundConfig {
            p_dprime,
            c_pprime: Self::unit_decay_c(p_dprime, alpha),
            alpha,
            p: p_dprime,
            q: p_dprime,
            outer_samples: 200,
            inner_reps: 100,
        }
    }
}

impl BoundConfig {
    /// The `c_{p′}` for which the exponent of `I_{K,n}` is exactly `n^{α/d} d(x, K)^α`.
    pub fn unit_decay_c(p_dprime: f64, alpha: f64) -> f64 {
        2f64.powf(2.0 * alpha + 3.0) * (4.0 + p_dprime) / p_dprime
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_dprime > 0.0 && self.p_dprime < 1.0) {
            return Err(Error::Precondition("p'' must lie in (0, 1)".into()));
        }
        for (name, v) in [("c_pprime", self.c_pprime), ("alpha", self.alpha), ("p", self.p), ("q", self.q)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Precondition(format!("{name} must be positive")));
            }
        }
        if self.outer_samples == 0 || self.inner_reps == 0 {
            return Err(Error::Precondition("sample counts must be positive".into()));
        }
        Ok(())
    }

    fn decay_factor(&self) -> f64 {
        self.p_dprime * self.c_pprime / (2f64.powf(2.0 * self.alpha + 3.0) * (4.0 + self.p_dprime))
    }

    /// `q / (4 (4 + q))`.
    pub fn beta1(&self) -> f64 {
        self.q / (4.0 * (4.0 + self.q))
    }

    /// `q / (2 (4 + q))`.
    pub fn beta2(&self) -> f64 {
        self.q / (2.0 * (4.0 + self.q))
    }

    /// `(1 + p) / (4 + p)`.
    pub fn gamma2_exponent(&self) -> f64 {
        (1.0 + self.p) / (4.0 + self.p)
    }

    /// `p / (4 (4 + p))`.
    pub fn theta_exponent(&self) -> f64 {
        self.p / (4.0 * (4.0 + self.p))
    }

    fn require_inner(&self) -> Result<()> {
        if self.inner_reps < 30 {
            return Err(Error::Precision("inner_reps must be at least 30".into()));
        }
        Ok(())
    }
}

/// A Monte-Carlo estimate. `bias_bound` is a first-order bound on the plug-in bias of
/// powers `p̂^β` of estimated probabilities (0 when no powers are involved);
/// `zero_cells` counts integration nodes whose estimated probability was 0, each of
/// which may hide a true probability up to `zero_cell_upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub samples_used: usize,
    pub bias_bound: f64,
    pub zero_cells: usize,
    pub zero_cell_upper: f64,
}

impl BoundEstimate {
    pub fn exact(value: f64) -> Self {
        BoundEstimate { value, standard_error: 0.0, samples_used: 0, bias_bound: 0.0, zero_cells: 0, zero_cell_upper: 0.0 }
    }
}

/// Source of `Var(H_n)`, usually a calibration table.
pub trait VarianceSource {
    fn variance_at(&self, n: u64) -> Result<f64>;
}

impl<F: Fn(u64) -> Result<f64>> VarianceSource for F {
    fn variance_at(&self, n: u64) -> Result<f64> {
        self(n)
    }
}

fn positive_variance(var: &dyn VarianceSource, n: u64) -> Result<f64> {
    let v = var.variance_at(n)?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::DegenerateModel(format!("variance at n = {n} is not positive")));
    }
    Ok(v)
}

/// `I_{K,n} = n ∫_Y exp(−p″ c_{p′} n^{α/d} d(x,K)^α / (2^{2α+3}(4+p″))) dx`.
pub fn compute_ikn(
    y: &Region,
    k: &DistanceTarget,
    n: u64,
    cfg: &BoundConfig,
    quad_points: usize,
    stream: RngStream,
) -> Result<BoundEstimate> {
    cfg.validate()?;
    let scale = n as f64 * y.volume();
    if let DistanceTarget::WholeRegion(r) = k {
        if r.contains_region(y) {
            return Ok(BoundEstimate::exact(scale));
        }
    }
    if quad_points < 1000 {
        return Err(Error::Precondition("at least 1000 quadrature points are required".into()));
    }
    let f = cfg.decay_factor() * (n as f64).powf(cfg.alpha / y.dim() as f64);
    let mut rng = stream.rng();
    let mut x = vec![0.0; y.dim()];
    let mut vals = Vec::with_capacity(quad_points);
    for _ in 0..quad_points {
        y.sample_point(&mut rng, &mut x);
        let d = distance_to_target(&x, k)?;
        vals.push((-f * d.powf(cfg.alpha)).exp());
    }
    Ok(BoundEstimate {
        value: scale * mean(&vals),
        standard_error: scale * std_error(&vals),
        samples_used: quad_points,
        bias_bound: 0.0,
        zero_cells: 0,
        zero_cell_upper: 0.0,
    })
}

/// Sampler for the integration variable `x1` of `ψ_x`: uniform on `Y`, or on the ball
/// `B(x, R)` when `D²_{x1,x}` is known to vanish beyond `R` (points of the ball outside
/// `Y` contribute 0).
struct PartnerSampler {
    ball: Option<Region>,
    factor: f64,
}

impl PartnerSampler {
    fn new(model: &ScoreModel, n: u64, x: &[f64]) -> Result<Self> {
        Ok(match model.second_order_range(n) {
            Some(r) if r > 0.0 => {
                let ball = Region::ball(x.to_vec(), r)?;
                let factor = n as f64 * ball.volume();
                PartnerSampler { ball: Some(ball), factor }
            }
            _ => PartnerSampler { ball: None, factor: n as f64 * model.y().volume() },
        })
    }

    fn draw(&self, model: &ScoreModel, stream: RngStream) -> Vec<f64> {
        let mut rng = stream.rng();
        let mut p = vec![0.0; model.dim()];
        match &self.ball {
            Some(b) => b.sample_point(&mut rng, &mut p),
            None => model.y().sample_point(&mut rng, &mut p),
        }
        p
    }
}

/// Counts realizations of `η_n ∩ Y` with `pred(config) ≠ 0`.
fn nonzero_count(
    model: &ScoreModel,
    n: u64,
    reps: usize,
    stream: RngStream,
    value: impl Fn(&crate::domain::PointConfiguration) -> Result<f64>,
) -> Result<usize> {
    let mut hits = 0;
    for r in 0..reps {
        let cfg = sample_scaled(model.y(), n, stream.child(r as u64))?;
        if value(&cfg)? != 0.0 {
            hits += 1;
        }
    }
    Ok(hits)
}

/// Inner estimates `p̂(x1) = P̂(D²_{x1,x} H_n ≠ 0)` at the outer nodes of `ψ_x`.
fn psi_probabilities(
    model: &ScoreModel,
    n: u64,
    x: &[f64],
    cfg: &BoundConfig,
    stream: RngStream,
) -> Result<(PartnerSampler, Vec<usize>)> {
    let sampler = PartnerSampler::new(model, n, x)?;
    let hits = exec::try_map_indexed(cfg.outer_samples, |j| -> Result<usize> {
        let node_stream = stream.sub(Purpose::Quadrature, j as u64);
        let x1 = sampler.draw(model, node_stream);
        if !model.y().contains(&x1) || x1 == x {
            return Ok(0);
        }
        nonzero_count(model, n, cfg.inner_reps, stream.sub(Purpose::Replication, j as u64), |c| {
            second_difference(model, c, &x1, x)
        })
    })?;
    Ok((sampler, hits))
}

/// Turns hit counts into `factor · mean(p̂^β)` with its error budget.
fn power_integral(factor: f64, hits: &[usize], reps: usize, beta: f64) -> BoundEstimate {
    let vals: Vec<f64> = hits.iter().map(|&h| (h as f64 / reps as f64).powf(beta)).collect();
    let bias: Vec<f64> = hits
        .iter()
        .map(|&h| {
            let p = h as f64 / reps as f64;
            if h == 0 {
                0.0
            } else {
                beta * wilson_se(h, reps) / p.powf(1.0 - beta)
            }
        })
        .collect();
    let zero_cells = hits.iter().filter(|&&h| h == 0).count();
    BoundEstimate {
        value: factor * mean(&vals),
        standard_error: factor * std_error(&vals),
        samples_used: hits.len() * reps,
        bias_bound: factor * mean(&bias),
        zero_cells,
        zero_cell_upper: if zero_cells > 0 { wilson_upper(0, reps, 1.96) } else { 0.0 },
    }
}

/// `ψ_x(H_n, β) = ∫ P(D²_{x1,x} H_n ≠ 0)^β dx1`, with `x ∈ Y` in scaled coordinates.
pub fn estimate_psi(
    model: &ScoreModel,
    n: u64,
    x: &[f64],
    beta: f64,
    cfg: &BoundConfig,
    stream: RngStream,
) -> Result<BoundEstimate> {
    cfg.validate()?;
    cfg.require_inner()?;
    if !(beta > 0.0) {
        return Err(Error::Precondition("beta must be positive".into()));
    }
    if !model.y().contains(x) {
        return Err(Error::Precondition("x must lie in Y".into()));
    }
    if model.is_linear() {
        return Ok(BoundEstimate::exact(0.0));
    }
    let (sampler, hits) = psi_probabilities(model, n, x, cfg, stream)?;
    Ok(power_integral(sampler.factor, &hits, cfg.inner_reps, beta))
}

fn outer_point(model: &ScoreModel, stream: RngStream) -> Vec<f64> {
    let mut rng = stream.rng();
    let mut x = vec![0.0; model.dim()];
    model.y().sample_point(&mut rng, &mut x);
    x
}

/// `Γ₂(H_n) = Var(H_n)^{-3/2} ∫ P(D_x H_n ≠ 0)^{(1+p)/(4+p)} dx`.
pub fn estimate_gamma2(
    model: &ScoreModel,
    n: u64,
    cfg: &BoundConfig,
    var: &dyn VarianceSource,
    stream: RngStream,
) -> Result<BoundEstimate> {
    cfg.validate()?;
    cfg.require_inner()?;
    let v = positive_variance(var, n)?;
    let hits = exec::try_map_indexed(cfg.outer_samples, |j| -> Result<usize> {
        let x = outer_point(model, stream.sub(Purpose::Quadrature, j as u64));
        nonzero_count(model, n, cfg.inner_reps, stream.sub(Purpose::Replication, j as u64), |c| {
            add_one_cost(model, c, &x)
        })
    })?;
    let factor = n as f64 * model.y().volume() / v.powf(1.5);
    Ok(power_integral(factor, &hits, cfg.inner_reps, cfg.gamma2_exponent()))
}

/// `Γ₁(H_n) = Var(H_n)^{-1} (∫ ψ_x(H_n, β₁)² dx + ∫ ψ_x(H_n, β₂)² dx)^{1/2}` with
/// `β₁ = q/(4(4+q))`, `β₂ = q/(2(4+q))`. Cost is `outer² · inner` evaluations of `D²`.
pub fn estimate_gamma1(
    model: &ScoreModel,
    n: u64,
    cfg: &BoundConfig,
    var: &dyn VarianceSource,
    stream: RngStream,
) -> Result<BoundEstimate> {
    cfg.validate()?;
    cfg.require_inner()?;
    let v = positive_variance(var, n)?;
    if model.is_linear() {
        return Ok(BoundEstimate::exact(0.0));
    }
    let (b1, b2) = (cfg.beta1(), cfg.beta2());
    // per outer x: (ψ(β1), ψ(β2), bias bounds, zero cells)
    let rows: Vec<[f64; 5]> = (0..cfg.outer_samples)
        .map(|j| -> Result<[f64; 5]> {
            let x = outer_point(model, stream.sub(Purpose::Quadrature, j as u64));
            let (sampler, hits) = psi_probabilities(model, n, &x, cfg, stream.sub(Purpose::Bound, j as u64))?;
            let p1 = power_integral(sampler.factor, &hits, cfg.inner_reps, b1);
            let p2 = power_integral(sampler.factor, &hits, cfg.inner_reps, b2);
            Ok([p1.value, p2.value, p1.bias_bound, p2.bias_bound, p1.zero_cells as f64])
        })
        .collect::<Result<_>>()?;
    let outer_factor = n as f64 * model.y().volume();
    let squares: Vec<f64> = rows.iter().map(|r| r[0] * r[0] + r[1] * r[1]).collect();
    let upper: Vec<f64> = rows.iter().map(|r| (r[0] + r[2]).powi(2) + (r[1] + r[3]).powi(2)).collect();
    let s = outer_factor * mean(&squares);
    let value = s.sqrt() / v;
    // delta method on the square root
    let se_s = outer_factor * std_error(&squares);
    let standard_error = if s > 0.0 { se_s / (2.0 * s.sqrt() * v) } else { 0.0 };
    let upper_value = (outer_factor * mean(&upper)).sqrt() / v;
    let zero_cells = rows.iter().map(|r| r[4] as usize).sum();
    Ok(BoundEstimate {
        value,
        standard_error,
        samples_used: cfg.outer_samples * cfg.outer_samples * cfg.inner_reps,
        bias_bound: upper_value - value,
        zero_cells,
        zero_cell_upper: if zero_cells > 0 { wilson_upper(0, cfg.inner_reps, 1.96) } else { 0.0 },
    })
}

fn require_star_shaped(y: &Region) -> Result<()> {
    if !y.contains(&vec![0.0; y.dim()]) {
        return Err(Error::Precondition("Y must contain the origin (translate it at load time)".into()));
    }
    Ok(())
}

/// `Θ(H_{n1}, H_{n2}) = (Var Var)^{-1/2} ∫ P(D_x H_{n1} ≠ 0)^e P(D_x H_{n2} ≠ 0)^e dx`,
/// `e = p/(4(4+p))`. The integral runs over the unscaled window `min(n1,n2)^{1/d} Y`,
/// where both indicators can be non-zero.
pub fn estimate_theta(
    model: &ScoreModel,
    n1: u64,
    n2: u64,
    cfg: &BoundConfig,
    var: &dyn VarianceSource,
    stream: RngStream,
) -> Result<BoundEstimate> {
    cfg.validate()?;
    cfg.require_inner()?;
    require_star_shaped(model.y())?;
    let v1 = positive_variance(var, n1)?;
    let v2 = positive_variance(var, n2)?;
    let n_min = n1.min(n2);
    let e = cfg.theta_exponent();
    let d = model.dim();
    let rows = exec::try_map_indexed(cfg.outer_samples, |j| -> Result<(f64, f64, usize)> {
        // unscaled x = n_min^{1/d} u with u uniform in Y
        let u = outer_point(model, stream.sub(Purpose::Quadrature, j as u64));
        let mut prob = [0.0; 2];
        let mut bias = 0.0;
        let mut zero = 0;
        for (slot, &n) in [n1, n2].iter().enumerate() {
            let s = scale_factor(n, d) / scale_factor(n_min, d);
            let y_pt: Vec<f64> = u.iter().map(|c| c * s).collect();
            let inner = stream.sub(Purpose::Replication, j as u64).child(slot as u64);
            let h = nonzero_count(model, n, cfg.inner_reps, inner, |c| add_one_cost(model, c, &y_pt))?;
            prob[slot] = h as f64 / cfg.inner_reps as f64;
            if h == 0 {
                zero += 1;
            } else {
                bias += e * wilson_se(h, cfg.inner_reps) / prob[slot].powf(1.0 - e);
            }
        }
        Ok(((prob[0] * prob[1]).powf(e), bias, zero))
    })?;
    let vals: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let factor = n_min as f64 * model.y().volume() / (v1 * v2).sqrt();
    let zero_cells = rows.iter().map(|r| r.2).sum();
    Ok(BoundEstimate {
        value: factor * mean(&vals),
        standard_error: factor * std_error(&vals),
        samples_used: cfg.outer_samples * cfg.inner_reps * 2,
        bias_bound: factor * mean(&rows.iter().map(|r| r.1).collect::<Vec<_>>()),
        zero_cells,
        zero_cell_upper: if zero_cells > 0 { wilson_upper(0, cfg.inner_reps, 1.96) } else { 0.0 },
    })
}

/// `Λ(H_{n1}, H_{n2}, H_{n3}, H_{n4})`, the square root of
/// `∏ Var(H_{ni})^{-1/2} ∫ ψ_x(H_{n1}, β₁) ψ_x(H_{n2}, β₁) dx`.
pub fn estimate_lambda(
    model: &ScoreModel,
    ns: [u64; 4],
    cfg: &BoundConfig,
    var: &dyn VarianceSource,
    stream: RngStream,
) -> Result<BoundEstimate> {
    cfg.validate()?;
    cfg.require_inner()?;
    require_star_shaped(model.y())?;
    let mut norm = 1.0;
    for &n in &ns {
        norm *= positive_variance(var, n)?.sqrt();
    }
    if model.is_linear() {
        return Ok(BoundEstimate::exact(0.0));
    }
    let n_min = ns[0].min(ns[1]);
    let d = model.dim();
    let b1 = cfg.beta1();
    let vals: Vec<f64> = (0..cfg.outer_samples)
        .map(|j| -> Result<f64> {
            let u = outer_point(model, stream.sub(Purpose::Quadrature, j as u64));
            let mut prod = 1.0;
            for (slot, &n) in ns[..2].iter().enumerate() {
                let s = scale_factor(n, d) / scale_factor(n_min, d);
                let y_pt: Vec<f64> = u.iter().map(|c| c * s).collect();
                let inner = stream.sub(Purpose::Bound, j as u64).child(slot as u64);
                prod *= estimate_psi(model, n, &y_pt, b1, cfg, inner)?.value;
            }
            Ok(prod)
        })
        .collect::<Result<_>>()?;
    let factor = n_min as f64 * model.y().volume() / norm;
    let sq = factor * mean(&vals);
    let se_sq = factor * std_error(&vals);
    Ok(BoundEstimate {
        value: sq.sqrt(),
        standard_error: if sq > 0.0 { se_sq / (2.0 * sq.sqrt()) } else { 0.0 },
        samples_used: cfg.outer_samples * cfg.outer_samples * cfg.inner_reps * 2,
        bias_bound: 0.0,
        zero_cells: 0,
        zero_cell_upper: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y2() -> Region {
        Region::centered_unit_cube(2)
    }

    fn small_cfg() -> BoundConfig {
        BoundConfig { outer_samples: 40, inner_reps: 30, ..BoundConfig::default() }
    }

    #[test]
    fn ikn_whole_region_is_exact() {
        let y = y2().scaled(2.0);
        let est = compute_ikn(&y, &DistanceTarget::WholeRegion(y.clone()), 37, &BoundConfig::default(), 1000, RngStream::new(1, 1)).unwrap();
        assert_eq!(est.value, 37.0 * 4.0);
        assert_eq!(est.standard_error, 0.0);
    }

    #[test]
    fn ikn_small_n_bounded_by_volume() {
        let k = DistanceTarget::Boundary(Region::ball(vec![0.0, 0.0], 0.25).unwrap());
        let est = compute_ikn(&y2(), &k, 1, &BoundConfig::default(), 5000, RngStream::new(1, 2)).unwrap();
        assert!(est.value <= 1.0);
        assert!(compute_ikn(&y2(), &k, 1, &BoundConfig::default(), 10, RngStream::new(1, 2)).is_err());
    }

    #[test]
    fn count_closed_forms() {
        let m = ScoreModel::count(y2());
        let cfg = small_cfg();
        let var = |n: u64| Ok(n as f64);
        let g = estimate_gamma2(&m, 64, &cfg, &var, RngStream::new(3, 0)).unwrap();
        assert!((g.value - 1.0 / 8.0).abs() < 1e-12);
        let g4 = estimate_gamma2(&m, 256, &cfg, &var, RngStream::new(3, 0)).unwrap();
        assert!((g4.value / g.value - 0.5).abs() < 1e-12);
        assert_eq!(estimate_gamma1(&m, 64, &cfg, &var, RngStream::new(3, 0)).unwrap().value, 0.0);
        assert_eq!(estimate_psi(&m, 64, &[0.0, 0.0], 0.2, &cfg, RngStream::new(3, 0)).unwrap().value, 0.0);
        let t = estimate_theta(&m, 16, 64, &cfg, &var, RngStream::new(3, 1)).unwrap();
        assert!((t.value - 0.5).abs() < 1e-12);
        let t = estimate_theta(&m, 50, 50, &cfg, &var, RngStream::new(3, 1)).unwrap();
        assert!((t.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn psi_monotone_in_beta() {
        let m = ScoreModel::clique(y2(), 2, 1.0).unwrap();
        let cfg = small_cfg();
        let s = RngStream::new(5, 5);
        let lo = estimate_psi(&m, 10, &[0.0, 0.0], 0.1, &cfg, s).unwrap();
        let hi = estimate_psi(&m, 10, &[0.0, 0.0], 0.3, &cfg, s).unwrap();
        assert!(hi.value <= lo.value);
        assert!(lo.value >= 0.0);
    }

    #[test]
    fn inner_reps_floor() {
        let m = ScoreModel::clique(y2(), 1, 1.0).unwrap();
        let cfg = BoundConfig { inner_reps: 10, ..small_cfg() };
        assert!(matches!(estimate_psi(&m, 10, &[0.0, 0.0], 0.1, &cfg, RngStream::new(1, 1)), Err(Error::Precision(_))));
    }

    #[test]
    fn missing_variance_propagates() {
        let m = ScoreModel::count(y2());
        let var = |_: u64| -> Result<f64> { Err(Error::Dependency("no calibration".into())) };
        assert!(matches!(
            estimate_gamma2(&m, 10, &small_cfg(), &var, RngStream::new(1, 1)),
            Err(Error::Dependency(_))
        ));
    }
}
