use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CalibrationTable, Trajectory};
use crate::error::{Error, Result};
use crate::stats::normal_cdf;

/// `F_k = (H_k − E H_k)/Var(H_k)^{1/2}` for every point of the trajectory.
pub fn standardize(trajectory: &Trajectory, table: &CalibrationTable) -> Result<Trajectory> {
    if trajectory.model_id != table.model_id {
        return Err(Error::Precondition(format!(
            "calibration is for `{}`, trajectory for `{}`",
            table.model_id, trajectory.model_id
        )));
    }
    let mut out = trajectory.clone();
    for v in &mut out.values {
        v.f = Some(table.standardize_value(v.k, v.h)?);
    }
    Ok(out)
}

/// The logarithmic average `Σ_{k ≤ n} (1/k) ε_{F_k}` over the scheduled `k`.
///
/// Integrals are self-normalized by `W_n = Σ 1/k`; the classical
/// `(1/ln n) Σ (1/k) f(F_k)` is available through [`unnormalized`](Self::unnormalized).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogAverageMeasure {
    /// `(F_k, 1/k)`.
    pub atoms: Vec<(f64, f64)>,
    pub total_weight: f64,
    pub n: u64,
}

impl LogAverageMeasure {
    /// `Σ (1/k) f(F_k) / W_n`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|&(x, w)| w * f(x)).sum::<f64>() / self.total_weight
    }

    /// `Σ (1/k) f(F_k) / ln n`.
    pub fn unnormalized(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|&(x, w)| w * f(x)).sum::<f64>() / (self.n as f64).ln()
    }

    /// `W_n / ln n`, the mass of the unnormalized measure.
    pub fn unnormalized_mass(&self) -> f64 {
        self.total_weight / (self.n as f64).ln()
    }

    /// Self-normalized ECDF at `x`.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.integrate(|v| if v <= x { 1.0 } else { 0.0 })
    }
}

pub fn log_average_measure(trajectory: &Trajectory, n: u64) -> Result<LogAverageMeasure> {
    if n < 2 {
        return Err(Error::Precondition("the logarithmic average needs n ≥ 2".into()));
    }
    if n > trajectory.n_max {
        return Err(Error::Precondition(format!("n = {n} exceeds the trajectory's n_max")));
    }
    let atoms: Vec<(f64, f64)> =
        trajectory.standardized_upto(n)?.into_iter().map(|(k, f)| (f, 1.0 / k as f64)).collect();
    if atoms.is_empty() {
        return Err(Error::Precondition("no scheduled index up to n".into()));
    }
    let total_weight = atoms.iter().map(|a| a.1).sum();
    Ok(LogAverageMeasure { atoms, total_weight, n })
}

/// Kolmogorov distance between the self-normalized measure and `N(0, 1)`.
///
/// The supremum is attained at an atom, from the left or from the right.
pub fn ks_to_normal(measure: &LogAverageMeasure) -> f64 {
    let mut atoms = measure.atoms.clone();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut below = 0.0;
    let mut sup: f64 = 0.0;
    let mut i = 0;
    while i < atoms.len() {
        let x = atoms[i].0;
        let mut mass = 0.0;
        while i < atoms.len() && atoms[i].0 == x {
            mass += atoms[i].1;
            i += 1;
        }
        let phi = normal_cdf(x);
        let left = below / measure.total_weight;
        below += mass;
        let right = below / measure.total_weight;
        sup = sup.max((left - phi).abs()).max((right - phi).abs());
    }
    sup.min(1.0)
}

/// `Δ_n(t) = (1/ln n) Σ_{k ≤ n} (1/k)(e^{itF_k} − e^{−t²/2})`.
pub fn delta_n(trajectory: &Trajectory, n: u64, t: f64) -> Result<Complex64> {
    if !trajectory.schedule.is_complete() {
        return Err(Error::Unsupported("Δ_n needs a complete schedule".into()));
    }
    if n < 2 || n > trajectory.n_max {
        return Err(Error::Precondition(format!("n must lie in 2..={}", trajectory.n_max)));
    }
    if t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let gauss = (-t * t / 2.0).exp();
    let sum: Complex64 = trajectory
        .standardized_upto(n)?
        .into_iter()
        .map(|(k, f)| (Complex64::from_polar(1.0, t * f) - gauss) / k as f64)
        .sum();
    Ok(sum / (n as f64).ln())
}

#[cfg(test)]
mod tests {
    use super::super::{Schedule, TrajectoryPoint};
    use super::*;

    fn constant(n: u64, c: f64) -> Trajectory {
        Trajectory {
            model_id: "count".into(),
            master_seed: 0,
            n_max: n,
            schedule: Schedule::Complete,
            values: (1..=n).map(|k| TrajectoryPoint { k, h: 0.0, f: Some(c) }).collect(),
        }
    }

    #[test]
    fn two_atoms() {
        let mut t = constant(2, 0.0);
        t.values[1].f = Some(1.0);
        let m = log_average_measure(&t, 2).unwrap();
        assert_eq!(m.atoms, vec![(0.0, 1.0), (1.0, 0.5)]);
        assert_eq!(m.total_weight, 1.5);
        assert!(log_average_measure(&t, 1).is_err());
    }

    #[test]
    fn point_mass() {
        let m = log_average_measure(&constant(50, 0.7), 50).unwrap();
        assert!((m.integrate(|x| x * x) - 0.49).abs() < 1e-15);
        assert!((m.integrate(|_| 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn harmonic_bracket() {
        let t = constant(2000, 0.0);
        for n in [2u64, 3, 10, 500, 2000] {
            let m = log_average_measure(&t, n).unwrap();
            let ln = (n as f64).ln();
            assert!(m.total_weight > ln && m.total_weight <= ln + 1.0);
        }
    }

    #[test]
    fn ks_single_atom() {
        let m = log_average_measure(&constant(5, 0.0), 5).unwrap();
        assert!((ks_to_normal(&m) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn delta_basics() {
        let t = constant(100, 0.0);
        assert_eq!(delta_n(&t, 100, 0.0).unwrap(), Complex64::new(0.0, 0.0));
        let m = log_average_measure(&t, 100).unwrap();
        let d = delta_n(&t, 100, 1.3).unwrap();
        let want = m.unnormalized_mass() * (1.0 - (-1.3f64 * 1.3 / 2.0).exp());
        assert!((d.re - want).abs() < 1e-13 && d.im.abs() < 1e-15);
        let mut strided = t.clone();
        strided.schedule = Schedule::Strided { base: 1, stride: 1 };
        assert!(matches!(delta_n(&strided, 100, 1.0), Err(Error::Unsupported(_))));
    }
}
