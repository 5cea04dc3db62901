//! One function per subcommand. Each writes `resolved_config.txt` and its
//! artifacts into the output directory.

use std::path::PathBuf;

use asclt::asclt::{
    asclt_rows, calibrate, il_diagnostic, log_average_measure, log_grid, run_trajectory, standardize, CalibrationTable,
    Schedule, Trajectory,
};
use asclt::bounds::{compute_ikn, estimate_gamma1, estimate_gamma2, estimate_theta, BoundEstimate};
use asclt::domain::{distance_to_target, sample_master, sample_scaled, scale_factor, Region};
use asclt::functionals::{ModelKind, ScoreModel};
use asclt::malliavin::{fit_decay, nonzero_score_prob, sample_extra_points, stabilization_radius_proxy};
use asclt::persist::{
    fmt_real, read_calibration_json, write_asclt_csv, write_bounds_csv, write_calibration_json, write_csv, write_il_csv,
    write_master, write_trajectory_csv, ArtifactHeader, BoundRecord, MasterSidecar,
};
use asclt::rng::{Purpose, RngStream};
use rand::Rng;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

pub const CALIBRATION_FILE: &str = "calibration.json";
pub const RESOLVED_CONFIG_FILE: &str = "resolved_config.txt";

pub fn trajectory_file(seed: u64) -> String {
    format!("trajectory_seed{seed}.csv")
}

/// A configuration together with the derived model, hash and output directory.
pub struct Run {
    pub cfg: ExperimentConfig,
    pub model: ScoreModel,
    pub hash: String,
}

impl Run {
    pub fn new(cfg: ExperimentConfig) -> CliResult<Self> {
        let model = cfg.score_model()?;
        let hash = cfg.config_hash();
        std::fs::create_dir_all(&cfg.out)
            .map_err(|e| CliError::Core(asclt::Error::Io(format!("{}: {e}", cfg.out.display()))))?;
        let run = Run { cfg, model, hash };
        let text = format!("# config_hash={}\n{}", run.hash, run.cfg.to_text());
        std::fs::write(run.path(RESOLVED_CONFIG_FILE), text)
            .map_err(|e| CliError::Core(asclt::Error::Io(e.to_string())))?;
        Ok(run)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.cfg.out.join(name)
    }

    pub fn header(&self, seed: u64) -> ArtifactHeader {
        ArtifactHeader::new(self.hash.clone(), seed)
    }

    fn first_seed(&self) -> u64 {
        self.cfg.seeds[0]
    }

    /// The calibration table of this configuration; a missing file or one produced
    /// for another model is a dependency error.
    pub fn calibration(&self) -> CliResult<CalibrationTable> {
        let (header, table) = read_calibration_json(&self.path(CALIBRATION_FILE))?;
        if table.model_id != self.model.to_string() {
            return Err(CliError::Core(asclt::Error::Dependency(format!(
                "calibration is for `{}`, not `{}`",
                table.model_id, self.model
            ))));
        }
        if header.config_hash != self.hash {
            return Err(CliError::Mismatch("calibration.json was produced by a different configuration".into()));
        }
        Ok(table)
    }
}

pub fn run_calibrate(run: &Run) -> CliResult<()> {
    let seed = run.first_seed();
    let table = calibrate(&run.model, &run.cfg.k_grid, run.cfg.reps, RngStream::tagged(seed, Purpose::Calibration, 0))?;
    write_calibration_json(&run.path(CALIBRATION_FILE), &run.header(seed), &table)?;
    println!("calibrated {} on {} grid points: tau_hat = {:.4}", run.model, table.entries.len(), table.fit.tau_hat);
    Ok(())
}

fn trajectory_for(run: &Run, seed: u64) -> CliResult<Trajectory> {
    let traj = run_trajectory(&run.model, run.cfg.n_max, run.cfg.schedule, seed)?;
    if run.cfg.dump_master {
        let master = sample_master(run.model.y(), run.cfg.n_max, seed)?;
        let side = MasterSidecar {
            seed,
            intensity: 1.0,
            window: master.window().clone(),
            n_max: run.cfg.n_max,
            model_id: run.model.to_string(),
            schedule: run.cfg.schedule,
        };
        write_master(&run.path(&format!("master_seed{seed}.csv")), &run.header(seed), &master, &side)?;
    }
    Ok(traj)
}

/// Raw trajectories, standardized when a matching calibration is present.
pub fn run_trajectory_cmd(run: &Run) -> CliResult<()> {
    let table = match run.calibration() {
        Ok(t) => Some(t),
        Err(CliError::Core(asclt::Error::Dependency(_))) => None,
        Err(e) => return Err(e),
    };
    for &seed in &run.cfg.seeds {
        let mut traj = trajectory_for(run, seed)?;
        if let Some(t) = &table {
            traj = standardize(&traj, t)?;
        }
        write_trajectory_csv(&run.path(&trajectory_file(seed)), &run.header(seed), &traj)?;
    }
    println!(
        "wrote {} trajectories ({})",
        run.cfg.seeds.len(),
        if table.is_some() { "standardized" } else { "raw; no calibration" }
    );
    Ok(())
}

pub fn run_asclt(run: &Run) -> CliResult<()> {
    let table = run.calibration()?;
    let n_max = run.cfg.n_max;
    if n_max < 2 {
        return Err(CliError::Config("asclt needs n_max ≥ 2".into()));
    }
    let mut grid = log_grid(2, n_max, run.cfg.report_points);
    if let Schedule::Strided { base, .. } = run.cfg.schedule {
        grid.retain(|&n| n >= base);
    }
    let mut rows = Vec::new();
    for &seed in &run.cfg.seeds {
        let traj = standardize(&trajectory_for(run, seed)?, &table)?;
        write_trajectory_csv(&run.path(&trajectory_file(seed)), &run.header(seed), &traj)?;
        let m = log_average_measure(&traj, n_max)?;
        let bracket = if run.cfg.schedule.is_complete() {
            if harmonic_bracket_holds(m.total_weight, n_max) { "ok" } else { "VIOLATED" }
        } else {
            "n/a (strided)"
        };
        let seed_rows = asclt_rows(&traj, &grid)?;
        let last = seed_rows.last().expect("grid ends at n_max");
        println!(
            "seed {seed}: KS at n={n_max} = {:.4}, W_n/ln n = {:.4}, harmonic bracket {bracket}",
            last.ks, last.unnormalized_mass
        );
        rows.extend(seed_rows.into_iter().map(|r| (seed, r)));
    }
    write_asclt_csv(&run.path("asclt.csv"), &run.header(run.first_seed()), &rows)?;
    if run.cfg.il_trajectories > 0 {
        let il_grid = log_grid(10.min(n_max), n_max, run.cfg.il_points);
        let il = il_diagnostic(&run.model, &table, &il_grid, &run.cfg.t_grid, run.cfg.il_trajectories, run.first_seed())?;
        write_il_csv(&run.path("il.csv"), &run.header(run.first_seed()), &il)?;
        println!("wrote il.csv ({} rows)", il.len());
    }
    Ok(())
}

/// `ln n < W_n ≤ ln n + 1` for the complete harmonic sum.
pub fn harmonic_bracket_holds(total_weight: f64, n: u64) -> bool {
    let ln = (n as f64).ln();
    total_weight > ln && total_weight <= ln + 1.0
}

/// Point of `∂A` on the ray from the centroid of `A` along the first axis.
fn boundary_anchor(a: &Region) -> Vec<f64> {
    let c = a.centroid();
    let (mut lo, mut hi) = (0.0, a.diameter_bound());
    let at = |t: f64| {
        let mut p = c.clone();
        p[0] += t;
        p
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if a.contains(&at(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(hi)
}

/// Decay of `P(ξ_n(x) ≠ 0)` with the distance of `x` to `K`, decay fits, and
/// stabilization-radius proxies.
pub fn run_diagnose(run: &Run) -> CliResult<()> {
    let seed = run.first_seed();
    let cfg = &run.cfg;
    let d = run.model.dim();
    let anchor = match run.model.kind() {
        ModelKind::VoronoiVolume { a, .. } => boundary_anchor(a),
        _ => run.model.y().centroid(),
    };
    let mut decay_rows = Vec::new();
    let mut fit_rows = Vec::new();
    for &n in &cfg.diagnose_n {
        let unit = scale_factor(n, d);
        let mut dist = Vec::new();
        let mut probs = Vec::new();
        for j in 0..cfg.diagnose_points {
            let mut x = anchor.clone();
            x[0] += cfg.diagnose_step * unit * j as f64;
            if !run.model.y().contains(&x) {
                break;
            }
            let stream = RngStream::tagged(seed, Purpose::Diagnostic, n).child(j as u64);
            let e = nonzero_score_prob(&run.model, n, &x, &[], cfg.diagnose_reps, stream)?;
            let k_dist = distance_to_target(&x, run.model.target())?;
            decay_rows.push(vec![n.to_string(), fmt_real(k_dist), fmt_real(e.p), fmt_real(e.standard_error)]);
            dist.push(k_dist);
            probs.push(e.p);
        }
        let positive: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 0.0).collect();
        let ds: Vec<f64> = positive.iter().map(|&i| dist[i]).collect();
        let ps: Vec<f64> = positive.iter().map(|&i| probs[i]).collect();
        fit_rows.push(match fit_decay(&ds, &ps, n, d) {
            Ok(f) => vec![
                n.to_string(),
                "ok".into(),
                fmt_real(f.alpha),
                fmt_real(f.amplitude),
                fmt_real(f.rate),
                fmt_real(f.residual),
                fmt_real(f.flat_residual),
            ],
            Err(e) => {
                let mut row = vec![n.to_string(), e.to_string()];
                row.extend(std::iter::repeat_n(String::new(), 5));
                row
            }
        });
    }
    let header = run.header(seed);
    write_csv(&run.path("decay.csv"), &header, &["n", "distance", "p", "se"], decay_rows)?;
    write_csv(
        &run.path("decay_fit.csv"),
        &header,
        &["n", "status", "alpha", "amplitude", "rate", "residual", "flat_residual"],
        fit_rows,
    )?;

    let mut stab_rows = Vec::new();
    let factors = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0];
    for &n in &cfg.diagnose_n {
        let unit = scale_factor(n, d);
        let grid: Vec<f64> = factors.iter().map(|f| f * unit).collect();
        let mut trial = 0u64;
        let mut attempt = 0u64;
        while trial < cfg.stabilization_trials as u64 {
            let base = RngStream::tagged(seed, Purpose::Extra, n).child(attempt);
            attempt += 1;
            let config = sample_scaled(run.model.y(), n, base.sub(Purpose::Replication, 0))?;
            if config.len() < 2 {
                continue;
            }
            let extra = sample_extra_points(run.model.y(), base.sub(Purpose::Extra, 0));
            let i = base.sub(Purpose::Diagnostic, 0).rng().random_range(0..config.len());
            let proxy = stabilization_radius_proxy(&run.model, &config, i, &grid, &extra)?;
            stab_rows.push(vec![n.to_string(), trial.to_string(), fmt_real(proxy.radius), proxy.stable.to_string()]);
            trial += 1;
        }
    }
    write_csv(&run.path("stabilization.csv"), &header, &["n", "trial", "radius", "stable"], stab_rows)?;
    println!("wrote decay.csv, decay_fit.csv and stabilization.csv");
    Ok(())
}

pub fn run_bounds(run: &Run) -> CliResult<()> {
    let table = run.calibration()?;
    let seed = run.first_seed();
    let cfg = &run.cfg;
    let b = &cfg.bounds;
    let model_id = run.model.to_string();
    let mut records = Vec::new();
    let mut push = |quantity: &str, n: String, estimate: BoundEstimate, inner: usize| {
        records.push(BoundRecord { quantity: quantity.into(), model_id: model_id.clone(), n, estimate, inner_reps: inner });
    };
    for (i, &n) in cfg.bounds_n.iter().enumerate() {
        let stream = |tag: u64| RngStream::tagged(seed, Purpose::Bound, tag * 1_000_003 + n);
        push("I_Kn", n.to_string(), compute_ikn(run.model.y(), run.model.target(), n, b, cfg.quad_points, stream(1))?, 0);
        push("Gamma2", n.to_string(), estimate_gamma2(&run.model, n, b, &table, stream(2))?, b.inner_reps);
        if cfg.gamma1 {
            push("Gamma1", n.to_string(), estimate_gamma1(&run.model, n, b, &table, stream(3))?, b.inner_reps);
        }
        if let Some(&n2) = cfg.bounds_n.get(i + 1) {
            let t = estimate_theta(&run.model, n, n2, b, &table, stream(4).child(n2))?;
            push("Theta", format!("{n}:{n2}"), t, b.inner_reps);
        }
    }
    write_bounds_csv(&run.path("bounds.csv"), &run.header(seed), &records)?;
    for r in &records {
        println!("{:<7} n={:<10} {:.6e} ± {:.2e}", r.quantity, r.n, r.estimate.value, r.estimate.standard_error);
    }
    Ok(())
}
