//! Flat `key = value` experiment configuration.
//!
//! Every key has a typed literal; unknown keys are rejected. [`ExperimentConfig::to_text`]
//! prints every effective parameter, and parsing that text gives back the same
//! configuration.

use std::path::PathBuf;

use sha2::{Digest, Sha256};

use asclt::asclt::Schedule;
use asclt::bounds::BoundConfig;
use asclt::domain::Region;
use asclt::functionals::{ModelKind, ScoreModel};

use crate::literal::{
    format_list, parse_bool, parse_int, parse_list, parse_model, parse_real, parse_region, parse_schedule, ParseResult,
};

/// Default output root when neither the config, `--out` nor this variable is set.
pub const OUT_ENV: &str = "ASCLT_OUT";

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub region: Region,
    pub n_max: u64,
    pub schedule: Schedule,
    pub seeds: Vec<u64>,
    pub reps: usize,
    pub k_grid: Vec<u64>,
    pub bounds: BoundConfig,
    pub out: PathBuf,
    /// Number of log-spaced `n` reported per trajectory in `asclt.csv`.
    pub report_points: usize,
    /// Trajectories for the Ibragimov–Lifshits table; 0 skips it.
    pub il_trajectories: usize,
    pub il_points: usize,
    pub t_grid: Vec<f64>,
    pub diagnose_n: Vec<u64>,
    pub diagnose_reps: usize,
    pub diagnose_points: usize,
    /// Spacing of the decay distances in units of `n^{-1/d}`.
    pub diagnose_step: f64,
    pub stabilization_trials: usize,
    pub bounds_n: Vec<u64>,
    pub quad_points: usize,
    pub gamma1: bool,
    pub dump_master: bool,
}

const KEYS: &[&str] = &[
    "model",
    "region",
    "n_max",
    "schedule",
    "seeds",
    "reps",
    "k_grid",
    "p_dprime",
    "c_pprime",
    "alpha",
    "p",
    "q",
    "outer_samples",
    "inner_reps",
    "out",
    "report_points",
    "il_trajectories",
    "il_points",
    "t_grid",
    "diagnose_n",
    "diagnose_reps",
    "diagnose_points",
    "diagnose_step",
    "stabilization_trials",
    "bounds_n",
    "quad_points",
    "gamma1",
    "dump_master",
];

/// Keys that select where and with which randomness a run happens rather than what
/// it computes; they are recorded in artifact headers but left out of the hash.
const UNHASHED: &[&str] = &["seeds", "out"];

/// Raw assignments in file order, last one wins.
#[derive(Debug, Clone, Default)]
pub struct Assignments(Vec<(String, String)>);

impl Assignments {
    pub fn parse(text: &str) -> ParseResult<Self> {
        let mut a = Assignments::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            a.push_line(line).map_err(|e| format!("line {}: {e}", lineno + 1))?;
        }
        Ok(a)
    }

    /// One `key = value` (or `key=value`) assignment.
    pub fn push_line(&mut self, line: &str) -> ParseResult<()> {
        let (k, v) = line.split_once('=').ok_or_else(|| format!("expected `key = value`, got `{line}`"))?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(format!("unknown key `{k}`"));
        }
        self.0.push((k.to_string(), v.trim().to_string()));
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

fn field<T>(a: &Assignments, key: &str, default: T, parse: impl Fn(&str) -> ParseResult<T>) -> ParseResult<T> {
    match a.get(key) {
        Some(v) => parse(v).map_err(|e| format!("{key}: {e}")),
        None => Ok(default),
    }
}

impl ExperimentConfig {
    /// Resolves assignments against the defaults. `model` is required.
    pub fn resolve(a: &Assignments) -> ParseResult<Self> {
        let model = parse_model(a.get("model").ok_or("missing required key `model`")?).map_err(|e| format!("model: {e}"))?;
        let default_region = || -> Region {
            let d = match &model {
                ModelKind::VoronoiVolume { a, .. } => a.dim(),
                _ => 2,
            };
            Region::centered_unit_cube(d)
        };
        let region = field(a, "region", default_region(), parse_region)?;
        let p_dprime = field(a, "p_dprime", 0.5, parse_real)?;
        let alpha = field(a, "alpha", 1.0, parse_real)?;
        let bounds = BoundConfig {
            p_dprime,
            c_pprime: field(a, "c_pprime", BoundConfig::unit_decay_c(p_dprime, alpha), parse_real)?,
            alpha,
            p: field(a, "p", p_dprime, parse_real)?,
            q: field(a, "q", p_dprime, parse_real)?,
            outer_samples: field(a, "outer_samples", 200, parse_int)?,
            inner_reps: field(a, "inner_reps", 100, parse_int)?,
        };
        let n_max = field(a, "n_max", 2000, parse_int)?;
        let default_out = std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("asclt-out"));
        let cfg = ExperimentConfig {
            model,
            region,
            n_max,
            schedule: field(a, "schedule", Schedule::Complete, parse_schedule)?,
            seeds: field(a, "seeds", vec![1], |s| parse_list(s, parse_int))?,
            reps: field(a, "reps", 500, parse_int)?,
            k_grid: field(a, "k_grid", vec![125, 250, 500, 1000, 2000], |s| parse_list(s, parse_int))?,
            bounds,
            out: field(a, "out", default_out, |s| Ok(PathBuf::from(s)))?,
            report_points: field(a, "report_points", 20, parse_int)?,
            il_trajectories: field(a, "il_trajectories", 0, parse_int)?,
            il_points: field(a, "il_points", 5, parse_int)?,
            t_grid: field(a, "t_grid", vec![0.5, 1.0, 2.0], |s| parse_list(s, parse_real))?,
            diagnose_n: field(a, "diagnose_n", vec![1000], |s| parse_list(s, parse_int))?,
            diagnose_reps: field(a, "diagnose_reps", 400, parse_int)?,
            diagnose_points: field(a, "diagnose_points", 10, parse_int)?,
            diagnose_step: field(a, "diagnose_step", 0.15, parse_real)?,
            stabilization_trials: field(a, "stabilization_trials", 100, parse_int)?,
            bounds_n: field(a, "bounds_n", vec![100, 1000], |s| parse_list(s, parse_int))?,
            quad_points: field(a, "quad_points", 100_000, parse_int)?,
            gamma1: field(a, "gamma1", false, parse_bool)?,
            dump_master: field(a, "dump_master", false, parse_bool)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> ParseResult<Self> {
        Self::resolve(&Assignments::parse(text)?)
    }

    fn validate(&self) -> ParseResult<()> {
        if self.seeds.is_empty() {
            return Err("seeds: at least one seed is required".into());
        }
        if self.n_max == 0 {
            return Err("n_max must be positive".into());
        }
        if self.report_points < 2 || self.il_points < 2 {
            return Err("report_points and il_points must be at least 2".into());
        }
        self.bounds.validate().map_err(|e| e.to_string())?;
        self.score_model().map(|_| ()).map_err(|e| e.to_string())
    }

    /// The region with its origin anchor applied, so that it contains the origin.
    pub fn anchored_region(&self) -> Region {
        match self.region.origin_anchor() {
            Some(shift) => self.region.translated(&shift),
            None => self.region.clone(),
        }
    }

    /// The model on the anchored region; a Voronoi target set moves with the region.
    pub fn score_model(&self) -> asclt::Result<ScoreModel> {
        let shift = self.region.origin_anchor();
        let y = self.anchored_region();
        match &self.model {
            ModelKind::Count => Ok(ScoreModel::count(y)),
            ModelKind::KnnEdgeLength { k, m } => ScoreModel::knn(y, *k, *m),
            ModelKind::CliqueCount { k, r } => ScoreModel::clique(y, *k, *r),
            ModelKind::VoronoiVolume { a, method } => {
                let a = match &shift {
                    Some(s) => a.translated(s),
                    None => a.clone(),
                };
                ScoreModel::voronoi(y, a, *method)
            }
        }
    }

    fn lines(&self) -> Vec<(&'static str, String)> {
        let b = &self.bounds;
        vec![
            ("model", self.model.to_string()),
            ("region", self.region.to_string()),
            ("n_max", self.n_max.to_string()),
            ("schedule", self.schedule.to_string()),
            ("seeds", format_list(&self.seeds)),
            ("reps", self.reps.to_string()),
            ("k_grid", format_list(&self.k_grid)),
            ("p_dprime", b.p_dprime.to_string()),
            ("c_pprime", b.c_pprime.to_string()),
            ("alpha", b.alpha.to_string()),
            ("p", b.p.to_string()),
            ("q", b.q.to_string()),
            ("outer_samples", b.outer_samples.to_string()),
            ("inner_reps", b.inner_reps.to_string()),
            ("out", self.out.display().to_string()),
            ("report_points", self.report_points.to_string()),
            ("il_trajectories", self.il_trajectories.to_string()),
            ("il_points", self.il_points.to_string()),
            ("t_grid", format_list(&self.t_grid)),
            ("diagnose_n", format_list(&self.diagnose_n)),
            ("diagnose_reps", self.diagnose_reps.to_string()),
            ("diagnose_points", self.diagnose_points.to_string()),
            ("diagnose_step", self.diagnose_step.to_string()),
            ("stabilization_trials", self.stabilization_trials.to_string()),
            ("bounds_n", format_list(&self.bounds_n)),
            ("quad_points", self.quad_points.to_string()),
            ("gamma1", self.gamma1.to_string()),
            ("dump_master", self.dump_master.to_string()),
        ]
    }

    /// Every effective parameter, one `key = value` per line, in a fixed order.
    pub fn to_text(&self) -> String {
        self.lines().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// SHA-256 of the resolved configuration without the seed list and output path.
    pub fn config_hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.lines() {
            if !UNHASHED.contains(&k) {
                h.update(format!("{k} = {v}\n").as_bytes());
            }
        }
        format!("{:x}", h.finalize())
    }
}
