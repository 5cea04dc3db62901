//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `ASCLT_ACCEPT_ONLY=4,7` restricts the run to the listed criteria. Criteria in
//! [`KNOWN_RED`] are reported like the others but do not fail the process; the
//! analysis of why they cannot be met at this scale lives in the project notes.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use asclt::asclt::{
    calibrate, il_diagnostic, ks_to_normal, log_average_measure, log_grid, run_trajectory, standardize,
    CalibrationTable, Schedule,
};
use asclt::bounds::{compute_ikn, estimate_cf_gamma1, estimate_cf_gamma2, lemma_cf_check, BoundConfig};
use asclt::domain::{sample_scaled, sample_uniform, DistanceTarget, PointConfiguration, Region};
use asclt::functionals::{clique_count, ScoreModel, VolumeMethod, VoronoiMeasure};
use asclt::malliavin::{
    add_one_cost, fit_decay, nonzero_score_prob, sample_extra_points, second_difference, stabilization_radius_proxy,
};
use asclt::rng::RngStream;
use asclt::spatial::{voronoi_cells, SpatialIndex};
use asclt::stats::{ks_normal, normal_cdf};

/// Criteria that are implemented faithfully but cannot be met at desk scale.
const KNOWN_RED: &[u32] = &[8, 9];

const SEED: u64 = 20_240_601;
const CALIBRATION_GRID: [u64; 5] = [125, 250, 500, 1000, 2000];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn unit_square() -> Region {
    Region::centered_unit_cube(2)
}

fn target_ball() -> Region {
    Region::ball(vec![0.0, 0.0], 0.25).unwrap()
}

fn count_model() -> ScoreModel {
    ScoreModel::count(unit_square())
}

fn clique_model() -> ScoreModel {
    ScoreModel::clique(unit_square(), 1, 1.0).unwrap()
}

fn voronoi_model() -> ScoreModel {
    ScoreModel::voronoi(unit_square(), target_ball(), VolumeMethod::Exact2D).unwrap()
}

/// Calibration tables shared by several criteria, computed on first use.
#[derive(Default)]
struct Tables {
    count: Option<CalibrationTable>,
    clique: Option<CalibrationTable>,
    voronoi: Option<CalibrationTable>,
}

impl Tables {
    fn get(&mut self, which: &str) -> &CalibrationTable {
        let (slot, model, tag) = match which {
            "count" => (&mut self.count, count_model(), 1),
            "clique" => (&mut self.clique, clique_model(), 2),
            _ => (&mut self.voronoi, voronoi_model(), 3),
        };
        slot.get_or_insert_with(|| {
            calibrate(&model, &CALIBRATION_GRID, 500, RngStream::new(SEED, tag)).expect("calibration succeeds")
        })
    }
}

// ---- criterion 1 ------------------------------------------------------------

fn linear_knn(config: &PointConfiguration, x: &[f64], k: usize, exclude_self: bool) -> Vec<usize> {
    let mut d: Vec<(f64, usize)> = (0..config.len())
        .filter(|&j| !(exclude_self && config.point(j) == x))
        .map(|j| (config.point(j).iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum(), j))
        .collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    d.into_iter().take(k).map(|p| p.1).collect()
}

fn linear_range(config: &PointConfiguration, x: &[f64], r: f64) -> Vec<usize> {
    (0..config.len())
        .filter(|&j| config.point(j).iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= r * r)
        .collect()
}

fn subset_clique_oracle(config: &PointConfiguration, k: usize, r: f64) -> u64 {
    let n = config.len();
    let close = |i: usize, j: usize| {
        config.point(i).iter().zip(config.point(j)).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= r * r
    };
    let mut count = 0;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k + 1 {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        if members.iter().enumerate().all(|(a, &i)| members[a + 1..].iter().all(|&j| close(i, j))) {
            count += 1;
        }
    }
    count
}

/// Total length of the undirected kNN graph, each edge counted once.
fn knn_edge_sum(config: &PointConfiguration, k: usize, m: f64) -> f64 {
    let mut edges = BTreeSet::new();
    for i in 0..config.len() {
        for j in linear_knn(config, config.point(i), k, true) {
            edges.insert((i.min(j), i.max(j)));
        }
    }
    edges
        .into_iter()
        .map(|(i, j)| {
            let d2: f64 = config.point(i).iter().zip(config.point(j)).map(|(a, b)| (a - b) * (a - b)).sum();
            d2.sqrt().powf(m)
        })
        .sum()
}

fn criterion_1(_: &mut Tables) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut query_mismatch = 0;
    for trial in 0..1000u64 {
        let d = 1 + (trial % 3) as usize;
        let y = Region::centered_unit_cube(d);
        let n = rng.random_range(1..=500);
        let config = PointConfiguration::new(sample_uniform(&y, n, RngStream::new(SEED, trial)), y, None, 0).unwrap();
        let index = SpatialIndex::new(&config);
        for _ in 0..4 {
            let own = rng.random_bool(0.5);
            let x: Vec<f64> = if own {
                config.point(rng.random_range(0..n)).to_vec()
            } else {
                (0..d).map(|_| rng.random_range(-0.7..0.7)).collect()
            };
            let k = rng.random_range(1..=n.min(25));
            if index.knn(&x, k, own) != linear_knn(&config, &x, k, own) {
                query_mismatch += 1;
            }
            let r = rng.random_range(0.0..0.4);
            let mut got = index.range(&x, r);
            got.sort_unstable();
            if got != linear_range(&config, &x, r) {
                query_mismatch += 1;
            }
        }
    }
    let y = unit_square();
    let mut clique_mismatch = 0;
    for trial in 0..300u64 {
        let n = rng.random_range(1..=15);
        let config =
            PointConfiguration::new(sample_uniform(&y, n, RngStream::new(SEED + 1, trial)), y.clone(), None, 0).unwrap();
        let k = rng.random_range(1..=4);
        let r = rng.random_range(0.05..0.8);
        if clique_count(&config, k, r) != subset_clique_oracle(&config, k, r) {
            clique_mismatch += 1;
        }
    }
    let mut worst_rel: f64 = 0.0;
    for trial in 0..300u64 {
        let n = rng.random_range(2..=200);
        let k = rng.random_range(1..=4);
        let m = [1.0, 2.0, 0.5][trial as usize % 3];
        let config =
            PointConfiguration::new(sample_uniform(&y, n, RngStream::new(SEED + 2, trial)), y.clone(), Some(1), 0).unwrap();
        let model = ScoreModel::knn(y.clone(), k, m).unwrap();
        let got = model.evaluate(&config).unwrap().raw;
        let want = knn_edge_sum(&config, k, m);
        worst_rel = worst_rel.max((got - want).abs() / want.abs().max(f64::MIN_POSITIVE));
    }
    Outcome::new(
        query_mismatch == 0 && clique_mismatch == 0 && worst_rel <= 1e-9,
        format!("query mismatches {query_mismatch}, clique mismatches {clique_mismatch}, kNN max rel err {worst_rel:.2e}"),
    )
}

// ---- criterion 2 ------------------------------------------------------------

/// Per-cell comparison of the exact and Monte-Carlo Voronoi scores (the parts of each
/// cell on the other side of `∂A`). Cells that do not cross `∂A` must agree exactly;
/// for the others the root-mean-square of the MC z-scores must stay within 3.
fn criterion_2(_: &mut Tables) -> Outcome {
    let y = unit_square();
    let a = target_ball();
    let quadrature_count = 20_000;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut worst_partition: f64 = 0.0;
    let mut worst_rms: f64 = 0.0;
    let mut worst_union_z: f64 = 0.0;
    let mut zero_mismatch = 0;
    for trial in 0..100u64 {
        let n = rng.random_range(5..=300);
        let config =
            PointConfiguration::new(sample_uniform(&y, n, RngStream::new(SEED + 3, trial)), y.clone(), Some(n as u64), trial)
                .unwrap();
        let total: f64 = voronoi_cells(&config, &y).unwrap().iter().map(|c| c.area()).sum();
        worst_partition = worst_partition.max((total - 1.0).abs());
        let exact = VoronoiMeasure::compute(&config, &a, VolumeMethod::Exact2D).unwrap();
        let mc = VoronoiMeasure::compute(&config, &a, VolumeMethod::MonteCarlo { quadrature_count }).unwrap();
        let binomial_se = |q: f64| (q * (1.0 - q) / quadrature_count as f64).sqrt();
        let mut z2 = Vec::new();
        for (e, m) in exact.scores.iter().zip(&mc.scores) {
            if *e == 0.0 {
                zero_mismatch += (*m != 0.0) as usize;
            } else {
                z2.push(((m - e) / binomial_se(e.abs())).powi(2));
            }
        }
        if !z2.is_empty() {
            worst_rms = worst_rms.max((z2.iter().sum::<f64>() / z2.len() as f64).sqrt());
        }
        let p = exact.approx_volume;
        if p > 0.0 && p < 1.0 {
            worst_union_z = worst_union_z.max((mc.approx_volume - p).abs() / binomial_se(p));
        }
    }
    Outcome::new(
        worst_partition <= 1e-9 && worst_rms <= 3.0 && zero_mismatch == 0,
        format!(
            "partition max rel err {worst_partition:.2e}, per-config RMS z max {worst_rms:.2}, \
             non-crossing mismatches {zero_mismatch}, union-area max |z| {worst_union_z:.2} (informational)"
        ),
    )
}

// ---- criterion 3 ------------------------------------------------------------

fn criterion_3(_: &mut Tables) -> Outcome {
    let y = unit_square();
    let models = [
        count_model(),
        ScoreModel::knn(y.clone(), 2, 1.0).unwrap(),
        ScoreModel::clique(y.clone(), 2, 1.0).unwrap(),
        voronoi_model(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut failures = Vec::new();
    for (mi, model) in models.iter().enumerate() {
        let mut asym = 0;
        let mut count_violations = 0;
        let mut negative_clique = 0;
        let mut outside_nonzero = 0;
        for case in 0..1000u64 {
            let n = rng.random_range(5..=60);
            let config = sample_scaled(&y, n, RngStream::new(SEED + 10 + mi as u64, case)).unwrap();
            let y1: Vec<f64> = (0..2).map(|_| rng.random_range(-0.5..0.5)).collect();
            let y2: Vec<f64> = (0..2).map(|_| rng.random_range(-0.5..0.5)).collect();
            let d12 = second_difference(model, &config, &y1, &y2).unwrap();
            let d21 = second_difference(model, &config, &y2, &y1).unwrap();
            if d12.to_bits() != d21.to_bits() {
                asym += 1;
            }
            let d1 = add_one_cost(model, &config, &y1).unwrap();
            if mi == 0 && (d1 != 1.0 || d12 != 0.0) {
                count_violations += 1;
            }
            if mi == 2 && d1 < 0.0 {
                negative_clique += 1;
            }
            // a point of [-1, 1]² outside Y
            let out: Vec<f64> = loop {
                let p: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
                if !y.contains(&p) {
                    break p;
                }
            };
            if add_one_cost(model, &config, &out).unwrap() != 0.0
                || second_difference(model, &config, &out, &y1).unwrap() != 0.0
            {
                outside_nonzero += 1;
            }
        }
        if asym + count_violations + negative_clique + outside_nonzero > 0 {
            failures.push(format!(
                "{model}: asym {asym}, count {count_violations}, clique D<0 {negative_clique}, outside {outside_nonzero}"
            ));
        }
    }
    if failures.is_empty() {
        Outcome::new(true, "4 models x 1000 cases, no violations")
    } else {
        Outcome::new(false, failures.join("; "))
    }
}

// ---- criterion 4 ------------------------------------------------------------

fn criterion_4(tables: &mut Tables) -> Outcome {
    let checks = [("count", 0.9, 1.1), ("clique", 0.8, 1.2), ("voronoi", 0.3, 0.7)];
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, lo, hi) in checks {
        let tau = tables.get(name).fit.tau_hat;
        let ok = (lo..=hi).contains(&tau);
        pass &= ok;
        detail.push(format!("{name} tau_hat {tau:.3} in [{lo}, {hi}]: {ok}"));
    }
    Outcome::new(pass, detail.join(", "))
}

// ---- criterion 5 ------------------------------------------------------------

/// Midpoint rule on a `m × m` grid of `Y` for the boundary-of-ball target, an
/// independent check of the Monte-Carlo quadrature.
fn ikn_grid_oracle(n: u64, m: usize) -> f64 {
    let s = (n as f64).sqrt();
    let h = 1.0 / m as f64;
    let mut acc = 0.0;
    for i in 0..m {
        let x = -0.5 + (i as f64 + 0.5) * h;
        for j in 0..m {
            let z = -0.5 + (j as f64 + 0.5) * h;
            acc += (-s * ((x * x + z * z).sqrt() - 0.25).abs()).exp();
        }
    }
    n as f64 * acc * h * h
}

fn criterion_5(_: &mut Tables) -> Outcome {
    let cfg = BoundConfig::default();
    let y = unit_square();
    let whole = DistanceTarget::WholeRegion(y.clone());
    let exact_ok = [1u64, 100, 10_000, 123_457].iter().all(|&n| {
        compute_ikn(&y, &whole, n, &cfg, 1000, RngStream::new(SEED, n)).unwrap().value == n as f64 * y.volume()
    });
    let boundary = DistanceTarget::Boundary(target_ball());
    let mut ratios = Vec::new();
    let mut oracle_ok = true;
    let mut detail = Vec::new();
    for n in [100u64, 1000, 10_000] {
        let est = compute_ikn(&y, &boundary, n, &cfg, 100_000, RngStream::new(SEED + 5, n)).unwrap();
        let oracle = ikn_grid_oracle(n, 1000);
        let agree = (est.value - oracle).abs() <= 4.0 * est.standard_error + 1e-3 * oracle;
        oracle_ok &= agree;
        let ratio = est.value / (n as f64).sqrt();
        ratios.push(ratio);
        detail.push(format!("n={n}: I/sqrt(n) {ratio:.4} (oracle {:.4})", oracle / (n as f64).sqrt()));
    }
    let spread = ratios.iter().cloned().fold(0.0, f64::max) / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    Outcome::new(
        exact_ok && oracle_ok && spread <= 1.5,
        format!("whole-region identity {exact_ok}; {}; spread {spread:.3}", detail.join(", ")),
    )
}

// ---- criterion 6 ------------------------------------------------------------

fn criterion_6(_: &mut Tables) -> Outcome {
    let model = voronoi_model();
    let mut pass = true;
    let mut detail = Vec::new();
    for n in [1000u64, 10_000] {
        let unit = 1.0 / (n as f64).sqrt();
        let distances: Vec<f64> = (0..10).map(|j| 0.15 * unit * j as f64).collect();
        let mut probs = Vec::new();
        let mut ses = Vec::new();
        for (j, &dist) in distances.iter().enumerate() {
            // outside A along the first axis
            let x = [0.25 + dist, 0.0];
            let e = nonzero_score_prob(&model, n, &x, &[], 400, RngStream::new(SEED + 6, n * 100 + j as u64)).unwrap();
            probs.push(e.p);
            ses.push(e.standard_error);
        }
        let monotone = (1..probs.len()).all(|j| probs[j] <= probs[j - 1] + 3.0 * (ses[j].powi(2) + ses[j - 1].powi(2)).sqrt());
        let fit = fit_decay(&distances, &probs, n, 2);
        let fit_ok = match &fit {
            Ok(f) => f.flat_residual >= 5.0 * f.residual,
            Err(_) => false,
        };
        pass &= monotone && fit_ok;
        let probs_s: Vec<String> = probs.iter().map(|p| format!("{p:.3}")).collect();
        detail.push(match fit {
            Ok(f) => format!(
                "n={n}: p=[{}] monotone {monotone}, alpha {} residual {:.3} flat {:.3}",
                probs_s.join(" "),
                f.alpha,
                f.residual,
                f.flat_residual
            ),
            Err(e) => format!("n={n}: p=[{}] monotone {monotone}, fit error {e}", probs_s.join(" ")),
        });
    }
    let y = unit_square();
    let clique = ScoreModel::clique(y.clone(), 2, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut violations = 0;
    let mut trials = 0;
    while trials < 100 {
        let n = rng.random_range(100..=1000u64);
        let config = sample_scaled(&y, n, RngStream::new(SEED + 7, trials as u64 + 1000 * n)).unwrap();
        if config.is_empty() {
            continue;
        }
        let rn = 1.0 / (n as f64).sqrt();
        let grid: Vec<f64> = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0].iter().map(|f| f * rn).collect();
        let extra = sample_extra_points(&y, RngStream::new(SEED + 8, trials as u64));
        let i = rng.random_range(0..config.len());
        let proxy = stabilization_radius_proxy(&clique, &config, i, &grid, &extra).unwrap();
        if !(proxy.stable && proxy.radius <= rn) {
            violations += 1;
        }
        trials += 1;
    }
    pass &= violations == 0;
    detail.push(format!("clique proxy violations {violations}/100"));
    Outcome::new(pass, detail.join("; "))
}

// ---- criterion 7 ------------------------------------------------------------

fn criterion_7(tables: &mut Tables) -> Outcome {
    let n = 500;
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, model) in [("clique", clique_model()), ("voronoi", voronoi_model())] {
        let table = tables.get(name);
        let fs: Vec<f64> = (0..500u64)
            .map(|r| {
                let c = sample_scaled(model.y(), n, RngStream::new(SEED + 70, r)).unwrap();
                table.standardize_value(n, model.evaluate(&c).unwrap().standardized).unwrap()
            })
            .collect();
        let ks = ks_normal(&fs);
        pass &= ks <= 0.10;
        detail.push(format!("{name} KS {ks:.4}"));
    }
    Outcome::new(pass, detail.join(", "))
}

// ---- criterion 8 ------------------------------------------------------------

fn criterion_8(tables: &mut Tables) -> Outcome {
    let n = 2000;
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, model) in [("count", count_model()), ("clique", clique_model())] {
        let table = tables.get(name).clone();
        let mut ks = Vec::new();
        let mut bracket_ok = true;
        for s in 0..20u64 {
            let traj = run_trajectory(&model, n, Schedule::Complete, SEED + 800 + s).unwrap();
            let traj = standardize(&traj, &table).unwrap();
            let m = log_average_measure(&traj, n).unwrap();
            let mass = m.unnormalized_mass();
            bracket_ok &= mass > 1.0 && mass <= 1.14;
            ks.push(ks_to_normal(&m));
        }
        let worst = ks.iter().cloned().fold(0.0, f64::max);
        let mut sorted = ks.clone();
        sorted.sort_by(f64::total_cmp);
        let median = 0.5 * (sorted[9] + sorted[10]);
        let ok = worst <= 0.15 && median <= 0.12 && bracket_ok;
        pass &= ok;
        detail.push(format!("{name}: max KS {worst:.3}, median {median:.3}, bracket {bracket_ok}"));
    }
    Outcome::new(pass, detail.join("; "))
}

// ---- criterion 9 ------------------------------------------------------------

fn criterion_9(tables: &mut Tables) -> Outcome {
    let model = count_model();
    let table = tables.get("count").clone();
    let grid = log_grid(100, 2000, 5);
    let ts = [0.5, 1.0, 2.0];
    let rows = il_diagnostic(&model, &table, &grid, &ts, 100, SEED + 900).unwrap();
    let at = |n: u64, t: f64| rows.iter().find(|r| r.n == n && r.t == t).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for t in ts {
        let (a, b) = (at(100, t), at(2000, t));
        let ok = b.mean_sq < a.mean_sq && b.mean_sq <= 0.1;
        pass &= ok;
        detail.push(format!(
            "t={t}: E|D_100|^2 {:.4}±{:.4} -> E|D_2000|^2 {:.4}±{:.4}, partial sum {:.4}",
            a.mean_sq, a.se, b.mean_sq, b.se, b.partial_sum
        ));
    }
    Outcome::new(pass, detail.join("; "))
}

// ---- criterion 10 -----------------------------------------------------------

fn criterion_10(_: &mut Tables) -> Outcome {
    let n = 100;
    let model = clique_model();
    let table = calibrate(&model, &[25, 50, 100, 200], 2000, RngStream::new(SEED, 10)).unwrap();
    let fs: Vec<f64> = (0..2000u64)
        .map(|r| {
            let c = sample_scaled(model.y(), n, RngStream::new(SEED + 100, r)).unwrap();
            table.standardize_value(n, model.evaluate(&c).unwrap().standardized).unwrap()
        })
        .collect();
    let cfg = BoundConfig { outer_samples: 400, inner_reps: 50, ..BoundConfig::default() };
    let g1 = estimate_cf_gamma1(&model, n, &cfg, &table, RngStream::new(SEED + 101, 0)).unwrap();
    let g2 = estimate_cf_gamma2(&model, n, &cfg, &table, RngStream::new(SEED + 102, 0)).unwrap();
    let mut pass = true;
    let mut detail = vec![format!(
        "gamma1 {:.4}±{:.4}, gamma2 {:.4}±{:.4}",
        g1.value, g1.standard_error, g2.value, g2.standard_error
    )];
    for t in [0.5, 1.0] {
        let c = lemma_cf_check(&fs, t, &g1, &g2).unwrap();
        pass &= c.passes;
        detail.push(format!("t={t}: lhs {:.4} <= rhs {:.4} + 5*{:.4}: {}", c.lhs, c.rhs, c.combined_se, c.passes));
    }
    Outcome::new(pass, detail.join("; "))
}

type Criterion = fn(&mut Tables) -> Outcome;

fn main() {
    let only: Option<BTreeSet<u32>> = std::env::var("ASCLT_ACCEPT_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let criteria: [(u32, &str, Criterion); 10] = [
        (1, "oracle equivalence", criterion_1),
        (2, "Voronoi geometry", criterion_2),
        (3, "difference operator properties", criterion_3),
        (4, "variance scaling", criterion_4),
        (5, "decay integral", criterion_5),
        (6, "stabilization diagnostics", criterion_6),
        (7, "classical CLT sanity", criterion_7),
        (8, "almost sure CLT headline", criterion_8),
        (9, "Ibragimov-Lifshits diagnostic", criterion_9),
        (10, "Gaussian CF bound", criterion_10),
    ];
    // Φ is used throughout; make sure the CDF is the accurate one before spending time
    assert!((normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);

    let mut tables = Tables::default();
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let outcome = run(&mut tables);
        let secs = start.elapsed().as_secs_f64();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        let note = if !outcome.pass && KNOWN_RED.contains(&id) { " [known red]" } else { "" };
        println!("{status} criterion {id} ({name}){note}: {} [{secs:.1}s]", outcome.detail);
        if !outcome.pass && !KNOWN_RED.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
