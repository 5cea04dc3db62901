//! Cross-checks the artifacts of an output directory and summarizes them.

use std::fmt::Write as _;
use std::path::Path;

use asclt::persist::{fmt_real, read_calibration_json, read_csv, read_header, read_trajectory_points, write_csv, CsvTable};
use asclt::stats::normal_cdf;

use crate::commands::{Run, CALIBRATION_FILE};
use crate::error::{CliError, CliResult};

/// Files the report writes itself; they are not inputs to the hash check.
const OUTPUTS: [&str; 4] = ["report.md", "ks_vs_n.csv", "ecdf_vs_phi.csv", "decay_curves.csv"];

fn io(e: std::io::Error) -> CliError {
    CliError::Core(asclt::Error::Io(e.to_string()))
}

/// Every `.csv` artifact and the calibration must carry the configuration hash.
fn check_hashes(dir: &Path, expected: &str) -> CliResult<Vec<String>> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
        .filter(|n| (n.ends_with(".csv") || n == CALIBRATION_FILE) && !OUTPUTS.contains(&n.as_str()))
        .collect();
    names.sort();
    for name in &names {
        let path = dir.join(name);
        let hash = if name == CALIBRATION_FILE {
            read_calibration_json(&path)?.0.config_hash
        } else {
            read_header(&path)?.config_hash
        };
        if hash != expected {
            return Err(CliError::Mismatch(format!("{name} has config_hash {hash}, expected {expected}")));
        }
    }
    Ok(names)
}

fn optional_csv(dir: &Path, name: &str) -> CliResult<Option<CsvTable>> {
    let path = dir.join(name);
    if path.exists() {
        Ok(Some(read_csv(&path)?))
    } else {
        Ok(None)
    }
}

fn markdown_table(out: &mut String, t: &CsvTable) {
    let _ = writeln!(out, "| {} |", t.columns.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(t.columns.len()));
    for r in &t.rows {
        let cells: Vec<String> = r
            .iter()
            .map(|c| match c.parse::<f64>() {
                Ok(v) if c.contains('e') => format!("{v:.4e}"),
                _ => c.clone(),
            })
            .collect();
        let _ = writeln!(out, "| {} |", cells.join(" | "));
    }
    out.push('\n');
}

pub fn run_report(run: &Run) -> CliResult<()> {
    let dir = run.cfg.out.as_path();
    let inputs = check_hashes(dir, &run.hash)?;
    let header = run.header(run.cfg.seeds[0]);
    let mut md = String::new();
    let _ = writeln!(md, "# Run report\n");
    let _ = writeln!(md, "- model: `{}`", run.model);
    let _ = writeln!(md, "- config hash: `{}`", run.hash);
    let _ = writeln!(md, "- artifacts checked: {}\n", inputs.join(", "));

    if dir.join(CALIBRATION_FILE).exists() {
        let (_, table) = read_calibration_json(&dir.join(CALIBRATION_FILE))?;
        let _ = writeln!(md, "## Calibration\n");
        let _ = writeln!(md, "tau_hat = {:.4}\n", table.fit.tau_hat);
        let _ = writeln!(md, "| k | mean | variance | reps |\n|---|---|---|---|");
        for e in &table.entries {
            let _ = writeln!(md, "| {} | {:.6e} | {:.6e} | {} |", e.k, e.mean, e.variance, e.reps);
        }
        md.push('\n');
    }

    if let Some(t) = optional_csv(dir, "asclt.csv")? {
        let cols = ["seed", "n", "ks", "unnormalized_mass"];
        let idx: Vec<usize> = cols.iter().map(|c| t.column(c)).collect::<asclt::Result<_>>()?;
        let rows: Vec<Vec<String>> = t.rows.iter().map(|r| idx.iter().map(|&i| r[i].clone()).collect()).collect();
        write_csv(&dir.join("ks_vs_n.csv"), &header, &cols, rows.clone())?;
        let _ = writeln!(md, "## Logarithmic averages\n");
        let last_n = rows.iter().filter_map(|r| r[1].parse::<u64>().ok()).max().unwrap_or(0);
        let _ = writeln!(md, "| seed | KS at n = {last_n} | W_n / ln n |\n|---|---|---|");
        for r in rows.iter().filter(|r| r[1] == last_n.to_string()) {
            let ks: f64 = r[2].parse().unwrap_or(f64::NAN);
            let mass: f64 = r[3].parse().unwrap_or(f64::NAN);
            let _ = writeln!(md, "| {} | {ks:.4} | {mass:.4} |", r[0]);
        }
        md.push('\n');
    }

    let mut ecdf_rows = Vec::new();
    for &seed in &run.cfg.seeds {
        let path = dir.join(crate::commands::trajectory_file(seed));
        if !path.exists() {
            continue;
        }
        let (_, points) = read_trajectory_points(&path)?;
        let atoms: Vec<(f64, f64)> = points.iter().filter_map(|p| p.f.map(|f| (f, 1.0 / p.k as f64))).collect();
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if atoms.is_empty() {
            continue;
        }
        for i in 0..=80 {
            let x = -4.0 + 0.1 * i as f64;
            let below: f64 = atoms.iter().filter(|a| a.0 <= x).map(|a| a.1).sum();
            ecdf_rows.push(vec![seed.to_string(), fmt_real(x), fmt_real(below / total), fmt_real(normal_cdf(x))]);
        }
    }
    if !ecdf_rows.is_empty() {
        write_csv(&dir.join("ecdf_vs_phi.csv"), &header, &["seed", "x", "ecdf", "phi"], ecdf_rows)?;
    }

    if let Some(t) = optional_csv(dir, "decay.csv")? {
        let cols: Vec<&str> = t.columns.iter().map(String::as_str).collect();
        write_csv(&dir.join("decay_curves.csv"), &header, &cols, t.rows.clone())?;
    }
    if let Some(t) = optional_csv(dir, "decay_fit.csv")? {
        let _ = writeln!(md, "## Decay fits\n");
        markdown_table(&mut md, &t);
    }
    if let Some(t) = optional_csv(dir, "il.csv")? {
        let _ = writeln!(md, "## Mean-square characteristic-function gap\n");
        markdown_table(&mut md, &t);
    }
    if let Some(t) = optional_csv(dir, "bounds.csv")? {
        let _ = writeln!(md, "## Bound functionals\n");
        markdown_table(&mut md, &t);
    }
    std::fs::write(dir.join("report.md"), md).map_err(io)?;
    println!("wrote report.md");
    Ok(())
}
