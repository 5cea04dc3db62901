//! CSV and JSON artifacts. Every file starts with a `# config_hash=<hex> seed=<seed>`
//! line; CSV bodies are RFC 4180 with reals written to 17 significant digits so they
//! read back bit-identically.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::asclt::{AscltRow, CalibrationTable, IlRow, Schedule, Trajectory, TrajectoryPoint};
use crate::bounds::BoundEstimate;
use crate::domain::{PointConfiguration, Region};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactHeader {
    pub config_hash: String,
    pub seed: u64,
}

impl ArtifactHeader {
    pub fn new(config_hash: impl Into<String>, seed: u64) -> Self {
        ArtifactHeader { config_hash: config_hash.into(), seed }
    }

    fn line(&self) -> String {
        format!("# config_hash={} seed={}", self.config_hash, self.seed)
    }

    fn parse(line: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed artifact header `{line}`"));
        let rest = line.strip_prefix("# ").ok_or_else(bad)?;
        let mut hash = None;
        let mut seed = None;
        for field in rest.split_whitespace() {
            match field.split_once('=') {
                Some(("config_hash", v)) => hash = Some(v.to_string()),
                Some(("seed", v)) => seed = Some(v.parse().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        Ok(ArtifactHeader { config_hash: hash.ok_or_else(bad)?, seed: seed.ok_or_else(bad)? })
    }
}

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Writes the header line followed by a CSV table.
pub fn write_csv<I>(path: &Path, header: &ArtifactHeader, columns: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{}", header.line()).map_err(|e| io_err(path, e))?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
    w.write_record(columns).map_err(|e| io_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// A CSV artifact read back: header, column names and string records.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub header: ArtifactHeader,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Parse(format!("missing column `{name}`")))
    }
}

pub fn read_header(path: &Path) -> Result<ArtifactHeader> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut first = String::new();
    BufReader::new(file).read_line(&mut first).map_err(|e| io_err(path, e))?;
    ArtifactHeader::parse(first.trim_end())
}

pub fn read_csv(path: &Path) -> Result<CsvTable> {
    let header = read_header(path)?;
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| io_err(path, e))?;
    let columns = r.headers().map_err(|e| io_err(path, e))?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(str::to_string).collect()).map_err(|e| io_err(path, e)))
        .collect::<Result<_>>()?;
    Ok(CsvTable { header, columns, rows })
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("invalid number `{s}`")))
}

pub fn write_trajectory_csv(path: &Path, header: &ArtifactHeader, traj: &Trajectory) -> Result<()> {
    let rows = traj.values.iter().map(|v| vec![v.k.to_string(), fmt_real(v.h), v.f.map(fmt_real).unwrap_or_default()]);
    write_csv(path, header, &["k", "H", "F"], rows)
}

/// Reads `(k, H, F)` rows; an empty `F` is read as missing.
pub fn read_trajectory_points(path: &Path) -> Result<(ArtifactHeader, Vec<TrajectoryPoint>)> {
    let t = read_csv(path)?;
    let (ck, ch, cf) = (t.column("k")?, t.column("H")?, t.column("F")?);
    let pts = t
        .rows
        .iter()
        .map(|r| {
            let f = if r[cf].is_empty() { None } else { Some(parse_num(&r[cf])?) };
            Ok(TrajectoryPoint { k: parse_num(&r[ck])?, h: parse_num(&r[ch])?, f })
        })
        .collect::<Result<_>>()?;
    Ok((t.header, pts))
}

pub fn asclt_columns() -> &'static [&'static str] {
    &["seed", "n", "W_n", "ks", "unnormalized_mass"]
}

pub fn write_asclt_csv(path: &Path, header: &ArtifactHeader, rows: &[(u64, AscltRow)]) -> Result<()> {
    let body = rows.iter().map(|(seed, r)| {
        vec![seed.to_string(), r.n.to_string(), fmt_real(r.total_weight), fmt_real(r.ks), fmt_real(r.unnormalized_mass)]
    });
    write_csv(path, header, asclt_columns(), body)
}

pub fn write_il_csv(path: &Path, header: &ArtifactHeader, rows: &[IlRow]) -> Result<()> {
    let body = rows
        .iter()
        .map(|r| vec![r.n.to_string(), fmt_real(r.t), fmt_real(r.mean_sq), fmt_real(r.se), fmt_real(r.partial_sum)]);
    write_csv(path, header, &["n", "t", "mean_sq", "se", "partial_sum"], body)
}

/// One line of `bounds.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRecord {
    pub quantity: String,
    pub model_id: String,
    pub n: String,
    pub estimate: BoundEstimate,
    pub inner_reps: usize,
}

pub fn write_bounds_csv(path: &Path, header: &ArtifactHeader, rows: &[BoundRecord]) -> Result<()> {
    let body = rows.iter().map(|r| {
        vec![
            r.quantity.clone(),
            r.model_id.clone(),
            r.n.clone(),
            fmt_real(r.estimate.value),
            fmt_real(r.estimate.standard_error),
            r.estimate.samples_used.to_string(),
            r.inner_reps.to_string(),
            header.seed.to_string(),
            fmt_real(r.estimate.bias_bound),
            r.estimate.zero_cells.to_string(),
        ]
    });
    let cols = ["quantity", "model_id", "n", "value", "se", "samples", "inner_reps", "seed", "bias_bound", "zero_cells"];
    write_csv(path, header, &cols, body)
}

#[derive(Serialize, Deserialize)]
struct CalibrationFile {
    config_hash: String,
    seed: u64,
    #[serde(flatten)]
    table: CalibrationTable,
}

pub fn write_calibration_json(path: &Path, header: &ArtifactHeader, table: &CalibrationTable) -> Result<()> {
    let doc = CalibrationFile { config_hash: header.config_hash.clone(), seed: header.seed, table: table.clone() };
    let text = serde_json::to_string_pretty(&doc).map_err(|e| io_err(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

pub fn read_calibration_json(path: &Path) -> Result<(ArtifactHeader, CalibrationTable)> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::Dependency(format!("calibration file {} not found", path.display()))
        } else {
            io_err(path, e)
        }
    })?;
    let doc: CalibrationFile =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok((ArtifactHeader::new(doc.config_hash, doc.seed), doc.table))
}

/// Metadata stored next to a master-process CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MasterSidecar {
    pub seed: u64,
    /// Intensity of the master process, always 1.
    pub intensity: f64,
    pub window: Region,
    pub n_max: u64,
    pub model_id: String,
    pub schedule: Schedule,
}

/// Writes the master points to `path` and their metadata to `path.json`.
pub fn write_master(path: &Path, header: &ArtifactHeader, master: &PointConfiguration, sidecar: &MasterSidecar) -> Result<()> {
    let cols: Vec<String> = (1..=master.dim()).map(|i| format!("x{i}")).collect();
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    write_csv(path, header, &cols, master.points().map(|p| p.iter().map(|&c| fmt_real(c)).collect()))?;
    let side = sidecar_path(path);
    let text = serde_json::to_string_pretty(sidecar).map_err(|e| io_err(&side, e))?;
    std::fs::write(&side, text + "\n").map_err(|e| io_err(&side, e))
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}

pub fn read_master(path: &Path) -> Result<(PointConfiguration, MasterSidecar)> {
    let side = sidecar_path(path);
    let text = std::fs::read_to_string(&side).map_err(|e| io_err(&side, e))?;
    let sidecar: MasterSidecar =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", side.display())))?;
    let t = read_csv(path)?;
    let coords = t.rows.iter().flatten().map(|s| parse_num(s)).collect::<Result<Vec<f64>>>()?;
    let config = PointConfiguration::from_flat(coords, sidecar.window.clone(), None, sidecar.seed)?;
    Ok((config, sidecar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asclt::{run_trajectory, Schedule};
    use crate::domain::{restrict_scaled, sample_master};
    use crate::functionals::ScoreModel;

    #[test]
    fn header_round_trip() {
        let h = ArtifactHeader::new("abc123", 42);
        assert_eq!(ArtifactHeader::parse(&h.line()).unwrap(), h);
        assert!(ArtifactHeader::parse("k,H,F").is_err());
    }

    #[test]
    fn reals_round_trip_exactly() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_real(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn trajectory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("trajectory.csv");
        let m = ScoreModel::clique(Region::centered_unit_cube(2), 1, 1.0).unwrap();
        let mut t = run_trajectory(&m, 50, Schedule::Complete, 5).unwrap();
        t.values[3].f = Some(0.25);
        let h = ArtifactHeader::new("ff", 5);
        write_trajectory_csv(&p, &h, &t).unwrap();
        let (h2, pts) = read_trajectory_points(&p).unwrap();
        assert_eq!(h2, h);
        assert_eq!(pts, t.values);
    }

    #[test]
    fn persisted_master_reproduces_values() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("master.csv");
        let y = Region::centered_unit_cube(2);
        let m = ScoreModel::knn(y.clone(), 2, 1.0).unwrap();
        let master = sample_master(&y, 200, 9).unwrap();
        let side = MasterSidecar {
            seed: 9,
            intensity: 1.0,
            window: master.window().clone(),
            n_max: 200,
            model_id: m.to_string(),
            schedule: Schedule::Complete,
        };
        write_master(&p, &ArtifactHeader::new("00", 9), &master, &side).unwrap();
        let (back, side2) = read_master(&p).unwrap();
        assert_eq!(side2, side);
        let t = run_trajectory(&m, 200, Schedule::Complete, 9).unwrap();
        for v in t.values.iter().step_by(17) {
            let h = m.evaluate(&restrict_scaled(&back, v.k, &y).unwrap()).unwrap().standardized;
            assert_eq!(h.to_bits(), v.h.to_bits());
        }
    }

    #[test]
    fn missing_calibration_is_a_dependency_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(read_calibration_json(&dir.path().join("nope.json")), Err(Error::Dependency(_))));
    }
}
