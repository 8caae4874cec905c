//! CSV files written by a run. Each starts with a `# dscem-bench <kind> vN`
//! line; floats carry 17 significant digits so a reload is bit-exact.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{BenchError, Result};
use crate::plan::Method;

pub const RUNS_VERSION: u32 = 1;
pub const STEPS_VERSION: u32 = 1;
pub const TIMING_VERSION: u32 = 1;

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// One closed-loop run. Wall time lives in `timing.csv` so this file stays
/// reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub method: Method,
    pub n: usize,
    pub run: usize,
    pub env_seed: u64,
    pub controller_seed: u64,
    pub cumulative_cost: f64,
    pub smoothness: f64,
    pub success: bool,
    pub rollouts: u64,
}

const RUN_COLUMNS: [&str; 9] =
    ["method", "n", "run", "env_seed", "controller_seed", "cumulative_cost", "smoothness", "success", "rollouts"];

/// Per-step log entry.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRow {
    pub method: Method,
    pub n: usize,
    pub run: usize,
    pub k: usize,
    pub stage_cost: f64,
    pub control: Vec<f64>,
    pub state: Vec<f64>,
}

/// Opens a CSV writer after the version line and any extra `#` notes.
pub(crate) fn create(path: &Path, kind: &str, version: u32, notes: &[&str]) -> Result<csv::Writer<BufWriter<File>>> {
    let f = File::create(path).map_err(BenchError::io(path))?;
    let mut w = BufWriter::new(f);
    writeln!(w, "# dscem-bench {kind} v{version}").map_err(BenchError::io(path))?;
    for note in notes {
        writeln!(w, "# {note}").map_err(BenchError::io(path))?;
    }
    Ok(csv::Writer::from_writer(w))
}

pub(crate) fn open(path: &Path, kind: &str, version: u32) -> Result<csv::Reader<File>> {
    let text_head = std::fs::read_to_string(path).map_err(BenchError::io(path))?;
    let want = format!("# dscem-bench {kind} v{version}");
    if text_head.lines().next() != Some(want.as_str()) {
        return Err(BenchError::Data { path: path.into(), reason: format!("expected header line `{want}`") });
    }
    let f = File::open(path).map_err(BenchError::io(path))?;
    Ok(csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(f))
}

pub(crate) fn csv_err(path: &Path) -> impl Fn(csv::Error) -> BenchError + '_ {
    move |e| BenchError::Data { path: path.into(), reason: e.to_string() }
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, path: &Path) -> Result<T> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse().map_err(|_| BenchError::Data {
        path: path.into(),
        reason: format!("cannot parse `{raw}` in column {i} of line {:?}", rec.position().map(|p| p.line())),
    })
}

fn method_field(rec: &csv::StringRecord, i: usize, path: &Path) -> Result<Method> {
    let raw = rec.get(i).unwrap_or("");
    Method::from_id(raw).ok_or_else(|| BenchError::Data { path: path.into(), reason: format!("unknown method `{raw}`") })
}

pub fn write_runs(path: &Path, rows: &[RunRow]) -> Result<()> {
    let mut w = create(path, "runs", RUNS_VERSION, &[])?;
    let e = csv_err(path);
    w.write_record(RUN_COLUMNS).map_err(&e)?;
    for r in rows {
        w.write_record([
            r.method.id().to_string(),
            r.n.to_string(),
            r.run.to_string(),
            r.env_seed.to_string(),
            r.controller_seed.to_string(),
            fmt_f64(r.cumulative_cost),
            fmt_f64(r.smoothness),
            (r.success as u8).to_string(),
            r.rollouts.to_string(),
        ])
        .map_err(&e)?;
    }
    w.flush().map_err(BenchError::io(path))
}

pub fn read_runs(path: &Path) -> Result<Vec<RunRow>> {
    let mut r = open(path, "runs", RUNS_VERSION)?;
    let e = csv_err(path);
    let header = r.headers().map_err(&e)?.clone();
    if header.iter().collect::<Vec<_>>() != RUN_COLUMNS {
        return Err(BenchError::Data { path: path.into(), reason: "unexpected columns".into() });
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(&e)?;
            Ok(RunRow {
                method: method_field(&rec, 0, path)?,
                n: field(&rec, 1, path)?,
                run: field(&rec, 2, path)?,
                env_seed: field(&rec, 3, path)?,
                controller_seed: field(&rec, 4, path)?,
                cumulative_cost: field(&rec, 5, path)?,
                smoothness: field(&rec, 6, path)?,
                success: field::<u8>(&rec, 7, path)? == 1,
                rollouts: field(&rec, 8, path)?,
            })
        })
        .collect()
}

/// `(method, N, run, seconds)` rows.
pub fn write_timing(path: &Path, rows: &[(Method, usize, usize, f64)]) -> Result<()> {
    let mut w = create(path, "timing", TIMING_VERSION, &[])?;
    let e = csv_err(path);
    w.write_record(["method", "n", "run", "wall_time_s"]).map_err(&e)?;
    for (m, n, run, t) in rows {
        w.write_record([m.id().to_string(), n.to_string(), run.to_string(), format!("{t:.6}")]).map_err(&e)?;
    }
    w.flush().map_err(BenchError::io(path))
}

pub fn write_steps(path: &Path, rows: &[StepRow]) -> Result<()> {
    let mut w = create(path, "steps", STEPS_VERSION, &[])?;
    let e = csv_err(path);
    let (du, dx) = rows.first().map_or((1, 0), |r| (r.control.len(), r.state.len()));
    let mut header: Vec<String> = ["method", "n", "run", "k", "stage_cost"].map(String::from).to_vec();
    header.extend((0..du).map(|i| format!("u{i}")));
    header.extend((0..dx).map(|i| format!("x{i}")));
    w.write_record(&header).map_err(&e)?;
    for r in rows {
        let mut rec = vec![r.method.id().to_string(), r.n.to_string(), r.run.to_string(), r.k.to_string()];
        rec.push(fmt_f64(r.stage_cost));
        rec.extend(r.control.iter().chain(&r.state).map(|v| fmt_f64(*v)));
        w.write_record(&rec).map_err(&e)?;
    }
    w.flush().map_err(BenchError::io(path))
}

pub fn read_steps(path: &Path) -> Result<Vec<StepRow>> {
    let mut r = open(path, "steps", STEPS_VERSION)?;
    let e = csv_err(path);
    let header = r.headers().map_err(&e)?.clone();
    let du = header.iter().filter(|h| h.starts_with('u')).count();
    let dx = header.iter().filter(|h| h.starts_with('x')).count();
    if header.len() != 5 + du + dx {
        return Err(BenchError::Data { path: path.into(), reason: "unexpected columns".into() });
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(&e)?;
            let floats = |from: usize, len: usize| -> Result<Vec<f64>> {
                (from..from + len).map(|i| field(&rec, i, path)).collect()
            };
            Ok(StepRow {
                method: method_field(&rec, 0, path)?,
                n: field(&rec, 1, path)?,
                run: field(&rec, 2, path)?,
                k: field(&rec, 3, path)?,
                stage_cost: field(&rec, 4, path)?,
                control: floats(5, du)?,
                state: floats(5 + du, dx)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_roundtrips() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 123456.789, f64::INFINITY, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn runs_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.csv");
        let rows = vec![
            RunRow {
                method: Method::DscemVarV2,
                n: 50,
                run: 0,
                env_seed: u64::MAX,
                controller_seed: 7,
                cumulative_cost: 1.0 / 3.0,
                smoothness: 2.0,
                success: true,
                rollouts: 22500,
            },
            RunRow {
                method: Method::Icem,
                n: 50,
                run: 1,
                env_seed: 1,
                controller_seed: 2,
                cumulative_cost: f64::INFINITY,
                smoothness: 0.0,
                success: false,
                rollouts: 0,
            },
        ];
        write_runs(&path, &rows).unwrap();
        assert_eq!(read_runs(&path).unwrap(), rows);
    }

    #[test]
    fn steps_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("steps.csv");
        let rows = vec![StepRow {
            method: Method::Icem,
            n: 20,
            run: 3,
            k: 4,
            stage_cost: 0.7,
            control: vec![-1.0],
            state: vec![0.1, 0.2],
        }];
        write_steps(&path, &rows).unwrap();
        assert_eq!(read_steps(&path).unwrap(), rows);
    }

    #[test]
    fn wrong_header_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.csv");
        std::fs::write(&path, "method,n\nicem,1\n").unwrap();
        assert!(read_runs(&path).is_err());
    }
}
