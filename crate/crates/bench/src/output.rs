//! Trace CSV and report JSON files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use dsgs::trace::TracePoint;
use dsgs::Trace;

use crate::error::{BenchError, Result};
use crate::run::ExperimentReport;

/// Trace columns, in order.
pub const TRACE_COLUMNS: [&str; 6] = [
    "epoch",
    "coordinate_updates",
    "x_error",
    "residual_norm",
    "objective_value",
    "elapsed_seconds",
];

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes the trace as CSV. Each `(key, value)` metadata pair becomes a
/// leading `# key: value` line; with no metadata the file starts at the
/// header. Undefined metrics are empty fields. Float fields use Rust's
/// shortest round-trip formatting, so parsing them back is exact.
pub fn write_trace_csv<W: Write>(trace: &Trace, metadata: &[(String, String)], out: W) -> std::io::Result<()> {
    let mut out = out;
    for (k, v) in metadata {
        writeln!(out, "# {k}: {v}")?;
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(TRACE_COLUMNS)?;
    for p in &trace.points {
        w.write_record([
            p.epoch.to_string(),
            p.coordinate_updates.to_string(),
            opt(p.x_error),
            opt(p.residual_norm),
            opt(p.objective),
            p.elapsed_seconds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_trace_csv(trace: &Trace, metadata: &[(String, String)], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| BenchError::io(path, e))?;
    write_trace_csv(trace, metadata, BufWriter::new(file)).map_err(|e| BenchError::io(path, e))
}

/// Parses a trace CSV written by [`emit_trace_csv`], skipping `#` lines.
pub fn read_trace_csv(path: &Path) -> Result<Vec<TracePoint<f64>>> {
    let malformed = |message: String| BenchError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let file = File::open(path).map_err(|e| BenchError::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file);
    let header = r.headers().map_err(|e| malformed(e.to_string()))?.clone();
    if header.iter().ne(TRACE_COLUMNS) {
        return Err(malformed(format!("unexpected header {header:?}")));
    }
    let num = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| malformed(format!("bad number {s:?}")))
        }
    };
    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| malformed(e.to_string()))?;
        let int = |k: usize| {
            rec[k]
                .parse::<u64>()
                .map_err(|_| malformed(format!("bad integer {:?}", &rec[k])))
        };
        points.push(TracePoint {
            epoch: int(0)?,
            coordinate_updates: int(1)?,
            x_error: num(&rec[2])?,
            residual_norm: num(&rec[3])?,
            objective: num(&rec[4])?,
            elapsed_seconds: num(&rec[5])?.unwrap_or(0.0),
        });
    }
    Ok(points)
}

pub fn report_json(report: &ExperimentReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn emit_report_json(report: &ExperimentReport, path: &Path) -> Result<()> {
    std::fs::write(path, report_json(report)).map_err(|e| BenchError::io(path, e))
}

/// Metadata lines for a seed's trace file.
pub fn trace_metadata(report: &ExperimentReport, seed: u64) -> Vec<(String, String)> {
    let seeds: Vec<String> = report.metadata.seeds.iter().map(u64::to_string).collect();
    vec![
        ("experiment".into(), report.config.name.clone()),
        ("solver".into(), report.config.solver.name().into()),
        ("prng".into(), report.metadata.prng.clone()),
        ("seed".into(), seed.to_string()),
        ("seeds".into(), seeds.join(",")),
        ("config_hash".into(), report.metadata.config_hash.clone()),
        ("software".into(), report.metadata.software.clone()),
    ]
}
