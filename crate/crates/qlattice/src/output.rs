//! CSV and JSON emission of run results, with exact round-tripping.
//!
//! CSV files start with one `#`-prefixed metadata line followed by the
//! header `xi,count,frequency,expected,std_residual`; expected and
//! residual columns stay empty when no comparison law was supplied.
//! Floats are printed with Rust's shortest round-trip formatting, so
//! re-parsing reproduces them bit-exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use qlattice_core::histogram::EnsembleHistogram;
use qlattice_core::qforce::BosonDump;
use serde::{Deserialize, Serialize};

use crate::stats::ComparisonReport;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One emitted row of a histogram table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub xi: i64,
    pub count: u64,
    pub frequency: f64,
    pub expected: Option<f64>,
    pub std_residual: Option<f64>,
}

/// Everything emitted for one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunResults {
    pub scenario: String,
    pub seed: u64,
    pub n_particles: u64,
    pub n_steps: u64,
    pub version: String,
    pub rows: Vec<ResultRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<ComparisonReport>,
}

impl RunResults {
    pub fn new(hist: &EnsembleHistogram, expected: Option<&BTreeMap<i64, f64>>) -> Self {
        let n = hist.total() as f64;
        let rows = hist
            .domain()
            .sites()
            .map(|xi| {
                let count = hist.count(xi);
                let frequency = count as f64 / n;
                let expected_p = expected.and_then(|law| law.get(&xi).copied());
                let std_residual = expected_p.map(|p| {
                    if p <= 0.0 || p >= 1.0 {
                        0.0
                    } else {
                        (count as f64 - n * p) / (n * p * (1.0 - p)).sqrt()
                    }
                });
                ResultRow {
                    xi,
                    count,
                    frequency,
                    expected: expected_p,
                    std_residual,
                }
            })
            .collect();
        RunResults {
            scenario: hist.scenario.clone(),
            seed: hist.seed,
            n_particles: hist.n_particles,
            n_steps: hist.n_steps,
            version: TOOL_VERSION.to_string(),
            rows,
            report: None,
        }
    }

    pub fn with_report(mut self, report: ComparisonReport) -> Self {
        self.report = Some(report);
        self
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# scenario={} seed={} np={} nt={} version={}",
            self.scenario, self.seed, self.n_particles, self.n_steps, self.version
        );
        out.push_str("xi,count,frequency,expected,std_residual\n");
        for row in &self.rows {
            let expected = row.expected.map(|v| v.to_string()).unwrap_or_default();
            let residual = row.std_residual.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                row.xi, row.count, row.frequency, expected, residual
            );
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.to_csv())
            .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    }

    pub fn write_json(&self, path: &Path) -> io::Result<()> {
        let body = serde_json::to_string_pretty(self).expect("results serialize");
        fs::write(path, body)
            .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    }

    pub fn read_json(path: &Path) -> io::Result<RunResults> {
        let body = fs::read_to_string(path)
            .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
        serde_json::from_str(&body).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}

/// Parses a CSV produced by [`RunResults::to_csv`]; returns the metadata
/// line and the rows.
pub fn parse_results_csv(text: &str) -> io::Result<(String, Vec<ResultRow>)> {
    let mut lines = text.lines();
    let meta = lines
        .next()
        .filter(|l| l.starts_with('#'))
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "missing metadata line"))?
        .to_string();
    let header = lines.next().unwrap_or_default();
    if header != "xi,count,frequency,expected,std_residual" {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unexpected header: {header}"),
        ));
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("bad row: {line}"),
            ));
        }
        let parse_opt = |s: &str| -> io::Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse()
                    .map(Some)
                    .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{e}: {s}")))
            }
        };
        rows.push(ResultRow {
            xi: fields[0]
                .parse()
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{e}")))?,
            count: fields[1]
                .parse()
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{e}")))?,
            frequency: fields[2]
                .parse()
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{e}")))?,
            expected: parse_opt(fields[3])?,
            std_residual: parse_opt(fields[4])?,
        });
    }
    Ok((meta, rows))
}

/// Writes resident bosons as `site,key,w,w0_scaled,ell` rows.
pub fn write_boson_dump_csv(path: &Path, rows: &[BosonDump]) -> io::Result<()> {
    let mut out = String::from("site,key,w,w0_scaled,ell\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.site, row.key, row.momentum, row.w0_scaled, row.age
        );
    }
    fs::write(path, out)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

/// Emits a table of per-site analytic predictions.
pub fn prediction_csv(rows: &[(i64, f64)], label: &str) -> String {
    let mut out = format!("# prediction={label} version={TOOL_VERSION}\nxi,expected\n");
    for (xi, value) in rows {
        let _ = writeln!(out, "{xi},{value}");
    }
    out
}
