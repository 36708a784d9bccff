//! Report structures and writers.
//!
//! Every run writes into a fresh `<out>/<command>-<timestamp>/`
//! directory: `report.json` (UTF-8, struct-ordered keys), `curve.csv`
//! (header row, comma-separated, LF) and `plot.dat` (first two columns,
//! space-separated). All floating-point values are rounded to 12
//! significant digits before serialization, so identical configurations
//! produce byte-identical files; wall-clock goes to stdout only.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

/// Round to `digits` significant digits (the serialization contract).
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x)
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub tolerances: Vec<(String, f64)>,
}

impl Provenance {
    pub fn new(command: &str, seed: Option<u64>, tolerances: &[(&str, f64)]) -> Self {
        Self {
            tool: "tvkit".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            tolerances: tolerances
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeFit {
    pub name: String,
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
}

/// Ordinary least squares y = intercept + slope x with the slope's
/// standard error.
pub fn slope_fit(name: &str, xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::Input(format!(
            "slope fit needs >= 3 paired points, got {}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 0.0 {
        return Err(Error::Numeric("degenerate abscissae in slope fit".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let stderr = if xs.len() > 2 {
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(SlopeFit {
        name: name.into(),
        slope,
        stderr,
        intercept,
    })
}

/// A tabular experiment report: named columns, numeric rows, fitted
/// slopes, free-form notes and optional suite-specific structured data.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub suite: String,
    pub provenance: Provenance,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub slopes: Vec<SlopeFit>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub extra: serde_json::Value,
    #[serde(skip)]
    pub wall_clock_secs: f64,
}

pub struct ReportRow;

impl ExperimentReport {
    pub fn new(suite: &str, provenance: Provenance, columns: &[&str]) -> Self {
        Self {
            suite: suite.into(),
            provenance,
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            slopes: Vec::new(),
            notes: Vec::new(),
            extra: serde_json::Value::Null,
            wall_clock_secs: 0.0,
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn rounded(&self) -> ExperimentReport {
        let mut r = self.clone();
        for row in r.rows.iter_mut() {
            for v in row.iter_mut() {
                *v = round_sig(*v, 12);
            }
        }
        for s in r.slopes.iter_mut() {
            s.slope = round_sig(s.slope, 12);
            s.stderr = round_sig(s.stderr, 12);
            s.intercept = round_sig(s.intercept, 12);
        }
        r
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.rounded())
            .map_err(|e| Error::Internal(format!("report serialization failed: {e}")))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{:.11e}", v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_plot_dat(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            if row.len() >= 2 {
                out.push_str(&format!("{:.11e} {:.11e}\n", row[0], row[1]));
            }
        }
        out
    }
}

/// Create `<out>/<command>-<timestamp>/` without clobbering existing
/// runs (a numeric suffix is appended on collision).
pub fn run_directory(out: &Path, command: &str) -> Result<PathBuf> {
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut dir = out.join(format!("{command}-{stamp}"));
    let mut k = 0;
    while dir.exists() {
        k += 1;
        dir = out.join(format!("{command}-{stamp}-{k}"));
    }
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Both,
}

/// Write the report files and return the directory used.
pub fn write_report(
    out: &Path,
    command: &str,
    format: OutputFormat,
    report: &ExperimentReport,
) -> Result<PathBuf> {
    let dir = run_directory(out, command)?;
    if format != OutputFormat::Csv {
        let mut f = fs::File::create(dir.join("report.json"))?;
        f.write_all(report.to_json()?.as_bytes())?;
        f.write_all(b"\n")?;
    }
    if format != OutputFormat::Json {
        fs::write(dir.join("curve.csv"), report.to_csv())?;
        fs::write(dir.join("plot.dat"), report.to_plot_dat())?;
    }
    Ok(dir)
}
