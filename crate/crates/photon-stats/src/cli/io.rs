//! File formats of the CLI: metadata preambles, CSV/JSON writers, the flat
//! key = value config file, and scaling-table reading.
//!
//! Every file written by a subcommand starts with `#` metadata lines (tool
//! version, RNG algorithm, master seed, resolved configuration). Readers in
//! this crate strip the preamble, so annotated geometry/fit files load like
//! plain JSON; external tools should drop lines starting with `#`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::analysis::{FitResult, ScalingRow, ScalingTable, RNG_ALGORITHM};
use crate::correlations::CorrelationRecord;
use crate::error::{Error, Result};
use crate::geometry::strip_comment_preamble;

/// Resolved configuration echoed into output headers: sorted `key=value`
/// pairs, reproducing the file byte-identically when re-run.
#[derive(Debug, Clone, Default)]
pub struct ConfigEcho {
    entries: BTreeMap<String, String>,
}

impl ConfigEcho {
    pub fn new(subcommand: &str) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert("cmd".into(), subcommand.into());
        ConfigEcho { entries }
    }

    pub fn set(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.entries.insert(key.into(), value.to_string());
        self
    }

    fn line(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// The `#` preamble carried by every output file.
pub fn metadata_preamble(echo: &ConfigEcho, master_seed: u64) -> String {
    format!(
        "# tool: photon-stats {}\n# rng: {RNG_ALGORITHM} (realization seeds via splitmix64 stable hash)\n# master_seed: {master_seed}\n# config: {}\n",
        env!("CARGO_PKG_VERSION"),
        echo.line()
    )
}

pub fn write_with_preamble(path: &Path, preamble: &str, body: &str) -> Result<()> {
    fs::write(path, format!("{preamble}{body}"))?;
    Ok(())
}

/// Formats a data value in scientific notation (shortest round-trip form).
fn num(v: f64) -> String {
    format!("{v:e}")
}

/// CSV body for map/scan records: angles first, then the record columns,
/// plus one `gm_<m>` column per requested order.
pub fn records_csv(points: &[(f64, f64)], records: &[CorrelationRecord], orders: &[usize]) -> String {
    let mut header = "theta,phi,S_re,S_im,S_abs2,g1_norm,g2,one_minus_exp_neg_g2".to_string();
    for m in orders {
        write!(header, ",gm_{m}").unwrap();
    }
    let mut out = header;
    out.push('\n');
    for ((theta, phi), rec) in points.iter().zip(records) {
        write!(
            out,
            "{},{},{},{},{},{},{},{}",
            num(*theta),
            num(*phi),
            num(rec.s_k.re),
            num(rec.s_k.im),
            num(rec.s_abs2),
            num(rec.g1_normalized),
            num(rec.g2),
            num(1.0 - (-rec.g2).exp())
        )
        .unwrap();
        for &(_, value) in &rec.gm {
            write!(out, ",{}", num(value)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// CSV body for a scaling table; the stderr field is empty when undefined
/// (single realization).
pub fn scaling_csv(table: &ScalingTable) -> String {
    let mut out = String::from("control,mean,stderr,n_realizations\n");
    for row in &table.rows {
        let stderr = row.std_error.map(num).unwrap_or_default();
        writeln!(out, "{},{},{},{}", num(row.control), num(row.mean), stderr, row.n_realizations)
            .unwrap();
    }
    out
}

/// Reads `control,mean` pairs back from a scaling-table CSV (preamble and
/// header tolerated).
pub fn read_scaling_csv(path: &Path) -> Result<ScalingTable> {
    let raw = fs::read_to_string(path)?;
    let body = strip_comment_preamble(&raw);
    let mut lines = body.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse {
        path: path.display().to_string(),
        message: "empty table".into(),
    })?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |name: &str| {
        columns.iter().position(|c| *c == name).ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            message: format!("missing column '{name}' in header '{header}'"),
        })
    };
    let control_idx = find("control")?;
    let mean_idx = find("mean")?;
    let stderr_idx = columns.iter().position(|c| *c == "stderr");
    let n_idx = columns.iter().position(|c| *c == "n_realizations");

    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parse = |idx: usize, what: &str| -> Result<f64> {
            fields
                .get(idx)
                .and_then(|f| f.parse::<f64>().ok())
                .ok_or_else(|| Error::Parse {
                    path: path.display().to_string(),
                    message: format!("line {}: bad {what} field", lineno + 2),
                })
        };
        let control = parse(control_idx, "control")?;
        let mean = parse(mean_idx, "mean")?;
        let std_error = stderr_idx
            .and_then(|i| fields.get(i))
            .filter(|f| !f.is_empty())
            .and_then(|f| f.parse::<f64>().ok());
        let n_realizations = n_idx
            .and_then(|i| fields.get(i))
            .and_then(|f| f.parse::<usize>().ok())
            .unwrap_or(1);
        rows.push(ScalingRow { control, mean, std_error, n_realizations });
    }
    Ok(ScalingTable { rows })
}

/// JSON body for a fit result.
pub fn fit_json(fit: &FitResult) -> String {
    let mut out = serde_json::to_string_pretty(&serde_json::json!({
        "a": fit.a,
        "b": fit.b,
        "rms_log_residual": fit.rms_log_residual,
    }))
    .expect("fit serialization cannot fail");
    out.push('\n');
    out
}

/// Flat `key = value` configuration file mirroring the flags one-to-one.
/// Lines starting with `#` are comments; keys use the long flag names
/// without the leading dashes.
pub fn parse_flat_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let raw = fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (lineno, line) in raw.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                path: path.display().to_string(),
                message: format!("line {}: expected 'key = value', got '{line}'", lineno + 1),
            });
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}
