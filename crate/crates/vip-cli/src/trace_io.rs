//! Trace files: CSV with the pinned header
//! `n,alpha,beta,err_norm,step_norm,fix_residual,dist_ref`
//! plus a JSON metadata sidecar (`<trace>.meta.json`) carrying the problem
//! hash and reference point used by `compare`.
//!
//! Floats are printed with 17 significant digits, which round-trips `f64`
//! exactly, so identical runs produce byte-identical files.

use crate::HarnessError;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};
use vip_core::solver::IterationTrace;

pub const TRACE_HEADER: &str = "n,alpha,beta,err_norm,step_norm,fix_residual,dist_ref";

/// 17 significant digits in scientific notation; deterministic and lossless.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub problem_hash: String,
    pub reference: Option<Vec<f64>>,
    pub label: String,
}

pub fn meta_path(trace: &Path) -> PathBuf {
    let mut os = trace.as_os_str().to_owned();
    os.push(".meta.json");
    PathBuf::from(os)
}

/// Writes the trace CSV and its metadata sidecar.
pub fn write_trace(trace: &IterationTrace, meta: &TraceMeta, path: &Path) -> Result<(), HarnessError> {
    let file = std::fs::File::create(path).map_err(crate::io_err(path))?;
    let mut out = std::io::BufWriter::new(file);
    let werr = |e: std::io::Error| HarnessError::Io {
        path: path.display().to_string(),
        source: e,
    };
    writeln!(out, "{TRACE_HEADER}").map_err(werr)?;
    for r in trace.records() {
        let dist = r.dist_ref.map(fmt_f64).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n,
            fmt_f64(r.alpha),
            fmt_f64(r.beta),
            fmt_f64(r.err_norm),
            fmt_f64(r.step_norm),
            fmt_f64(r.fix_residual),
            dist
        )
        .map_err(werr)?;
    }
    out.flush().map_err(werr)?;

    let meta_file = meta_path(path);
    let mut text = serde_json::to_string_pretty(meta)
        .map_err(|e| HarnessError::Config(format!("serialize meta: {e}")))?;
    text.push('\n');
    std::fs::write(&meta_file, text).map_err(crate::io_err(&meta_file))?;
    Ok(())
}

/// One parsed trace row (scalars only; iterates are not persisted).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub err_norm: f64,
    pub step_norm: f64,
    pub fix_residual: f64,
    pub dist_ref: Option<f64>,
}

pub struct LoadedTrace {
    pub rows: Vec<TraceRow>,
    pub meta: TraceMeta,
    pub path: PathBuf,
}

pub fn read_trace(path: &Path) -> Result<LoadedTrace, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(crate::io_err(path))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == TRACE_HEADER => {}
        other => {
            return Err(HarnessError::Compare(format!(
                "{}: not a trace file (header {:?})",
                path.display(),
                other
            )))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(HarnessError::Compare(format!(
                "{}: row {} has {} fields, expected 7",
                path.display(),
                i + 2,
                fields.len()
            )));
        }
        let num = |s: &str, what: &str| -> Result<f64, HarnessError> {
            s.parse::<f64>().map_err(|e| {
                HarnessError::Compare(format!("{}: bad {what} on row {}: {e}", path.display(), i + 2))
            })
        };
        rows.push(TraceRow {
            n: fields[0].parse().map_err(|e| {
                HarnessError::Compare(format!("{}: bad n on row {}: {e}", path.display(), i + 2))
            })?,
            alpha: num(fields[1], "alpha")?,
            beta: num(fields[2], "beta")?,
            err_norm: num(fields[3], "err_norm")?,
            step_norm: num(fields[4], "step_norm")?,
            fix_residual: num(fields[5], "fix_residual")?,
            dist_ref: if fields[6].is_empty() {
                None
            } else {
                Some(num(fields[6], "dist_ref")?)
            },
        });
    }
    let meta_file = meta_path(path);
    let meta_text = std::fs::read_to_string(&meta_file).map_err(crate::io_err(&meta_file))?;
    let meta: TraceMeta = serde_json::from_str(&meta_text)
        .map_err(|e| HarnessError::Compare(format!("{}: bad metadata: {e}", meta_file.display())))?;
    Ok(LoadedTrace {
        rows,
        meta,
        path: path.to_path_buf(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_round_trips_f64_exactly() {
        for x in [
            0.1,
            1.0 / 3.0,
            std::f64::consts::PI,
            1e-300,
            -2.5e17,
            f64::MIN_POSITIVE,
        ] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }
}
