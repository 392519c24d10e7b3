//! Harness around the solver library: experiment configs on disk, run
//! execution with trace/summary files, schedule validation, and run
//! comparison.
//!
//! One experiment per JSON file; sweeps are lists inside the file. Traces are
//! CSV with a pinned header and 17-significant-digit floats, so identical
//! config + seed reproduce byte-identical files.

// Validation guards are written `!(x > 0.0)` on purpose: the negation also
// rejects NaN, which `x <= 0.0` would wave through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;
pub mod runner;
pub mod trace_io;

use thiserror::Error;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;
pub const EXIT_NOT_APPLICABLE: i32 = 5;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Config file missing, unparsable, or violating an invariant.
    #[error("config error: {0}")]
    Config(String),

    /// Schedules fail the convergence conditions and strict mode refuses to
    /// run them.
    #[error("schedule conditions not applicable: {0}")]
    NotApplicable(String),

    /// Error bubbled up from the solver library.
    #[error("solver error: {0}")]
    Solver(#[from] vip_core::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    /// Trace files under comparison disagree on the problem they solve.
    #[error("trace comparison error: {0}")]
    Compare(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => EXIT_CONFIG,
            HarnessError::NotApplicable(_) => EXIT_NOT_APPLICABLE,
            HarnessError::Compare(_) => EXIT_CONFIG,
            HarnessError::Solver(_) => EXIT_INTERNAL,
            HarnessError::Io { .. } => EXIT_INTERNAL,
        }
    }
}

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}
