//! Run summaries as JSON.

use serde::{Deserialize, Serialize};
use vip_core::schedules::{ConditionReport, Verdict};
use vip_core::solver::TerminalStatus;

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
        Verdict::Undecidable => "undecidable",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReportDto {
    pub c1: String,
    pub c2: String,
    pub c5: String,
    pub h1: String,
    pub h2: String,
    pub e_summable: String,
    pub e_relatively_small: String,
    pub applicable: bool,
}

impl From<&ConditionReport> for ConditionReportDto {
    fn from(r: &ConditionReport) -> Self {
        ConditionReportDto {
            c1: verdict_str(r.c1).into(),
            c2: verdict_str(r.c2).into(),
            c5: verdict_str(r.c5).into(),
            h1: verdict_str(r.h1).into(),
            h2: verdict_str(r.h2).into(),
            e_summable: verdict_str(r.e_summable).into(),
            e_relatively_small: verdict_str(r.e_relatively_small).into(),
            applicable: r.applicable,
        }
    }
}

pub fn status_str(s: TerminalStatus) -> &'static str {
    match s {
        TerminalStatus::Converged => "converged",
        TerminalStatus::MaxIter => "max_iter",
        TerminalStatus::Diverged => "diverged",
    }
}

/// Per-sweep-point entry (implicit or regularization sweeps).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    /// `t` for implicit sweeps, `epsilon` for regularization sweeps.
    pub parameter: f64,
    pub status: Option<String>,
    pub iterations: Option<usize>,
    pub vip_residual: Option<f64>,
    pub dist_oracle: Option<f64>,
    pub dist_reference: Option<f64>,
    pub norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub mode: String,
    pub problem_hash: String,
    pub status: Option<String>,
    pub iterations: Option<usize>,
    pub final_vip_residual: Option<f64>,
    pub final_fix_residual: Option<f64>,
    pub dist_oracle: Option<f64>,
    pub dist_reference: Option<f64>,
    /// Terminal iterate (hpa) or oracle point (oracle mode).
    pub solution: Option<Vec<f64>>,
    pub clamped_steps: Option<usize>,
    pub condition_report: ConditionReportDto,
    pub sweep: Option<Vec<SweepEntry>>,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
}

impl SummaryReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }
}
