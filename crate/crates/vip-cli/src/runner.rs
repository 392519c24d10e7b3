//! Experiment execution and trace comparison.

use crate::config::{Experiment, Mode};
use crate::report::{status_str, ConditionReportDto, SummaryReport, SweepEntry};
use crate::trace_io::{fmt_f64, read_trace, write_trace, TraceMeta};
use crate::{HarnessError, EXIT_BUDGET, EXIT_DIVERGED, EXIT_NOT_APPLICABLE, EXIT_OK};
use rayon::prelude::*;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;
use vip_core::schedules::check_conditions_with;
use vip_core::solver::{
    implicit_solve, oracle_solve, regularized_run, run_hpa, vip_residual, IterationTrace,
    SolverConfig, TerminalStatus,
};
use vip_core::space::{norm, Vector};

pub struct RunOutcome {
    pub summary: SummaryReport,
    pub exit_code: i32,
}

fn status_code(s: TerminalStatus) -> i32 {
    match s {
        TerminalStatus::Converged => EXIT_OK,
        TerminalStatus::MaxIter => EXIT_BUDGET,
        TerminalStatus::Diverged => EXIT_DIVERGED,
    }
}

fn out_dir(exp: &Experiment) -> Result<PathBuf, HarnessError> {
    let dir = exp
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(crate::io_err(&dir))?;
    Ok(dir)
}

fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(crate::io_err(path))
}

/// Distance to the independent oracle solution, when one is computable.
/// An explicitly configured `oracle_lambda` that fails is a config error;
/// failures of the default are reported as absence.
fn oracle_distance(
    exp: &Experiment,
    x: &Vector,
) -> Result<(Option<f64>, Option<Vector>), HarnessError> {
    match oracle_solve(&exp.problem, exp.oracle_lambda, exp.oracle_tol) {
        Ok(q) => Ok((Some(x.dist(&q)), Some(q))),
        Err(e) if exp.oracle_lambda.is_some() => Err(HarnessError::Config(format!(
            "oracle_lambda rejected: {e}"
        ))),
        Err(_) => Ok((None, None)),
    }
}

/// Executes an experiment in its configured mode, writing trace and summary
/// files into the output directory. Returns the summary and the process exit
/// code expressing the terminal status.
pub fn run_experiment(exp: &Experiment, strict: bool) -> Result<RunOutcome, HarnessError> {
    let started = Instant::now();
    let report = check_conditions_with(
        &exp.settings.alpha,
        &exp.settings.beta,
        &exp.settings.error,
        exp.check_options,
    );
    let report_dto = ConditionReportDto::from(&report);

    if !report.applicable {
        let iterating = matches!(
            exp.mode,
            Mode::Hpa | Mode::ImplicitSweep | Mode::RegularizationSweep
        );
        if strict && iterating {
            return Err(HarnessError::NotApplicable(
                "schedule conditions do not hold; rerun without --strict to proceed anyway".into(),
            ));
        }
        if iterating {
            eprintln!(
                "warning: schedule conditions do not guarantee convergence (applicable = false)"
            );
        }
    }

    let dir = out_dir(exp)?;
    let mut outputs: Vec<String> = Vec::new();
    let mut summary = SummaryReport {
        mode: match exp.mode {
            Mode::Hpa => "hpa",
            Mode::ImplicitSweep => "implicit-sweep",
            Mode::RegularizationSweep => "regularization-sweep",
            Mode::Oracle => "oracle",
            Mode::Validate => "validate",
        }
        .into(),
        problem_hash: exp.problem_hash.clone(),
        status: None,
        iterations: None,
        final_vip_residual: None,
        final_fix_residual: None,
        dist_oracle: None,
        dist_reference: None,
        solution: None,
        clamped_steps: None,
        condition_report: report_dto,
        sweep: None,
        wall_time_s: 0.0,
        outputs: Vec::new(),
    };

    let exit_code = match exp.mode {
        Mode::Validate => {
            if report.applicable {
                EXIT_OK
            } else {
                EXIT_NOT_APPLICABLE
            }
        }

        Mode::Hpa => {
            let cfg = SolverConfig::new(exp.problem.clone(), exp.settings.clone())?;
            let trace = run_hpa(&cfg)?;
            let final_x = trace.final_x().clone();

            let trace_path = dir.join(format!("{}.trace.csv", exp.stem));
            write_trace(
                &trace,
                &TraceMeta {
                    problem_hash: exp.problem_hash.clone(),
                    reference: exp
                        .settings
                        .reference
                        .as_ref()
                        .map(|r| r.as_slice().to_vec()),
                    label: exp.stem.clone(),
                },
                &trace_path,
            )?;
            outputs.push(trace_path.display().to_string());

            let (dist_oracle, _) = oracle_distance(exp, &final_x)?;
            summary.status = Some(status_str(trace.status()).into());
            summary.iterations = Some(trace.iterations());
            summary.final_vip_residual =
                Some(vip_residual(&exp.problem, &final_x, exp.oracle_lambda)?);
            summary.final_fix_residual = trace.records().last().map(|r| r.fix_residual);
            summary.dist_oracle = dist_oracle;
            summary.dist_reference = exp
                .settings
                .reference
                .as_ref()
                .map(|r| final_x.dist(r));
            summary.solution = Some(final_x.as_slice().to_vec());
            summary.clamped_steps = Some(trace.clamped_steps());
            status_code(trace.status())
        }

        Mode::Oracle => {
            let q = oracle_solve(&exp.problem, exp.oracle_lambda, exp.oracle_tol)?;
            summary.final_vip_residual = Some(vip_residual(&exp.problem, &q, exp.oracle_lambda)?);
            summary.dist_reference = exp.settings.reference.as_ref().map(|r| q.dist(r));
            summary.solution = Some(q.as_slice().to_vec());
            summary.status = Some("converged".into());
            EXIT_OK
        }

        Mode::ImplicitSweep => {
            let sweep = exp
                .implicit
                .as_ref()
                .expect("validated: implicit sweep has parameters");
            let (_, oracle_point) = oracle_distance(exp, &exp.settings.x0)?;
            let results: Vec<(f64, f64, Vector)> = sweep
                .t_values
                .par_iter()
                .enumerate()
                .map(|(i, &t)| {
                    let err_norm = sweep.error_coeff * t * t;
                    let e = if err_norm == 0.0 {
                        Vector::zeros(exp.problem.dim())
                    } else {
                        sweep.direction.unit_at(i, exp.problem.dim()).scale(err_norm)
                    };
                    implicit_solve(&exp.problem, t, &e, sweep.tol, None)
                        .map(|x| (t, err_norm, x))
                })
                .collect::<Result<Vec<_>, _>>()?;

            let csv_path = dir.join(format!("{}.implicit.csv", exp.stem));
            let mut csv = String::from("t,err_norm,norm,vip_residual,dist_oracle,dist_ref\n");
            let mut entries = Vec::new();
            for (t, err_norm, x_t) in &results {
                let res = vip_residual(&exp.problem, x_t, exp.oracle_lambda)?;
                let dist_oracle = oracle_point.as_ref().map(|q| x_t.dist(q));
                let dist_ref = exp.settings.reference.as_ref().map(|r| x_t.dist(r));
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    fmt_f64(*t),
                    fmt_f64(*err_norm),
                    fmt_f64(norm(x_t)),
                    fmt_f64(res),
                    dist_oracle.map(fmt_f64).unwrap_or_default(),
                    dist_ref.map(fmt_f64).unwrap_or_default(),
                ));
                entries.push(SweepEntry {
                    parameter: *t,
                    status: Some("converged".into()),
                    iterations: None,
                    vip_residual: Some(res),
                    dist_oracle,
                    dist_reference: dist_ref,
                    norm: Some(norm(x_t)),
                });
            }
            write_text(&csv_path, &csv)?;
            outputs.push(csv_path.display().to_string());
            summary.sweep = Some(entries);
            summary.status = Some("converged".into());
            EXIT_OK
        }

        Mode::RegularizationSweep => {
            let epsilons = exp
                .epsilons
                .as_ref()
                .expect("validated: regularization sweep has epsilons");
            let results: Vec<(vip_core::solver::RegularizationRecord, IterationTrace)> = epsilons
                .par_iter()
                .map(|&eps| regularized_run(&exp.problem, eps, &exp.settings))
                .collect::<Result<Vec<_>, _>>()?;

            let mut entries = Vec::new();
            let mut path_csv = String::from("epsilon,norm_q_eps,vip_eps_residual,dist_ref\n");
            let mut worst = EXIT_OK;
            for (i, (rec, trace)) in results.iter().enumerate() {
                let trace_path = dir.join(format!("{}.eps{}.trace.csv", exp.stem, i));
                write_trace(
                    trace,
                    &TraceMeta {
                        problem_hash: exp.problem_hash.clone(),
                        reference: exp
                            .settings
                            .reference
                            .as_ref()
                            .map(|r| r.as_slice().to_vec()),
                        label: format!("{}.eps{}", exp.stem, i),
                    },
                    &trace_path,
                )?;
                outputs.push(trace_path.display().to_string());
                let dist_ref = exp.settings.reference.as_ref().map(|r| rec.q_eps.dist(r));
                path_csv.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_f64(rec.epsilon),
                    fmt_f64(rec.norm_q_eps),
                    fmt_f64(rec.vip_eps_residual),
                    dist_ref.map(fmt_f64).unwrap_or_default(),
                ));
                entries.push(SweepEntry {
                    parameter: rec.epsilon,
                    status: Some(status_str(trace.status()).into()),
                    iterations: Some(trace.iterations()),
                    vip_residual: Some(rec.vip_eps_residual),
                    dist_oracle: None,
                    dist_reference: dist_ref,
                    norm: Some(rec.norm_q_eps),
                });
                worst = worst.max(status_code(trace.status()));
            }
            let path_file = dir.join(format!("{}.path.csv", exp.stem));
            write_text(&path_file, &path_csv)?;
            outputs.push(path_file.display().to_string());
            summary.sweep = Some(entries);
            summary.status = Some(
                match worst {
                    EXIT_OK => "converged",
                    EXIT_BUDGET => "max_iter",
                    _ => "diverged",
                }
                .into(),
            );
            worst
        }
    };

    summary.wall_time_s = started.elapsed().as_secs_f64();
    summary.outputs = outputs;
    let summary_path = dir.join(format!("{}.summary.json", exp.stem));
    write_text(&summary_path, &summary.to_json())?;

    Ok(RunOutcome { summary, exit_code })
}

/// Aligned distance-to-reference table across runs, one column per trace,
/// sampled once per iteration block.
pub struct Comparison {
    pub labels: Vec<String>,
    /// `(iteration, per-trace dist_ref at that iteration)`; shorter traces
    /// carry their terminal value forward.
    pub rows: Vec<(usize, Vec<f64>)>,
}

impl Comparison {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{:>10}", "n"));
        for l in &self.labels {
            out.push_str(&format!("  {:>24}", l));
        }
        out.push('\n');
        for (n, vals) in &self.rows {
            out.push_str(&format!("{n:>10}"));
            for v in vals {
                out.push_str(&format!("  {:>24}", format!("{v:.9e}")));
            }
            out.push('\n');
        }
        out
    }
}

/// Reads traces, checks they describe the same problem and reference point,
/// and tabulates distance-to-reference per iteration block in input order.
pub fn compare_runs(paths: &[PathBuf], blocks: usize) -> Result<Comparison, HarnessError> {
    if paths.is_empty() {
        return Err(HarnessError::Compare("no trace files given".into()));
    }
    let traces = paths
        .iter()
        .map(|p| read_trace(p))
        .collect::<Result<Vec<_>, _>>()?;
    let hash = &traces[0].meta.problem_hash;
    for t in &traces {
        if &t.meta.problem_hash != hash {
            return Err(HarnessError::Compare(format!(
                "mismatched problem hashes: {} has {}, {} has {}",
                traces[0].path.display(),
                hash,
                t.path.display(),
                t.meta.problem_hash
            )));
        }
        if t.meta.reference.is_none() {
            return Err(HarnessError::Compare(format!(
                "{}: trace has no reference point",
                t.path.display()
            )));
        }
        if t.rows.iter().any(|r| r.dist_ref.is_none()) {
            return Err(HarnessError::Compare(format!(
                "{}: rows missing dist_ref",
                t.path.display()
            )));
        }
    }

    let labels = traces
        .iter()
        .map(|t| {
            t.path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| t.path.display().to_string())
        })
        .collect();
    let max_n = traces.iter().map(|t| t.rows.len() - 1).max().unwrap_or(0);
    let blocks = blocks.max(1);
    let block_size = (max_n / blocks).max(1);
    let mut rows = Vec::new();
    let mut n = 0usize;
    loop {
        let vals = traces
            .iter()
            .map(|t| {
                let idx = n.min(t.rows.len() - 1);
                t.rows[idx].dist_ref.expect("checked above")
            })
            .collect();
        rows.push((n, vals));
        if n >= max_n {
            break;
        }
        n = (n + block_size).min(max_n);
    }
    Ok(Comparison { labels, rows })
}

/// Writes the rendered comparison to a writer (stdout in the CLI).
pub fn print_comparison(cmp: &Comparison, mut w: impl Write) -> std::io::Result<()> {
    w.write_all(cmp.render().as_bytes())
}
