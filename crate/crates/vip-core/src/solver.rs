//! The iteration engines.
//!
//! All schemes are built from one map: for a step size `t`,
//!
//! ```text
//! S_t(x) = t f(x) + (I - t F) T x
//! ```
//!
//! which is Lipschitz with coefficient `1 - t sigma0` whenever
//! `t <= delta0 < delta0_star = 2 (eta - alpha) / kappa^2`, where
//! `sigma0 = eta - alpha - kappa^2 delta0 / 2 > 0`. The explicit scheme
//! averages `P_Q(S_{alpha_n}(x_n) + e_n)` with the previous iterate; the
//! implicit scheme finds the Banach fixed point of `x -> P_Q(S_t(x) + e)`;
//! the regularization path replaces `F` by `F + eps I` when `alpha = eta`
//! and follows the solutions as `eps` shrinks.
//!
//! [`oracle_solve`] is an independent projected-gradient iteration on
//! `g = F - f` over `C = Fix(T)`; it shares nothing with the schemes above
//! beyond the projection primitives and provides the ground truth that every
//! run is checked against.

use crate::operators::{LipschitzMap, NonexpansiveMap, ProblemInstance, StrongMonotoneMap};
use crate::schedules::{AlphaSchedule, BetaSchedule, ErrorSchedule};
use crate::sets::ConvexSet;
use crate::space::{norm, Vector};
use crate::{Error, Result};

/// `delta0_star = 2 (eta - alpha) / kappa^2`, the open upper bound for
/// admissible `delta0`. Fails on a limit-case instance (`alpha = eta`),
/// which must go through the regularization path instead.
pub fn delta0_star(p: &ProblemInstance) -> Result<f64> {
    let gap = p.eta() - p.alpha();
    if !(gap > 0.0) {
        return Err(Error::LimitCase);
    }
    Ok(2.0 * gap / (p.kappa() * p.kappa()))
}

/// `sigma0 = eta - alpha - kappa^2 delta0 / 2`, the contraction margin for
/// step sizes up to `delta0`. Requires `0 < delta0 < delta0_star` strictly;
/// at the boundary the margin degenerates to zero.
pub fn sigma0(p: &ProblemInstance, delta0: f64) -> Result<f64> {
    let upper = delta0_star(p)?;
    if !(delta0 > 0.0 && delta0 < upper) {
        return Err(Error::OutOfRange(format!(
            "delta0 must lie in (0, {upper}), got {delta0}"
        )));
    }
    Ok(p.eta() - p.alpha() - p.kappa() * p.kappa() * delta0 / 2.0)
}

/// `S_t(x) = t f(x) + T x - t F(T x)`.
pub fn st_apply(p: &ProblemInstance, t: f64, x: &Vector) -> Result<Vector> {
    let upper = delta0_star(p)?;
    if !(t > 0.0 && t < upper) {
        return Err(Error::OutOfRange(format!(
            "step size t must lie in (0, {upper}), got {t}"
        )));
    }
    let tx = p.mapping().apply(x)?;
    let fx = p.viscosity().apply(x)?;
    let ftx = p.monotone().apply(&tx)?;
    Ok(tx.axpy(t, &(&fx - &ftx)))
}

/// One explicit step:
/// `x_{n+1} = beta_n x_n + (1 - beta_n) P_Q(S_{alpha_n}(x_n) + e_n)`.
pub fn hpa_step(
    p: &ProblemInstance,
    alpha_n: f64,
    beta_n: f64,
    e_n: &Vector,
    x_n: &Vector,
) -> Result<Vector> {
    if !(0.0..=1.0).contains(&beta_n) {
        return Err(Error::OutOfRange(format!(
            "averaging weight must lie in [0, 1], got {beta_n}"
        )));
    }
    let s = st_apply(p, alpha_n, x_n)?;
    let z = p.constraint().project(&(&s + e_n))?;
    Ok(x_n.scale(beta_n).axpy(1.0 - beta_n, &z))
}

/// Scheduling and budget parameters for a run, independent of the problem.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub alpha: AlphaSchedule,
    pub beta: BetaSchedule,
    pub error: ErrorSchedule,
    pub x0: Vector,
    pub max_iter: usize,
    pub stop_tol: f64,
    /// Contraction margin knob; `None` selects `delta0_star / 2`, balancing
    /// the margin `sigma0 = (eta - alpha) / 2` against step admissibility.
    pub delta0: Option<f64>,
    /// Optional reference point; when present, every trace record carries its
    /// distance to it.
    pub reference: Option<Vector>,
}

/// A validated problem + settings pair, ready to run.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    problem: ProblemInstance,
    settings: RunSettings,
    delta0: f64,
    sigma0: f64,
}

impl SolverConfig {
    pub fn new(problem: ProblemInstance, settings: RunSettings) -> Result<Self> {
        if problem.limit_case() {
            return Err(Error::LimitCase);
        }
        let upper = delta0_star(&problem)?;
        let delta0 = match settings.delta0 {
            None => upper / 2.0,
            Some(d) => {
                if !(d > 0.0 && d < upper) {
                    return Err(Error::InvalidConfig(format!(
                        "delta0 out of range: must lie strictly inside (0, {upper}), got {d}"
                    )));
                }
                d
            }
        };
        let sigma0 = sigma0(&problem, delta0)?;
        if settings.x0.dim() != problem.dim() {
            return Err(Error::DimensionMismatch {
                expected: problem.dim(),
                found: settings.x0.dim(),
            });
        }
        if !settings.x0.is_finite() {
            return Err(Error::InvalidConfig("x0 must be finite".into()));
        }
        if !problem.constraint().contains(&settings.x0, 1e-10)? {
            return Err(Error::InvalidConfig(
                "x0 must lie in Q (within 1e-10)".into(),
            ));
        }
        if !(settings.stop_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "stop_tol must be positive, got {}",
                settings.stop_tol
            )));
        }
        if settings.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if let Some(r) = &settings.reference {
            if r.dim() != problem.dim() {
                return Err(Error::DimensionMismatch {
                    expected: problem.dim(),
                    found: r.dim(),
                });
            }
        }
        Ok(SolverConfig {
            problem,
            settings,
            delta0,
            sigma0,
        })
    }

    pub fn problem(&self) -> &ProblemInstance {
        &self.problem
    }

    pub fn settings(&self) -> &RunSettings {
        &self.settings
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalStatus {
    /// Both stopping tests passed: `||x_{n+1} - x_n|| <= stop_tol * alpha_n`
    /// and `||x - Tx|| <= stop_tol`.
    Converged,
    /// The iteration budget ran out first.
    MaxIter,
    /// A non-finite coordinate appeared; the trace retains the last finite
    /// iterate.
    Diverged,
}

/// One row of a run trace, describing iterate `x_n`. `step_norm` is the
/// outgoing step `||x_{n+1} - x_n||` (zero on the terminal row).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub n: usize,
    pub x: Vector,
    pub alpha: f64,
    pub beta: f64,
    pub err_norm: f64,
    pub step_norm: f64,
    pub fix_residual: f64,
    pub dist_ref: Option<f64>,
}

/// Complete, deterministic record of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    records: Vec<TraceRecord>,
    status: TerminalStatus,
    clamped_steps: usize,
}

impl IterationTrace {
    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn status(&self) -> TerminalStatus {
        self.status
    }

    /// How many steps had their scheduled `alpha_n` clamped down to `delta0`.
    pub fn clamped_steps(&self) -> usize {
        self.clamped_steps
    }

    /// The terminal (last finite) iterate.
    pub fn final_x(&self) -> &Vector {
        &self.records.last().expect("trace always has records").x
    }

    pub fn iterations(&self) -> usize {
        self.records.len() - 1
    }
}

/// Runs the explicit perturbed scheme to the stopping rule or the budget.
///
/// Scheduled step sizes above `delta0` are clamped down to it (the clamp
/// count lands in the trace). The run proceeds even when the schedule checker
/// reports the convergence conditions unmet; demonstrating what happens then
/// is a supported use.
pub fn run_hpa(cfg: &SolverConfig) -> Result<IterationTrace> {
    let p = cfg.problem();
    let s = cfg.settings();
    let dim = p.dim();
    let dist_ref = |x: &Vector| s.reference.as_ref().map(|r| x.dist(r));

    let mut records: Vec<TraceRecord> = Vec::new();
    let mut clamped_steps = 0usize;
    let mut x = s.x0.clone();
    let mut fix_res = p.mapping().fix_residual(&x)?;
    let mut status = TerminalStatus::MaxIter;
    let mut terminal_n = s.max_iter;

    for n in 0..s.max_iter {
        let scheduled = s.alpha.at(n);
        let alpha_n = if scheduled > cfg.delta0 {
            clamped_steps += 1;
            cfg.delta0
        } else {
            scheduled
        };
        let beta_n = s.beta.at(n);
        let e_n = s.error.at(n, &s.alpha, dim);
        let err_norm = norm(&e_n);

        let x_next = hpa_step(p, alpha_n, beta_n, &e_n, &x)?;
        if !x_next.is_finite() {
            records.push(TraceRecord {
                n,
                x: x.clone(),
                alpha: alpha_n,
                beta: beta_n,
                err_norm,
                step_norm: 0.0,
                fix_residual: fix_res,
                dist_ref: dist_ref(&x),
            });
            return Ok(IterationTrace {
                records,
                status: TerminalStatus::Diverged,
                clamped_steps,
            });
        }

        let step_norm = x_next.dist(&x);
        records.push(TraceRecord {
            n,
            x: x.clone(),
            alpha: alpha_n,
            beta: beta_n,
            err_norm,
            step_norm,
            fix_residual: fix_res,
            dist_ref: dist_ref(&x),
        });

        let fix_res_next = p.mapping().fix_residual(&x_next)?;
        x = x_next;
        fix_res = fix_res_next;

        // The step test is scaled by alpha_n: far from the solution the steps
        // already shrink like the step sizes, so an unscaled test would
        // trigger spuriously once alpha_n is small.
        if step_norm <= s.stop_tol * alpha_n && fix_res <= s.stop_tol {
            status = TerminalStatus::Converged;
            terminal_n = n + 1;
            break;
        }
    }

    let terminal_alpha = s.alpha.at(terminal_n).min(cfg.delta0);
    records.push(TraceRecord {
        n: terminal_n,
        x: x.clone(),
        alpha: terminal_alpha,
        beta: s.beta.at(terminal_n),
        err_norm: s.error.norm_at(terminal_n, &s.alpha),
        step_norm: 0.0,
        fix_residual: fix_res,
        dist_ref: dist_ref(&x),
    });
    Ok(IterationTrace {
        records,
        status,
        clamped_steps,
    })
}

/// Smallest step that double precision can still resolve around `x`; used as
/// a floor under contraction stopping thresholds so that iterations whose
/// analytic threshold sits below one ulp still terminate (the a-posteriori
/// error bound stays far below the caller's tolerance in that regime).
fn float_step_floor(x: &Vector) -> f64 {
    4.0 * f64::EPSILON * (1.0 + norm(x))
}

/// Solves the implicit relation `x_t = P_Q(t f(x_t) + (I - t F) T x_t + e)`
/// by Banach fixed-point iteration.
///
/// The map is a contraction with coefficient `1 - t sigma` where
/// `sigma = eta - alpha - kappa^2 t / 2`, so stopping once the step falls
/// under `tol * t sigma / (1 - t sigma)` guarantees `||x - x_t|| <= tol`;
/// the result is independent of `x_init` up to that tolerance. `x_init`
/// defaults to `P_Q(0)`.
pub fn implicit_solve(
    p: &ProblemInstance,
    t: f64,
    e: &Vector,
    tol: f64,
    x_init: Option<&Vector>,
) -> Result<Vector> {
    let upper = delta0_star(p)?;
    if !(t > 0.0 && t < upper) {
        return Err(Error::OutOfRange(format!(
            "step size t must lie in (0, {upper}), got {t}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::OutOfRange(format!("tol must be positive, got {tol}")));
    }
    if e.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: e.dim(),
        });
    }
    // Tightest admissible margin: the contraction bound with delta0 := t.
    let sigma = p.eta() - p.alpha() - p.kappa() * p.kappa() * t / 2.0;
    let contraction = 1.0 - t * sigma;
    let threshold = tol * t * sigma / contraction;

    let mut x = match x_init {
        Some(x0) => p.constraint().project(x0)?,
        None => p.constraint().project(&Vector::zeros(p.dim()))?,
    };

    let mut budget: Option<usize> = None;
    let mut iter = 0usize;
    loop {
        let next = p.constraint().project(&(&st_apply(p, t, &x)? + e))?;
        let step = next.dist(&x);
        x = next;
        iter += 1;
        if step <= threshold.max(float_step_floor(&x)) {
            return Ok(x);
        }
        let cap = *budget.get_or_insert_with(|| {
            // A-priori count from the contraction coefficient, with margin;
            // exceeding it means the certified constants cannot be right.
            let target = threshold.max(float_step_floor(&x));
            let count = (target / step).ln() / contraction.ln();
            (count.max(1.0).ceil() as usize).saturating_mul(2) + 64
        });
        if iter > cap {
            return Err(Error::FixedPointBudget {
                budget: cap,
                last_step: step,
            });
        }
    }
}

/// One point of the regularization path.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizationRecord {
    pub epsilon: f64,
    pub q_eps: Vector,
    pub norm_q_eps: f64,
    /// Natural-map residual of `q_eps` for the regularized problem
    /// (`F` replaced by `F + eps I`).
    pub vip_eps_residual: f64,
}

/// Runs the explicit scheme on the regularized instance `F + eps I`, which is
/// `(eta + eps)`-strongly monotone and `(kappa + eps)`-Lipschitz, restoring
/// the strict regime when `alpha = eta`.
pub fn regularized_run(
    p: &ProblemInstance,
    eps: f64,
    settings: &RunSettings,
) -> Result<(RegularizationRecord, IterationTrace)> {
    if !p.limit_case() {
        return Err(Error::InvalidConfig(
            "regularized_run expects a limit-case instance; strict instances run directly".into(),
        ));
    }
    let augmented = p.regularized(eps)?;
    let cfg = SolverConfig::new(augmented, settings.clone())?;
    let trace = run_hpa(&cfg)?;
    let q_eps = trace.final_x().clone();
    let vip_eps_residual = vip_residual(cfg.problem(), &q_eps, None)?;
    Ok((
        RegularizationRecord {
            epsilon: eps,
            norm_q_eps: norm(&q_eps),
            vip_eps_residual,
            q_eps,
        },
        trace,
    ))
}

/// Follows the regularization path along a strictly decreasing list of
/// epsilons. As `eps -> 0` the points approach the minimal-norm solution of
/// the underlying problem.
pub fn regularization_path(
    p: &ProblemInstance,
    epsilons: &[f64],
    settings: &RunSettings,
) -> Result<Vec<(RegularizationRecord, IterationTrace)>> {
    if epsilons.is_empty() {
        return Err(Error::OutOfRange("epsilon list must be nonempty".into()));
    }
    for w in epsilons.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::OutOfRange(
                "epsilon list must be strictly decreasing".into(),
            ));
        }
    }
    if !(epsilons[epsilons.len() - 1] > 0.0) {
        return Err(Error::OutOfRange("epsilons must be positive".into()));
    }
    epsilons
        .iter()
        .map(|&eps| regularized_run(p, eps, settings))
        .collect()
}

fn default_gradient_step(p: &ProblemInstance) -> Result<f64> {
    let gap = p.eta() - p.alpha();
    if !(gap > 0.0) {
        return Err(Error::LimitCase);
    }
    let kappa_g = p.kappa() + p.alpha();
    Ok(gap / (kappa_g * kappa_g))
}

/// Independent ground truth: projected-gradient iteration
/// `q <- P_C(q - lambda g(q))` on `g = F - f` over `C = Fix(T)`.
///
/// For `0 < lambda < 2 (eta - alpha) / (kappa + alpha)^2` the map is a
/// contraction, so the fixed point is the unique solution and the returned
/// point is within `tol` of it. `lambda` defaults to the midpoint-safe
/// `(eta - alpha) / (kappa + alpha)^2`.
pub fn oracle_solve(p: &ProblemInstance, lambda: Option<f64>, tol: f64) -> Result<Vector> {
    let gap = p.eta() - p.alpha();
    if !(gap > 0.0) {
        return Err(Error::LimitCase);
    }
    if !(tol > 0.0) {
        return Err(Error::OutOfRange(format!("tol must be positive, got {tol}")));
    }
    let kappa_g = p.kappa() + p.alpha();
    let lambda = match lambda {
        None => default_gradient_step(p)?,
        Some(l) => l,
    };
    let lambda_max = 2.0 * gap / (kappa_g * kappa_g);
    if !(lambda > 0.0 && lambda < lambda_max) {
        return Err(Error::OutOfRange(format!(
            "gradient step must lie in (0, {lambda_max}), got {lambda}"
        )));
    }
    // Contraction modulus of (I - lambda g) for strongly monotone Lipschitz g.
    let modulus = (1.0 - 2.0 * lambda * gap + lambda * lambda * kappa_g * kappa_g)
        .max(0.0)
        .sqrt();
    // Stopping at half the a-posteriori target keeps the natural-map residual
    // of the result within 2 tol even with projection round-off on top of
    // the fixed-point error.
    let threshold = if modulus > 0.0 {
        0.5 * tol * (1.0 - modulus) / modulus
    } else {
        0.5 * tol
    };

    let c = p.fix_set();
    let mut x = c.project(&Vector::zeros(p.dim()))?;
    let mut prev_step = f64::INFINITY;
    let mut growth_streak = 0usize;
    let mut budget: Option<usize> = None;
    let mut iter = 0usize;
    loop {
        let next = c.project(&x.axpy(-lambda, &p.g_at(&x)?))?;
        let step = next.dist(&x);
        x = next;
        iter += 1;
        if step <= threshold.max(float_step_floor(&x)) {
            return Ok(x);
        }
        // Certified constants guarantee per-step contraction; persistent
        // macroscopic growth therefore means lambda or the constants are bad.
        // Checked only well above the projection noise scale.
        if step > prev_step && step > (threshold * 1e3).max(1e-9) {
            growth_streak += 1;
            if growth_streak >= 8 {
                return Err(Error::NotContracting(format!(
                    "step grew for {growth_streak} consecutive iterations (latest {step:e})"
                )));
            }
        } else {
            growth_streak = 0;
        }
        prev_step = step;
        let cap = *budget.get_or_insert_with(|| {
            let target = threshold.max(float_step_floor(&x));
            let count = (target / step).ln() / modulus.ln();
            (count.max(1.0).ceil() as usize).saturating_mul(2) + 64
        });
        if iter > cap {
            return Err(Error::FixedPointBudget {
                budget: cap,
                last_step: step,
            });
        }
    }
}

/// Natural-map residual `||q - P_C(q - lambda g(q))||`; zero exactly at
/// solutions of the variational inequality. `lambda` defaults as in
/// [`oracle_solve`] (so it must be supplied explicitly for limit-case
/// instances, where no default exists).
pub fn vip_residual(p: &ProblemInstance, q: &Vector, lambda: Option<f64>) -> Result<f64> {
    let lambda = match lambda {
        None => default_gradient_step(p)?,
        Some(l) => {
            if !(l > 0.0) {
                return Err(Error::OutOfRange(format!(
                    "lambda must be positive, got {l}"
                )));
            }
            l
        }
    };
    let c = p.fix_set();
    let moved = c.project(&q.axpy(-lambda, &p.g_at(q)?))?;
    Ok(q.dist(&moved))
}

/// Builders for the classical special cases the general scheme contains.
pub mod classic {
    use super::*;

    /// Halpern iteration data: constant anchor `u`, `F = I`, no constraint.
    /// The solution is `P_C(u)` for `C = Fix(T)`.
    pub fn halpern(u: Vector, t: NonexpansiveMap) -> Result<ProblemInstance> {
        let dim = t.dim();
        ProblemInstance::new(
            ConvexSet::whole_space(dim),
            t,
            LipschitzMap::constant(u),
            StrongMonotoneMap::identity(dim),
            false,
        )
    }

    /// Viscosity approximation data: contraction `f`, `F = I`, no constraint.
    pub fn viscosity(f: LipschitzMap, t: NonexpansiveMap) -> Result<ProblemInstance> {
        let dim = t.dim();
        ProblemInstance::new(
            ConvexSet::whole_space(dim),
            t,
            f,
            StrongMonotoneMap::identity(dim),
            false,
        )
    }

    /// Hybrid steepest descent data: `f = 0`, steering operator `F`, no
    /// constraint.
    pub fn hybrid_steepest_descent(
        big_f: StrongMonotoneMap,
        t: NonexpansiveMap,
    ) -> Result<ProblemInstance> {
        let dim = t.dim();
        ProblemInstance::new(
            ConvexSet::whole_space(dim),
            t,
            LipschitzMap::zero(dim),
            big_f,
            false,
        )
    }

    /// The fully general constrained form.
    pub fn constrained(
        q: ConvexSet,
        t: NonexpansiveMap,
        f: LipschitzMap,
        big_f: StrongMonotoneMap,
    ) -> Result<ProblemInstance> {
        ProblemInstance::new(q, t, f, big_f, false)
    }
}
