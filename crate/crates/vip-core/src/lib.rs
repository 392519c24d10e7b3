//! Solvers for variational inequality problems posed over the fixed-point set
//! of a nonexpansive mapping in a finite-dimensional real Hilbert space.
//!
//! The problem solved throughout is: given a closed convex set `Q`, a
//! nonexpansive mapping `T: Q -> Q` with fixed-point set `C = Fix(T)`, a
//! Lipschitz mapping `f` and a strongly monotone Lipschitz mapping `F`, find
//! `q` in `C` with
//!
//! ```text
//! <F(q) - f(q), x - q> >= 0   for all x in C.
//! ```
//!
//! The crate provides:
//!
//! * [`space`] — the ambient space `R^d`: vectors, inner product, norm.
//! * [`sets`] — projectable closed convex sets, including intersections via
//!   Dykstra's algorithm.
//! * [`operators`] — the mapping zoo (`T`, `f`, `F`) with analytically
//!   certified Lipschitz / strong-monotonicity constants and an empirical
//!   cross-checker.
//! * [`schedules`] — step-size, averaging, and perturbation schedules with an
//!   analytic checker for the convergence conditions they must satisfy.
//! * [`solver`] — the perturbed averaged iteration, its implicit variant, the
//!   Tikhonov regularization path for the degenerate case, and an independent
//!   projected-gradient oracle used to verify every run.

// Validation guards are written `!(x > 0.0)` on purpose: the negation also
// rejects NaN, which `x <= 0.0` would wave through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod operators;
pub mod schedules;
pub mod sets;
pub mod solver;
pub mod space;

mod error;

pub use error::Error;
pub use operators::{
    CertifyReport, LipschitzMap, Matrix, NonexpansiveMap, PairSampler, ProblemInstance,
    StrongMonotoneMap,
};
pub use schedules::{
    AlphaSchedule, BetaSchedule, CheckOptions, ConditionReport, DirectionRule, ErrorSchedule,
    TailRule, Verdict,
};
pub use sets::ConvexSet;
pub use solver::{
    IterationTrace, RegularizationRecord, RunSettings, SolverConfig, TerminalStatus, TraceRecord,
};
pub use space::Vector;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
