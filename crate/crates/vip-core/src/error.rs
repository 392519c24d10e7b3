use crate::space::Vector;
use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Two quantities that must live in the same space do not.
    #[error("dimension mismatch: expected dim {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A convex-set description violates one of its invariants.
    #[error("invalid set: {0}")]
    InvalidSet(String),

    /// An operator description violates one of its invariants.
    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    /// A schedule description violates one of its invariants.
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    /// A solver configuration violates one of its invariants.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A scalar argument is outside its admissible range.
    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    /// Dykstra's algorithm exhausted its cycle budget. Carries the last
    /// iterate so callers can inspect how far it got.
    #[error("intersection projection did not converge within {cycles} cycles (last cycle change {last_change:e})")]
    DykstraBudget {
        cycles: usize,
        last_change: f64,
        last: Vector,
    },

    /// A fixed-point iteration exceeded the budget implied by its certified
    /// contraction coefficient; this signals mis-certified constants.
    #[error("fixed-point iteration exceeded budget of {budget} steps (last step {last_step:e}); check the certified constants")]
    FixedPointBudget { budget: usize, last_step: f64 },

    /// The projected-gradient oracle observed growing steps, which the
    /// certified constants rule out.
    #[error("projected-gradient map is not contracting: {0}")]
    NotContracting(String),

    /// Every sampled pair was degenerate (x == y), so no ratio could be formed.
    #[error("all sampled pairs were degenerate")]
    DegenerateSamples,

    /// The instance has alpha == eta, where the main schemes do not apply.
    #[error("limit-case instance (alpha = eta): use the regularization path")]
    LimitCase,
}
