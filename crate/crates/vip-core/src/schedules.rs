//! Step-size, averaging, and perturbation schedules, together with an
//! analytic checker for the asymptotic conditions the convergence theory
//! places on them:
//!
//! * `C1`: `alpha_n -> 0`
//! * `C2`: `sum alpha_n = +inf`
//! * `C5`: `(alpha_{n+1} - alpha_n) / alpha_n -> 0` or `sum |alpha_{n+1} - alpha_n| < inf`
//! * `h1`: `0 < liminf beta_n <= limsup beta_n < 1`
//! * `h2`: `limsup beta_n < 1`, a vanishing/summable beta increment, and the
//!   `C5` step-size condition
//! * perturbations: `sum ||e_n|| < inf` or `||e_n|| / alpha_n -> 0`
//!
//! Verdicts are decided per variant from the closed-form term laws, never
//! guessed from finite data: custom tabulated schedules always report
//! [`Verdict::Undecidable`].

use crate::space::Vector;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Continuation rule for tabulated schedules past the end of the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailRule {
    /// Repeat the last table entry forever.
    HoldLast,
    /// Cycle through the table from the start.
    Cycle,
}

fn table_value(values: &[f64], tail: TailRule, n: usize) -> f64 {
    if n < values.len() {
        values[n]
    } else {
        match tail {
            TailRule::HoldLast => *values.last().expect("validated nonempty"),
            TailRule::Cycle => values[n % values.len()],
        }
    }
}

/// Step-size schedule `{alpha_n}`, values in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaSchedule {
    /// `alpha_n = a / (n + 1)^theta`, `a > 0`, `theta` in `(0, 1]`.
    PowerLaw { a: f64, theta: f64 },
    /// `alpha_n = a * rho^n`, `a > 0`, `rho` in `(0, 1)`.
    Geometric { a: f64, rho: f64 },
    /// `alpha_n = a`, `a` in `(0, 1]`.
    Constant { a: f64 },
    /// Finite table plus tail rule; conditions are undecidable.
    Custom { values: Vec<f64>, tail: TailRule },
}

impl AlphaSchedule {
    pub fn power_law(a: f64, theta: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidSchedule(format!("power law needs a > 0, got {a}")));
        }
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::InvalidSchedule(format!(
                "power law needs theta in (0, 1], got {theta}"
            )));
        }
        Ok(AlphaSchedule::PowerLaw { a, theta })
    }

    pub fn geometric(a: f64, rho: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidSchedule(format!("geometric needs a > 0, got {a}")));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidSchedule(format!(
                "geometric needs rho in (0, 1), got {rho}"
            )));
        }
        Ok(AlphaSchedule::Geometric { a, rho })
    }

    pub fn constant(a: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::InvalidSchedule(format!(
                "constant step size must lie in (0, 1], got {a}"
            )));
        }
        Ok(AlphaSchedule::Constant { a })
    }

    pub fn custom(values: Vec<f64>, tail: TailRule) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSchedule("custom table must be nonempty".into()));
        }
        for (n, &v) in values.iter().enumerate() {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidSchedule(format!(
                    "custom step size at n = {n} must lie in (0, 1], got {v}"
                )));
            }
        }
        Ok(AlphaSchedule::Custom { values, tail })
    }

    /// The `n`-th term, clamped into `(0, 1]`: values above 1 clamp to 1 and
    /// geometric underflow is floored at the smallest positive normal so the
    /// term never degenerates to zero.
    pub fn at(&self, n: usize) -> f64 {
        let raw = match self {
            AlphaSchedule::PowerLaw { a, theta } => a / ((n + 1) as f64).powf(*theta),
            AlphaSchedule::Geometric { a, rho } => a * rho.powi(n as i32),
            AlphaSchedule::Constant { a } => *a,
            AlphaSchedule::Custom { values, tail } => table_value(values, *tail, n),
        };
        raw.clamp(f64::MIN_POSITIVE, 1.0)
    }
}

/// Averaging schedule `{beta_n}`, values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum BetaSchedule {
    /// `beta_n = b`, `b` in `[0, 1)`.
    Constant { b: f64 },
    /// `beta_n = b / (n + 1)^gamma`, `b` in `[0, 1)`, `gamma >= 0`.
    PowerDecay { b: f64, gamma: f64 },
    /// Finite table plus tail rule; conditions are undecidable.
    Custom { values: Vec<f64>, tail: TailRule },
}

impl BetaSchedule {
    pub fn constant(b: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&b) {
            return Err(Error::InvalidSchedule(format!(
                "constant averaging weight must lie in [0, 1), got {b}"
            )));
        }
        Ok(BetaSchedule::Constant { b })
    }

    pub fn power_decay(b: f64, gamma: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&b) {
            return Err(Error::InvalidSchedule(format!(
                "power-decay weight must lie in [0, 1), got {b}"
            )));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidSchedule(format!(
                "power-decay exponent must be >= 0, got {gamma}"
            )));
        }
        Ok(BetaSchedule::PowerDecay { b, gamma })
    }

    pub fn custom(values: Vec<f64>, tail: TailRule) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSchedule("custom table must be nonempty".into()));
        }
        for (n, &v) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidSchedule(format!(
                    "custom averaging weight at n = {n} must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(BetaSchedule::Custom { values, tail })
    }

    /// The `n`-th term, clamped into `[0, 1]`.
    pub fn at(&self, n: usize) -> f64 {
        let raw = match self {
            BetaSchedule::Constant { b } => *b,
            BetaSchedule::PowerDecay { b, gamma } => b / ((n + 1) as f64).powf(*gamma),
            BetaSchedule::Custom { values, tail } => table_value(values, *tail, n),
        };
        raw.clamp(0.0, 1.0)
    }
}

/// Direction rule for perturbation vectors: the norm law fixes `||e_n||`,
/// the direction rule fixes `e_n / ||e_n||`.
#[derive(Debug, Clone, PartialEq)]
pub enum DirectionRule {
    /// A fixed unit direction (normalized at construction).
    Fixed { unit: Vector },
    /// Per-index unit direction from a seeded ChaCha8 stream; independent of
    /// evaluation order, so traces are reproducible bit for bit.
    Seeded { seed: u64 },
}

impl DirectionRule {
    pub fn fixed(direction: Vector) -> Result<Self> {
        match direction.normalized() {
            Some(unit) => Ok(DirectionRule::Fixed { unit }),
            None => Err(Error::InvalidSchedule(
                "fixed perturbation direction must be nonzero".into(),
            )),
        }
    }

    pub fn seeded(seed: u64) -> Self {
        DirectionRule::Seeded { seed }
    }

    /// The unit direction for index `n` in dimension `dim`.
    pub fn unit_at(&self, n: usize, dim: usize) -> Vector {
        match self {
            DirectionRule::Fixed { unit } => {
                assert_eq!(unit.dim(), dim, "direction dimension mismatch");
                unit.clone()
            }
            DirectionRule::Seeded { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(n as u64 + 1);
                let raw = Vector::new(
                    (0..dim)
                        .map(|_| rng.sample::<f64, _>(StandardNormal))
                        .collect(),
                );
                raw.normalized().unwrap_or_else(|| Vector::basis(dim, 0))
            }
        }
    }
}

/// Perturbation schedule `{e_n}`.
#[derive(Debug, Clone, PartialEq)]
pub enum ErrorSchedule {
    /// `e_n = 0`.
    Zero,
    /// `||e_n|| = c * rho^n`, a summable law.
    Summable {
        c: f64,
        rho: f64,
        direction: DirectionRule,
    },
    /// `||e_n|| = c * alpha_n / (n + 1)`, vanishing relative to the step size.
    RelativelySmall { c: f64, direction: DirectionRule },
    /// Finite table of norms plus tail rule; conditions are undecidable.
    Custom {
        norms: Vec<f64>,
        tail: TailRule,
        direction: DirectionRule,
    },
}

impl ErrorSchedule {
    pub fn zero() -> Self {
        ErrorSchedule::Zero
    }

    pub fn summable(c: f64, rho: f64, direction: DirectionRule) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::InvalidSchedule(format!(
                "summable perturbation needs c >= 0, got {c}"
            )));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidSchedule(format!(
                "summable perturbation needs rho in (0, 1), got {rho}"
            )));
        }
        Ok(ErrorSchedule::Summable { c, rho, direction })
    }

    pub fn relatively_small(c: f64, direction: DirectionRule) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::InvalidSchedule(format!(
                "relatively-small perturbation needs c >= 0, got {c}"
            )));
        }
        Ok(ErrorSchedule::RelativelySmall { c, direction })
    }

    pub fn custom(norms: Vec<f64>, tail: TailRule, direction: DirectionRule) -> Result<Self> {
        if norms.is_empty() {
            return Err(Error::InvalidSchedule("custom table must be nonempty".into()));
        }
        for (n, &v) in norms.iter().enumerate() {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidSchedule(format!(
                    "custom perturbation norm at n = {n} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(ErrorSchedule::Custom {
            norms,
            tail,
            direction,
        })
    }

    /// The prescribed norm `||e_n||`; the relatively-small law reads
    /// `alpha_n` off the step-size schedule.
    pub fn norm_at(&self, n: usize, alpha: &AlphaSchedule) -> f64 {
        match self {
            ErrorSchedule::Zero => 0.0,
            ErrorSchedule::Summable { c, rho, .. } => c * rho.powi(n as i32),
            ErrorSchedule::RelativelySmall { c, .. } => c * alpha.at(n) / ((n + 1) as f64),
            ErrorSchedule::Custom { norms, tail, .. } => table_value(norms, *tail, n),
        }
    }

    /// The perturbation vector `e_n`.
    pub fn at(&self, n: usize, alpha: &AlphaSchedule, dim: usize) -> Vector {
        let law = self.norm_at(n, alpha);
        if law == 0.0 {
            return Vector::zeros(dim);
        }
        let direction = match self {
            ErrorSchedule::Zero => unreachable!("zero law handled above"),
            ErrorSchedule::Summable { direction, .. }
            | ErrorSchedule::RelativelySmall { direction, .. }
            | ErrorSchedule::Custom { direction, .. } => direction,
        };
        direction.unit_at(n, dim).scale(law)
    }
}

/// Analytic verdict on an asymptotic condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Undecidable,
}

impl Verdict {
    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }

    fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fails, _) | (_, Fails) => Fails,
            (Undecidable, _) | (_, Undecidable) => Undecidable,
            (Holds, Holds) => Holds,
        }
    }

    fn or(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Holds, _) | (_, Holds) => Holds,
            (Undecidable, _) | (_, Undecidable) => Undecidable,
            (Fails, Fails) => Fails,
        }
    }
}

/// Options for the condition checker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CheckOptions {
    /// Replace the step-size part of `h2` by the literal ratio condition
    /// `(alpha_{n+1} - alpha_n) / alpha_n -> 1`. Off by default: the
    /// vanishing-ratio form is the one every classical scheme satisfies, and
    /// no shipped schedule family can meet the `-> 1` variant.
    pub h2_ratio_to_one: bool,
}

/// Per-condition verdicts plus the combined applicability flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    pub c1: Verdict,
    pub c2: Verdict,
    pub c5: Verdict,
    pub h1: Verdict,
    pub h2: Verdict,
    pub e_summable: Verdict,
    pub e_relatively_small: Verdict,
    /// `(c1 and c2) and (h1 or h2) and (e_summable or e_relatively_small)`,
    /// all holding.
    pub applicable: bool,
}

/// Decides the convergence conditions for a schedule triple analytically.
pub fn check_conditions(
    alpha: &AlphaSchedule,
    beta: &BetaSchedule,
    err: &ErrorSchedule,
) -> ConditionReport {
    check_conditions_with(alpha, beta, err, CheckOptions::default())
}

pub fn check_conditions_with(
    alpha: &AlphaSchedule,
    beta: &BetaSchedule,
    err: &ErrorSchedule,
    opts: CheckOptions,
) -> ConditionReport {
    use Verdict::*;

    // C1: alpha_n -> 0.
    let c1 = match alpha {
        AlphaSchedule::PowerLaw { .. } | AlphaSchedule::Geometric { .. } => Holds,
        AlphaSchedule::Constant { .. } => Fails,
        AlphaSchedule::Custom { .. } => Undecidable,
    };

    // C2: sum alpha_n diverges. Power laws with theta <= 1 diverge, geometric
    // series sum, positive constants diverge.
    let c2 = match alpha {
        AlphaSchedule::PowerLaw { .. } => Holds,
        AlphaSchedule::Geometric { .. } => Fails,
        AlphaSchedule::Constant { .. } => Holds,
        AlphaSchedule::Custom { .. } => Undecidable,
    };

    // C5 (vanishing form): (alpha_{n+1} - alpha_n)/alpha_n -> 0 or
    // sum |alpha_{n+1} - alpha_n| < inf. Monotone power laws telescope to
    // alpha_0, geometric increments form a geometric series, constants have
    // zero increments.
    let c5_vanishing = match alpha {
        AlphaSchedule::PowerLaw { .. } => Holds,
        AlphaSchedule::Geometric { .. } => Holds,
        AlphaSchedule::Constant { .. } => Holds,
        AlphaSchedule::Custom { .. } => Undecidable,
    };

    // Literal ratio-to-one alternative: no closed-form family has increment
    // ratio -> 1 (power laws and constants go to 0, geometric to rho - 1),
    // but the summable-increments clause rescues all three, so the verdict
    // table coincides with the vanishing form; only custom tables differ.
    let c5_ratio_one = match alpha {
        AlphaSchedule::PowerLaw { .. }
        | AlphaSchedule::Geometric { .. }
        | AlphaSchedule::Constant { .. } => Holds,
        AlphaSchedule::Custom { .. } => Undecidable,
    };

    let c5 = c5_vanishing;
    let h2_alpha_part = if opts.h2_ratio_to_one { c5_ratio_one } else { c5_vanishing };

    // h1: 0 < liminf beta_n <= limsup beta_n < 1.
    let h1 = match beta {
        BetaSchedule::Constant { b } => {
            if *b > 0.0 {
                Holds
            } else {
                Fails
            }
        }
        BetaSchedule::PowerDecay { b, gamma } => {
            if *gamma == 0.0 && *b > 0.0 {
                Holds // degenerates to a constant in (0, 1)
            } else {
                Fails // liminf is 0 (or the schedule is identically 0)
            }
        }
        BetaSchedule::Custom { .. } => Undecidable,
    };

    // h2 composite: limsup beta_n < 1, vanishing/summable beta increments,
    // and the step-size condition.
    let h2_beta_part = match beta {
        // Constant: zero increments, limsup = b < 1 by construction.
        BetaSchedule::Constant { .. } => Holds,
        // Power decay: monotone, telescoping increments, limsup = beta_0 < 1.
        BetaSchedule::PowerDecay { .. } => Holds,
        BetaSchedule::Custom { .. } => Undecidable,
    };
    let h2 = h2_beta_part.and(h2_alpha_part);

    // Perturbation conditions.
    let e_summable = match err {
        ErrorSchedule::Zero => Holds,
        ErrorSchedule::Summable { .. } => Holds,
        // ||e_n|| = c * alpha_n / (n+1): summability depends on the step law.
        ErrorSchedule::RelativelySmall { c, .. } => {
            if *c == 0.0 {
                Holds
            } else {
                match alpha {
                    // a / (n+1)^(1+theta) sums for theta > 0
                    AlphaSchedule::PowerLaw { .. } => Holds,
                    AlphaSchedule::Geometric { .. } => Holds,
                    // a / (n+1) is the harmonic series
                    AlphaSchedule::Constant { .. } => Fails,
                    AlphaSchedule::Custom { .. } => Undecidable,
                }
            }
        }
        ErrorSchedule::Custom { .. } => Undecidable,
    };

    let e_relatively_small = match err {
        ErrorSchedule::Zero => Holds,
        ErrorSchedule::RelativelySmall { .. } => Holds, // ratio is c / (n+1)
        ErrorSchedule::Summable { c, rho, .. } => {
            if *c == 0.0 {
                Holds
            } else {
                match alpha {
                    // rho^n (n+1)^theta -> 0
                    AlphaSchedule::PowerLaw { .. } => Holds,
                    // ratio (c/a) (rho/rho_a)^n
                    AlphaSchedule::Geometric { rho: rho_a, .. } => {
                        if rho < rho_a {
                            Holds
                        } else {
                            Fails
                        }
                    }
                    AlphaSchedule::Constant { .. } => Holds,
                    AlphaSchedule::Custom { .. } => Undecidable,
                }
            }
        }
        ErrorSchedule::Custom { .. } => Undecidable,
    };

    let overall = c1
        .and(c2)
        .and(h1.or(h2))
        .and(e_summable.or(e_relatively_small));

    ConditionReport {
        c1,
        c2,
        c5,
        h1,
        h2,
        e_summable,
        e_relatively_small,
        applicable: overall == Holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_terms() {
        let a = AlphaSchedule::power_law(1.0, 1.0).unwrap();
        assert_eq!(a.at(0), 1.0);
        assert!((a.at(9) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn constant_beta_terms() {
        let b = BetaSchedule::constant(0.5).unwrap();
        assert_eq!(b.at(0), 0.5);
        assert_eq!(b.at(1_000_000), 0.5);
    }

    #[test]
    fn relatively_small_first_norm_is_c_alpha0() {
        let alpha = AlphaSchedule::power_law(1.0, 1.0).unwrap();
        let e = ErrorSchedule::relatively_small(1.0, DirectionRule::seeded(0)).unwrap();
        assert_eq!(e.norm_at(0, &alpha), 1.0);
    }

    #[test]
    fn custom_tables_follow_their_tail_rule() {
        let hold = AlphaSchedule::custom(vec![0.8, 0.4, 0.2], TailRule::HoldLast).unwrap();
        assert_eq!(hold.at(1), 0.4);
        assert_eq!(hold.at(2), 0.2);
        assert_eq!(hold.at(100), 0.2);
        let cycle = BetaSchedule::custom(vec![0.1, 0.9], TailRule::Cycle).unwrap();
        assert_eq!(cycle.at(4), 0.1);
        assert_eq!(cycle.at(5), 0.9);
    }

    #[test]
    fn alpha_values_clamp_into_unit_interval() {
        let a = AlphaSchedule::power_law(2.0, 1.0).unwrap();
        assert_eq!(a.at(0), 1.0); // 2.0 clamps to 1
        assert!(a.at(3) > 0.0 && a.at(3) <= 1.0);
        let g = AlphaSchedule::geometric(1.0, 0.5).unwrap();
        assert!(g.at(5000) > 0.0); // underflow floored above zero
    }

    #[test]
    fn schedule_validation() {
        assert!(AlphaSchedule::power_law(0.0, 1.0).is_err());
        assert!(AlphaSchedule::power_law(1.0, 1.5).is_err());
        assert!(AlphaSchedule::geometric(1.0, 1.0).is_err());
        assert!(AlphaSchedule::constant(0.0).is_err());
        assert!(AlphaSchedule::custom(vec![], TailRule::HoldLast).is_err());
        assert!(BetaSchedule::constant(1.0).is_err());
        assert!(ErrorSchedule::summable(-1.0, 0.5, DirectionRule::seeded(0)).is_err());
        assert!(DirectionRule::fixed(Vector::zeros(2)).is_err());
    }

    #[test]
    fn error_norm_law_is_exact() {
        let alpha = AlphaSchedule::power_law(1.0, 1.0).unwrap();
        let schedules = [
            ErrorSchedule::summable(0.7, 0.5, DirectionRule::seeded(42)).unwrap(),
            ErrorSchedule::relatively_small(
                1.3,
                DirectionRule::fixed(Vector::new(vec![3.0, 4.0])).unwrap(),
            )
            .unwrap(),
        ];
        for e in &schedules {
            for n in 0..200 {
                let law = e.norm_at(n, &alpha);
                let v = e.at(n, &alpha, 2);
                let got = crate::space::norm(&v);
                assert!(
                    (got - law).abs() <= 1e-14 * law,
                    "norm law violated at n = {n}: got {got}, law {law}"
                );
            }
        }
    }

    #[test]
    fn seeded_directions_are_reproducible_and_order_independent() {
        let d = DirectionRule::seeded(7);
        let forward: Vec<_> = (0..10).map(|n| d.unit_at(n, 3)).collect();
        let backward: Vec<_> = (0..10).rev().map(|n| d.unit_at(n, 3)).collect();
        for (n, f) in forward.iter().enumerate() {
            assert_eq!(f, &backward[9 - n]);
        }
    }

    #[test]
    fn harmonic_schedule_is_applicable() {
        let report = check_conditions(
            &AlphaSchedule::power_law(1.0, 1.0).unwrap(),
            &BetaSchedule::constant(0.5).unwrap(),
            &ErrorSchedule::zero(),
        );
        assert_eq!(report.c1, Verdict::Holds);
        assert_eq!(report.c2, Verdict::Holds);
        assert_eq!(report.h1, Verdict::Holds);
        assert!(report.applicable);
    }

    #[test]
    fn geometric_step_sizes_are_not_applicable() {
        let report = check_conditions(
            &AlphaSchedule::geometric(1.0, 0.5).unwrap(),
            &BetaSchedule::constant(0.5).unwrap(),
            &ErrorSchedule::zero(),
        );
        assert_eq!(report.c1, Verdict::Holds);
        assert_eq!(report.c2, Verdict::Fails);
        assert!(!report.applicable);
    }

    #[test]
    fn beta_zero_rescued_by_h2_with_telescoping_steps() {
        // liminf beta = 0 kills h1, but constant beta plus telescoping
        // harmonic increments satisfy h2, and the summable perturbation
        // satisfies the error condition.
        let report = check_conditions(
            &AlphaSchedule::power_law(1.0, 1.0).unwrap(),
            &BetaSchedule::constant(0.0).unwrap(),
            &ErrorSchedule::summable(1.0, 0.5, DirectionRule::seeded(0)).unwrap(),
        );
        assert_eq!(report.h1, Verdict::Fails);
        assert_eq!(report.h2, Verdict::Holds);
        assert_eq!(report.e_summable, Verdict::Holds);
        assert!(report.applicable);
    }

    #[test]
    fn custom_schedules_are_undecidable() {
        let report = check_conditions(
            &AlphaSchedule::custom(vec![0.5, 0.25], TailRule::HoldLast).unwrap(),
            &BetaSchedule::constant(0.5).unwrap(),
            &ErrorSchedule::zero(),
        );
        assert_eq!(report.c1, Verdict::Undecidable);
        assert_eq!(report.c2, Verdict::Undecidable);
        assert!(!report.applicable);
    }

    #[test]
    fn ratio_to_one_toggle_changes_only_the_h2_step_clause() {
        let alpha = AlphaSchedule::power_law(1.0, 1.0).unwrap();
        let beta = BetaSchedule::constant(0.0).unwrap();
        let err = ErrorSchedule::zero();
        let vanishing = check_conditions(&alpha, &beta, &err);
        let literal = check_conditions_with(
            &alpha,
            &beta,
            &err,
            CheckOptions { h2_ratio_to_one: true },
        );
        // Harmonic increments are summable, so both readings are rescued.
        assert_eq!(vanishing.h2, Verdict::Holds);
        assert_eq!(literal.h2, Verdict::Holds);
    }

    #[test]
    fn summable_error_against_slower_geometric_steps_fails_ratio() {
        // ||e_n||/alpha_n = (c/a) (0.9/0.5)^n diverges.
        let report = check_conditions(
            &AlphaSchedule::geometric(1.0, 0.5).unwrap(),
            &BetaSchedule::constant(0.5).unwrap(),
            &ErrorSchedule::summable(1.0, 0.9, DirectionRule::seeded(0)).unwrap(),
        );
        assert_eq!(report.e_relatively_small, Verdict::Fails);
        assert_eq!(report.e_summable, Verdict::Holds);
    }
}
