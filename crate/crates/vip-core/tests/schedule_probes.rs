//! Finite-horizon numeric probes backing the analytic condition checker:
//! wherever the checker claims a decidable verdict, a long partial
//! sum / tail evaluation must point in the same direction.

use vip_core::schedules::{
    check_conditions, AlphaSchedule, BetaSchedule, DirectionRule, ErrorSchedule, Verdict,
};

const HORIZON: usize = 1_000_000;
const DIVERGENCE_BAR: f64 = 10.0;

fn partial_sum(alpha: &AlphaSchedule, upto: usize) -> f64 {
    (0..upto).map(|n| alpha.at(n)).sum()
}

#[test]
fn c1_probe_matches_verdicts() {
    let cases: Vec<(AlphaSchedule, bool)> = vec![
        (AlphaSchedule::power_law(1.0, 1.0).unwrap(), true),
        (AlphaSchedule::power_law(1.0, 0.5).unwrap(), true),
        (AlphaSchedule::geometric(1.0, 0.5).unwrap(), true),
        (AlphaSchedule::constant(0.5).unwrap(), false),
    ];
    for (alpha, expect_vanishing) in cases {
        let report = check_conditions(
            &alpha,
            &BetaSchedule::constant(0.5).unwrap(),
            &ErrorSchedule::zero(),
        );
        let tail = alpha.at(HORIZON);
        let vanished = tail <= 1e-2;
        assert_eq!(
            report.c1 == Verdict::Holds,
            expect_vanishing,
            "checker disagrees with expectation for {alpha:?}"
        );
        assert_eq!(vanished, expect_vanishing, "probe disagrees for {alpha:?}");
    }
}

#[test]
fn c2_probe_matches_verdicts() {
    // Divergent partial sums blow past any fixed bar; convergent ones plateau.
    let divergent = [
        AlphaSchedule::power_law(1.0, 1.0).unwrap(),
        AlphaSchedule::power_law(1.0, 0.6).unwrap(),
        AlphaSchedule::constant(0.25).unwrap(),
    ];
    for alpha in divergent {
        let report = check_conditions(
            &alpha,
            &BetaSchedule::constant(0.5).unwrap(),
            &ErrorSchedule::zero(),
        );
        assert_eq!(report.c2, Verdict::Holds);
        assert!(
            partial_sum(&alpha, HORIZON) > DIVERGENCE_BAR,
            "partial sum stayed under the bar for {alpha:?}"
        );
    }
    let summable = AlphaSchedule::geometric(1.0, 0.5).unwrap();
    let report = check_conditions(
        &summable,
        &BetaSchedule::constant(0.5).unwrap(),
        &ErrorSchedule::zero(),
    );
    assert_eq!(report.c2, Verdict::Fails);
    assert!(partial_sum(&summable, HORIZON) < DIVERGENCE_BAR);
}

#[test]
fn c5_probe_increment_ratios_vanish_or_sum() {
    for alpha in [
        AlphaSchedule::power_law(1.0, 1.0).unwrap(),
        AlphaSchedule::power_law(0.8, 0.5).unwrap(),
        AlphaSchedule::constant(0.3).unwrap(),
    ] {
        let report = check_conditions(
            &alpha,
            &BetaSchedule::constant(0.5).unwrap(),
            &ErrorSchedule::zero(),
        );
        assert_eq!(report.c5, Verdict::Holds);
        let n = HORIZON;
        let ratio = (alpha.at(n + 1) - alpha.at(n)).abs() / alpha.at(n);
        assert!(ratio <= 1e-2, "increment ratio {ratio} for {alpha:?}");
    }
    // Geometric: ratio tends to 1 - rho, but increments are summable.
    let geo = AlphaSchedule::geometric(1.0, 0.5).unwrap();
    let report = check_conditions(
        &geo,
        &BetaSchedule::constant(0.5).unwrap(),
        &ErrorSchedule::zero(),
    );
    assert_eq!(report.c5, Verdict::Holds);
    let increments: f64 = (0..200).map(|n| (geo.at(n + 1) - geo.at(n)).abs()).sum();
    assert!(increments <= 1.0 + 1e-12);
}

#[test]
fn error_ratio_probe_matches_verdicts() {
    let alpha = AlphaSchedule::power_law(1.0, 1.0).unwrap();
    let rel = ErrorSchedule::relatively_small(1.0, DirectionRule::seeded(0)).unwrap();
    let report = check_conditions(&alpha, &BetaSchedule::constant(0.5).unwrap(), &rel);
    assert_eq!(report.e_relatively_small, Verdict::Holds);
    let n = 100_000;
    assert!(rel.norm_at(n, &alpha) / alpha.at(n) <= 1e-4);

    // Summable perturbations against faster-decaying geometric steps violate
    // the ratio condition; the probe sees the ratio blowing up.
    let fast = AlphaSchedule::geometric(1.0, 0.25).unwrap();
    let e = ErrorSchedule::summable(1.0, 0.5, DirectionRule::seeded(0)).unwrap();
    let report = check_conditions(&fast, &BetaSchedule::constant(0.5).unwrap(), &e);
    assert_eq!(report.e_relatively_small, Verdict::Fails);
    let n = 512; // before the step law underflows
    assert!(e.norm_at(n, &fast) / fast.at(n) > 1e6);
}

#[test]
fn custom_tables_report_undecidable_everywhere_probes_cannot_help() {
    let alpha =
        AlphaSchedule::custom(vec![0.9, 0.5, 0.3], vip_core::schedules::TailRule::HoldLast)
            .unwrap();
    let report = check_conditions(
        &alpha,
        &BetaSchedule::constant(0.5).unwrap(),
        &ErrorSchedule::zero(),
    );
    assert_eq!(report.c1, Verdict::Undecidable);
    assert_eq!(report.c2, Verdict::Undecidable);
    assert_eq!(report.c5, Verdict::Undecidable);
    assert!(!report.applicable);
}
