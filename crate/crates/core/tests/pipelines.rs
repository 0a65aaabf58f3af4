mod common;

use cantor_scaling::ratio::{holder_exponent, Metric, PairSampler, RatioVector, TailPolicy};
use cantor_scaling::realization::{realize, PrescribedScaling};
use cantor_scaling::smoothness::{
    conjugacy_smoothness, family_levels, refutation_probe, smoothness_exponent, whitney_check, ConjugacyOptions,
    ConstraintSet, ExponentOptions, PairFamily, Verdict, WhitneyOptions,
};
use cantor_scaling::symbolic::DualPoint;

fn family() -> PairFamily {
    PairFamily::ConstantPrefix {
        symbol: 1,
        tail: DualPoint::constant(2),
    }
}

#[test]
fn exponent_tracks_k_minus_one_plus_eps_for_every_constraint_set() {
    for constraints in [ConstraintSet::Outer, ConstraintSet::Inner, ConstraintSet::Combined] {
        let opts = ExponentOptions {
            constraints,
            ..Default::default()
        };
        let fit = smoothness_exponent(&common::power3(), 2, &family(), 3..=10, &opts).unwrap();
        assert!(
            (fit.slope - 1.5).abs() < 0.15 && fit.r_squared >= 0.97,
            "{constraints:?}: {fit:?}"
        );
    }
}

#[test]
fn refutation_separates_the_true_exponent() {
    let rows = family_levels(&common::power3(), 2, &family(), 4..=10, &ExponentOptions::default()).unwrap();
    let over = refutation_probe(&rows, 2, 0.8, ConstraintSet::Combined).unwrap();
    assert_eq!(over.verdict, Verdict::Refuted);
    let under = refutation_probe(&rows, 2, 0.2, ConstraintSet::Combined).unwrap();
    assert_eq!(under.verdict, Verdict::NotRefuted);
}

#[test]
fn holder_exponent_of_the_d2_example() {
    let est = holder_exponent(
        &common::power2(),
        &Metric::RhoS(TailPolicy::default()),
        &PairSampler::default(),
    )
    .unwrap();
    assert!((est.exponent - 0.5).abs() < 0.1 && est.r_squared >= 0.9, "{est:?}");
    let flat = PrescribedScaling::Constant(RatioVector::new(vec![0.3, 0.3], vec![0.4]).unwrap());
    let c = holder_exponent(&flat, &Metric::RhoS(TailPolicy::default()), &PairSampler::default()).unwrap();
    assert!(c.constant && c.exponent.is_infinite());
}

#[test]
fn whitney_remainders_of_the_d3_example() {
    let r = whitney_check(&common::power3(), 2, 0.5, &WhitneyOptions::default()).unwrap();
    assert!(r.pass() && !r.exact_case);
    assert!(r.orders[0].exponent.unwrap() >= 2.4);
    assert!(r.orders[2].exponent.unwrap() >= 0.4);
}

#[test]
fn conjugacy_between_genuinely_different_tails() {
    let sys = common::power3();
    let a = realize(&sys, &DualPoint::constant(2), 8).unwrap();
    let b = realize(&sys, &DualPoint::constant(1), 8).unwrap();
    // S differs between the two tails at the root, so the guard is relaxed.
    let opts = ConjugacyOptions {
        root_tolerance: 1.0,
        ..Default::default()
    };
    let r = conjugacy_smoothness(&a, &b, 2, 1..=6, &opts).unwrap();
    let fit = r.fit.unwrap();
    assert!(!r.exact && fit.slope >= 1.3 && fit.r_squared > 0.99, "{fit:?}");
}
