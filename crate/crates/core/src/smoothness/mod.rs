//! Numerical smoothness diagnostics.

pub mod conjugacy;
pub mod dd;
pub mod exponent;
pub mod lemma;
pub mod whitney;

pub use conjugacy::{conjugacy_smoothness, ConjugacyOptions, ConjugacyReport};
pub use dd::{
    dd_derivative_samples, divided_difference, variation_lower_bound, DerivativeSample, DividedDifferenceTable,
    VariationBound,
};
pub use exponent::{
    condition2_check, exponent_levels, family_levels, pair_bounds, refutation_probe, smoothness_exponent,
    Condition2Report, ConstraintSet, ExponentFit, ExponentLevel, ExponentOptions, PairFamily, RefutationProbe, Verdict,
};
pub use lemma::{lemma_check, violation_probe, LemmaPair, LemmaReport, Polynomial};
pub use whitney::{whitney_check, WhitneyOptions, WhitneyOrder, WhitneyReport};
