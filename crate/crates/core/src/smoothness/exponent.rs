//! Necessary conditions for smooth realizations: variation lower bounds on
//! pairs of endpoint sets, compared against powers of `ρ_S`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dd::{variation_lower_bound, VariationBound, NOISE_SHARE};
use crate::error::{Error, Result};
use crate::fit::ols;
use crate::ratio::{log_rho_s_prefix, ScalingSource, TailPolicy};
use crate::realization::{endpoints, renormalize_restrict, Correspondence};
use crate::symbolic::{lcp, DualPoint, Word};

/// Levels dropped from the shallow end of an exponent fit.
pub const DEFAULT_DROP_SHALLOW: usize = 2;

/// Which interpolation constraints enter the variation bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintSet {
    /// `A(j) → A(j')`.
    Outer,
    /// `A(j0 j) → A(j0 j')`.
    Inner,
    /// Both, the inner set placed into child `j0` of the outer one.
    Combined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentOptions {
    pub j0: u32,
    pub constraints: ConstraintSet,
    /// Symbols of `j` beyond the common prefix read when evaluating `S`.
    pub eval_extra: usize,
    pub drop_shallow: usize,
    pub tail_policy: TailPolicy,
}

impl Default for ExponentOptions {
    fn default() -> Self {
        ExponentOptions {
            j0: 1,
            constraints: ConstraintSet::Combined,
            eval_extra: 24,
            drop_shallow: DEFAULT_DROP_SHALLOW,
            tail_policy: TailPolicy::default(),
        }
    }
}

/// Pairs `(j_n, j'_n)` with `ρ_S → 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PairFamily {
    /// `(s_n w, s_{n+1} w)`; `w` should avoid `s`.
    ConstantPrefix { symbol: u32, tail: DualPoint },
}

impl PairFamily {
    pub fn pair(&self, n: usize) -> (DualPoint, DualPoint) {
        match self {
            PairFamily::ConstantPrefix { symbol, tail } => (
                tail.prepend_word(&Word::repeat(*symbol, n)),
                tail.prepend_word(&Word::repeat(*symbol, n + 1)),
            ),
        }
    }
}

/// Outer, inner and combined variation bounds for one pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairBounds {
    pub outer: VariationBound,
    pub inner: VariationBound,
    pub combined: VariationBound,
    pub log_rho: f64,
}

impl PairBounds {
    pub fn get(&self, which: ConstraintSet) -> &VariationBound {
        match which {
            ConstraintSet::Outer => &self.outer,
            ConstraintSet::Inner => &self.inner,
            ConstraintSet::Combined => &self.combined,
        }
    }
}

fn check_order(src: &dyn ScalingSource, k: usize) -> Result<()> {
    let d = src.d();
    if k == 0 || k >= 2 * d {
        return Err(Error::InvalidParameter(format!(
            "k < 2d required (k = {k}, d = {d}) and k >= 1"
        )));
    }
    Ok(())
}

/// Variation bounds of `A(j) → A(j')` and its renormalized restriction to child `j0`.
pub fn pair_bounds(
    src: &dyn ScalingSource,
    j: &DualPoint,
    j_prime: &DualPoint,
    k: usize,
    opts: &ExponentOptions,
) -> Result<PairBounds> {
    check_order(src, k)?;
    let common = lcp(j, j_prime, Some(opts.tail_policy.lcp_bound))?;
    let depth = common.length + opts.eval_extra;
    let outer = Correspondence::between(
        &endpoints(src, j, depth)?,
        &endpoints(src, j_prime, depth)?,
        "A(j) -> A(j')",
    )?;
    let inner = renormalize_restrict(&outer, opts.j0, src, j, j_prime, depth)?;
    let i = 2 * (opts.j0 as usize - 1);
    let combined = outer.with_embedded(
        &inner,
        (outer.source[i], outer.source[i + 1]),
        (outer.target[i], outer.target[i + 1]),
    )?;
    let log_rho = if common.coincident {
        f64::NEG_INFINITY
    } else {
        log_rho_s_prefix(src, &common.word, &opts.tail_policy)?
    };
    Ok(PairBounds {
        outer: variation_lower_bound(&outer, k)?,
        inner: variation_lower_bound(&inner, k)?,
        combined: variation_lower_bound(&combined, k)?,
        log_rho,
    })
}

/// Necessary-condition check of the variation requirement at constant `c_probe`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition2Report {
    pub outer_bound: f64,
    pub inner_bound: f64,
    pub rho: f64,
    /// `c_probe · ρ_S^{k+ε-1}`.
    pub threshold: f64,
    /// Both lower bounds are within the threshold. Failure refutes the
    /// condition at this constant; success certifies nothing.
    pub satisfied: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn condition2_check(
    src: &dyn ScalingSource,
    j: &DualPoint,
    j_prime: &DualPoint,
    j0: u32,
    k: usize,
    eps: f64,
    c_probe: f64,
    opts: &ExponentOptions,
) -> Result<Condition2Report> {
    check_eps(eps)?;
    let b = pair_bounds(src, j, j_prime, k, &ExponentOptions { j0, ..opts.clone() })?;
    let rho = b.log_rho.exp();
    let threshold = c_probe * rho.powf(k as f64 + eps - 1.0);
    Ok(Condition2Report {
        outer_bound: b.outer.value,
        inner_bound: b.inner.value,
        rho,
        threshold,
        satisfied: b.outer.value <= threshold && b.inner.value <= threshold,
    })
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0,1], got {eps}")));
    }
    Ok(())
}

/// One row of an exponent fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentLevel {
    pub n: usize,
    /// `ln ρ_S`, or the log of the geometric scale for tree comparisons.
    pub log_scale: f64,
    pub variation: f64,
    pub noise: f64,
    /// Excluded from the fit: shallow, zero, or conditioning-limited.
    pub excluded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub levels: Vec<ExponentLevel>,
}

impl ExponentFit {
    /// Fits `ln variation` against `log_scale` over the levels not excluded.
    pub fn from_levels(levels: Vec<ExponentLevel>) -> Result<Self> {
        let used: Vec<&ExponentLevel> = levels.iter().filter(|l| !l.excluded).collect();
        if used.len() < 2 {
            return Err(Error::Insufficient(
                "insufficient signal: fewer than 2 levels above the noise floor".into(),
            ));
        }
        let xs: Vec<f64> = used.iter().map(|l| l.log_scale).collect();
        let ys: Vec<f64> = used.iter().map(|l| l.variation.ln()).collect();
        let f = ols(&xs, &ys)?;
        Ok(ExponentFit {
            slope: f.slope,
            intercept: f.intercept,
            r_squared: f.r_squared,
            levels,
        })
    }
}

/// Per-level bounds for a pair family.
pub fn family_levels(
    src: &dyn ScalingSource,
    k: usize,
    family: &PairFamily,
    n_range: std::ops::RangeInclusive<usize>,
    opts: &ExponentOptions,
) -> Result<Vec<(usize, PairBounds)>> {
    check_order(src, k)?;
    let ns: Vec<usize> = n_range.collect();
    ns.par_iter()
        .map(|&n| {
            let (a, b) = family.pair(n);
            Ok((n, pair_bounds(src, &a, &b, k, opts)?))
        })
        .collect()
}

/// Slope of `ln variation` against `ln ρ_S` along a pair family.
pub fn smoothness_exponent(
    src: &dyn ScalingSource,
    k: usize,
    family: &PairFamily,
    n_range: std::ops::RangeInclusive<usize>,
    opts: &ExponentOptions,
) -> Result<ExponentFit> {
    let rows = family_levels(src, k, family, n_range, opts)?;
    ExponentFit::from_levels(exponent_levels(&rows, opts))
}

pub fn exponent_levels(rows: &[(usize, PairBounds)], opts: &ExponentOptions) -> Vec<ExponentLevel> {
    rows.iter()
        .enumerate()
        .map(|(i, (n, b))| {
            let v = b.get(opts.constraints);
            ExponentLevel {
                n: *n,
                log_scale: b.log_rho,
                variation: v.value,
                noise: v.noise,
                excluded: i < opts.drop_shallow
                    || !(v.value > v.noise / NOISE_SHARE)
                    || !(v.value > 0.0)
                    || !b.log_rho.is_finite(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Refuted,
    NotRefuted,
}

/// `variation / ρ_S^{k+ε₁-1}` along a family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefutationProbe {
    pub eps1: f64,
    pub probe_exponent: f64,
    pub ratios: Vec<(usize, f64)>,
    pub monotone: bool,
    /// Last ratio over first ratio.
    pub growth: f64,
    pub verdict: Verdict,
}

/// Growth factor over the probed range required for a refutation.
pub const REFUTATION_GROWTH: f64 = 3.0;

pub fn refutation_probe(
    rows: &[(usize, PairBounds)],
    k: usize,
    eps1: f64,
    constraints: ConstraintSet,
) -> Result<RefutationProbe> {
    if rows.len() < 2 {
        return Err(Error::Insufficient("probe needs at least 2 levels".into()));
    }
    let e = k as f64 + eps1 - 1.0;
    let ratios: Vec<(usize, f64)> = rows
        .iter()
        .map(|(n, b)| (*n, (b.get(constraints).value.ln() - e * b.log_rho).exp()))
        .collect();
    let monotone = ratios.windows(2).all(|w| w[1].1 > w[0].1);
    let growth = ratios[ratios.len() - 1].1 / ratios[0].1;
    let verdict = if monotone && growth >= REFUTATION_GROWTH {
        Verdict::Refuted
    } else {
        Verdict::NotRefuted
    };
    Ok(RefutationProbe {
        eps1,
        probe_exponent: e,
        ratios,
        monotone,
        growth,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::RatioVector;
    use crate::realization::PrescribedScaling;

    fn family() -> PairFamily {
        PairFamily::ConstantPrefix {
            symbol: 1,
            tail: DualPoint::constant(2),
        }
    }

    #[test]
    fn constant_scaling_has_no_signal() {
        let s = PrescribedScaling::Constant(RatioVector::new(vec![0.3, 0.3], vec![0.4]).unwrap());
        let err = smoothness_exponent(&s, 1, &family(), 3..=8, &ExponentOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Insufficient(m) if m.starts_with("insufficient signal")));
    }

    #[test]
    fn equal_points_give_zero() {
        let s = crate::branch::BranchSystem::power_example(2, 1, 0.5).unwrap();
        let j = DualPoint::constant(2);
        let b = pair_bounds(&s, &j, &j, 1, &ExponentOptions::default()).unwrap();
        assert_eq!(b.combined.value, 0.0);
        assert_eq!(b.log_rho, f64::NEG_INFINITY);
    }

    #[test]
    fn order_must_stay_below_two_d() {
        let s = crate::branch::BranchSystem::power_example(2, 1, 0.5).unwrap();
        let (a, b) = family().pair(3);
        let err = pair_bounds(&s, &a, &b, 4, &ExponentOptions::default()).unwrap_err();
        assert!(err.to_string().contains("k < 2d required"));
    }

    #[test]
    fn refutation_needs_growth() {
        let s = crate::branch::BranchSystem::power_example(2, 1, 0.5).unwrap();
        let rows = family_levels(&s, 1, &family(), 4..=8, &ExponentOptions::default()).unwrap();
        let hi = refutation_probe(&rows, 1, 0.8, ConstraintSet::Combined).unwrap();
        assert_eq!(hi.verdict, Verdict::Refuted);
        let lo = refutation_probe(&rows, 1, 0.3, ConstraintSet::Combined).unwrap();
        assert_eq!(lo.verdict, Verdict::NotRefuted);
    }
}
