//! Smoothness of the conjugacy between two realizations of one scaling function.

use rayon::prelude::*;
use serde::Serialize;

use super::dd::variation_lower_bound;
use super::exponent::{ExponentFit, ExponentLevel};
use crate::error::{Error, Result};
use crate::realization::{Correspondence, IntervalTree};
use crate::symbolic::Word;

/// Largest root ratio mismatch between trees of the same `S`.
pub const ROOT_MISMATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugacyOptions {
    /// Depth of descendants whose endpoints are matched inside each node.
    pub refinement: usize,
    pub drop_shallow: usize,
    /// Variations at most this multiple of their noise estimate count as zero.
    pub noise_multiple: f64,
    /// Largest accepted root ratio distance. Tails on which `S` differs
    /// need a looser value than [`ROOT_MISMATCH_TOL`].
    pub root_tolerance: f64,
}

impl Default for ConjugacyOptions {
    fn default() -> Self {
        ConjugacyOptions {
            refinement: 2,
            drop_shallow: 0,
            noise_multiple: 10.0,
            root_tolerance: ROOT_MISMATCH_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugacyReport {
    pub k: usize,
    /// Per level: the node with the largest bound, against its log-length in the first tree.
    pub levels: Vec<ExponentLevel>,
    pub worst_nodes: Vec<String>,
    /// Every bound is at rounding level: the trees coincide.
    pub exact: bool,
    pub fit: Option<ExponentFit>,
}

/// Matches the endpoints of all depth-`refinement` descendants of `v` in both trees.
fn node_correspondence(t1: &IntervalTree, t2: &IntervalTree, v: &Word, r: usize) -> Result<Correspondence> {
    let d = t1.d();
    let mut pts = Vec::with_capacity(2 * d.pow(r as u32));
    for u in Word::all_of_length(r, d) {
        let (a0, a1) = t1.relative_hull(v, &u)?;
        let (b0, b1) = t2.relative_hull(v, &u)?;
        pts.push((a0, b0));
        pts.push((a1, b1));
    }
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    pts.dedup_by(|p, q| p.0 == q.0);
    let (s, t) = pts.into_iter().unzip();
    Correspondence::new(s, t, format!("node {}", v.encode(d)))
}

/// Variation bounds of the renormalized conjugacy on every node of levels `n_range`.
pub fn conjugacy_smoothness(
    t1: &IntervalTree,
    t2: &IntervalTree,
    k: usize,
    n_range: std::ops::RangeInclusive<usize>,
    opts: &ConjugacyOptions,
) -> Result<ConjugacyReport> {
    if t1.d() != t2.d() || t1.depth() != t2.depth() {
        return Err(Error::Mismatch("trees differ in alphabet or depth".into()));
    }
    let d = t1.d();
    let root = Word::empty();
    let gap = t1.node_ratio(&root)?.distance(&t2.node_ratio(&root)?);
    if gap > opts.root_tolerance {
        return Err(Error::Mismatch(format!(
            "trees realize different scaling functions: root ratios differ by {gap:e}"
        )));
    }
    let last = *n_range.end() + opts.refinement;
    if last > t1.depth() {
        return Err(Error::DepthExceeded {
            requested: last,
            available: t1.depth(),
        });
    }
    if k == 0 || k + 1 > 2 * d.pow(opts.refinement as u32) {
        return Err(Error::InvalidParameter(format!(
            "order {k} needs more points than refinement {} provides",
            opts.refinement
        )));
    }
    let mut levels = Vec::new();
    let mut worst_nodes = Vec::new();
    for (i, n) in n_range.enumerate() {
        let nodes = t1.level(n)?;
        let rows: Vec<(f64, f64, f64, String)> = nodes
            .par_iter()
            .map(|(v, h)| {
                let c = node_correspondence(t1, t2, v, opts.refinement)?;
                let b = variation_lower_bound(&c, k)?;
                Ok((b.value, b.noise, h.log_len, v.encode(d)))
            })
            .collect::<Result<_>>()?;
        let (value, noise, log_len, word) =
            rows.into_iter()
                .max_by(|a, b| a.0.total_cmp(&b.0))
                .unwrap_or((0.0, 0.0, 0.0, String::new()));
        let at_noise = !(value > opts.noise_multiple * noise);
        levels.push(ExponentLevel {
            n,
            log_scale: log_len,
            variation: value,
            noise,
            excluded: i < opts.drop_shallow || at_noise,
        });
        worst_nodes.push(word);
    }
    let exact = levels.iter().all(|l| !(l.variation > opts.noise_multiple * l.noise));
    let fit = if exact {
        None
    } else {
        Some(ExponentFit::from_levels(levels.clone())?)
    };
    Ok(ConjugacyReport {
        k,
        levels,
        worst_nodes,
        exact,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::BranchSystem;
    use crate::ratio::RatioVector;
    use crate::realization::{realize, PrescribedScaling};
    use crate::symbolic::DualPoint;

    #[test]
    fn same_tree_is_exact() {
        let s = BranchSystem::power_example(3, 2, 0.5).unwrap();
        let t = realize(&s, &DualPoint::constant(2), 5).unwrap();
        let r = conjugacy_smoothness(&t, &t, 2, 1..=3, &ConjugacyOptions::default()).unwrap();
        assert!(r.exact && r.fit.is_none());
        assert!(r.levels.iter().all(|l| l.variation == 0.0));
    }

    #[test]
    fn constant_scaling_ignores_tail() {
        let v = RatioVector::new(vec![0.3, 0.2, 0.1], vec![0.25, 0.15]).unwrap();
        let s = PrescribedScaling::Constant(v);
        let a = realize(&s, &DualPoint::constant(1), 5).unwrap();
        let b = realize(&s, &DualPoint::constant(3), 5).unwrap();
        let r = conjugacy_smoothness(&a, &b, 3, 1..=3, &ConjugacyOptions::default()).unwrap();
        assert!(r.exact);
    }

    #[test]
    fn root_mismatch_detected() {
        let s = BranchSystem::power_example(3, 2, 0.5).unwrap();
        let a = realize(&s, &DualPoint::constant(2), 4).unwrap();
        let b = realize(&s, &DualPoint::constant(1), 4).unwrap();
        let err = conjugacy_smoothness(&a, &b, 2, 1..=2, &ConjugacyOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Mismatch(_)));
    }

    #[test]
    fn depth_checked() {
        let s = BranchSystem::power_example(3, 2, 0.5).unwrap();
        let t = realize(&s, &DualPoint::constant(2), 4).unwrap();
        let err = conjugacy_smoothness(&t, &t, 2, 1..=3, &ConjugacyOptions::default()).unwrap_err();
        assert!(matches!(err, Error::DepthExceeded { .. }));
    }
}
