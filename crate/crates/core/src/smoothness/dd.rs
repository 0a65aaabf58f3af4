//! Divided differences and the derivative samples they certify.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::realization::Correspondence;

/// Node spacing below which a sample is always flagged.
pub const SPACING_FLOOR: f64 = 1e-10;

/// Share of the sample spread that rounding noise may reach before a sample is flagged.
pub const NOISE_SHARE: f64 = 0.1;

/// Newton divided differences over nodes sorted increasingly.
///
/// `entry(m, i)` is `[x_i, .., x_{i+m}]`. Sorting first makes the table
/// independent of the order in which points are supplied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DividedDifferenceTable {
    nodes: Vec<f64>,
    values: Vec<f64>,
    columns: Vec<Vec<f64>>,
}

impl DividedDifferenceTable {
    pub fn new(nodes: &[f64], values: &[f64]) -> Result<Self> {
        if nodes.len() != values.len() || nodes.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "{} nodes against {} values",
                nodes.len(),
                values.len()
            )));
        }
        let mut pairs: Vec<(f64, f64)> = nodes.iter().copied().zip(values.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::CoincidentNodes(w[0].0));
        }
        let (nodes, values): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let mut columns = vec![values.clone()];
        for m in 1..nodes.len() {
            let prev = &columns[m - 1];
            let col = (0..nodes.len() - m)
                .map(|i| (prev[i + 1] - prev[i]) / (nodes[i + m] - nodes[i]))
                .collect();
            columns.push(col);
        }
        Ok(DividedDifferenceTable { nodes, values, columns })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn entry(&self, order: usize, start: usize) -> Option<f64> {
        self.columns.get(order)?.get(start).copied()
    }

    /// The top entry of the given order.
    pub fn top(&self, order: usize) -> Option<f64> {
        self.entry(order, 0)
    }
}

/// Order-`m` divided difference of exactly `m + 1` points.
pub fn divided_difference(nodes: &[f64], values: &[f64], m: usize) -> Result<f64> {
    if nodes.len() != m + 1 {
        return Err(Error::InvalidParameter(format!(
            "order {m} needs {} nodes, got {}",
            m + 1,
            nodes.len()
        )));
    }
    let t = DividedDifferenceTable::new(nodes, values)?;
    Ok(t.top(m).unwrap_or(0.0))
}

/// `k! [x_{i_0}, .., x_{i_k}]` for one subset of a correspondence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeSample {
    pub subset: Vec<usize>,
    pub value: f64,
    /// Rounding estimate `eps · max|v| · k! / (min spacing)^k`.
    pub noise: f64,
    pub min_spacing: f64,
    pub flagged: bool,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Calls `f` on every increasing `size`-subset of `0..n`.
pub(crate) fn for_each_subset(n: usize, size: usize, mut f: impl FnMut(&[usize])) {
    if size > n {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        f(&idx);
        let Some(i) = (0..size).rev().find(|&i| idx[i] != i + n - size) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `k!·DD` over every `(k+1)`-subset of the correspondence, with conditioning flags.
pub fn dd_derivative_samples(corr: &Correspondence, k: usize) -> Result<Vec<DerivativeSample>> {
    let n = corr.len();
    if k + 1 > n {
        return Err(Error::InvalidParameter(format!(
            "order {k} needs at least {} points, correspondence has {n}",
            k + 1
        )));
    }
    let kf = factorial(k);
    let mut out = Vec::new();
    let mut xs = vec![0.0; k + 1];
    let mut ys = vec![0.0; k + 1];
    for_each_subset(n, k + 1, |sub| {
        for (t, &i) in sub.iter().enumerate() {
            xs[t] = corr.source[i];
            ys[t] = corr.target[i];
        }
        let value = kf
            * DividedDifferenceTable::new(&xs, &ys)
                .ok()
                .and_then(|t| t.top(k))
                .unwrap_or(f64::NAN);
        let min_spacing = xs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let vmax = ys.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let noise = f64::EPSILON * vmax * kf / min_spacing.powi(k as i32);
        out.push(DerivativeSample {
            subset: sub.to_vec(),
            value,
            noise,
            min_spacing,
            flagged: false,
        });
    });
    let spread = spread_of(out.iter().filter(|s| s.min_spacing >= SPACING_FLOOR).map(|s| s.value));
    for s in &mut out {
        s.flagged = !s.value.is_finite() || s.min_spacing < SPACING_FLOOR || s.noise > NOISE_SHARE * spread;
    }
    Ok(out)
}

fn spread_of(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi >= lo {
        hi - lo
    } else {
        0.0
    }
}

/// Lower bound on the `k`-th derivative variation of every interpolant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationBound {
    pub k: usize,
    pub value: f64,
    /// Subsets attaining the largest and the smallest sample.
    pub witness_subsets: (Vec<usize>, Vec<usize>),
    /// Some samples were excluded for conditioning.
    pub conditioning_flag: bool,
    pub samples: usize,
    pub flagged: usize,
    /// Largest noise estimate among the samples kept.
    pub noise: f64,
}

/// `max - min` of the unflagged derivative samples.
pub fn variation_lower_bound(corr: &Correspondence, k: usize) -> Result<VariationBound> {
    let samples = dd_derivative_samples(corr, k)?;
    let kept: Vec<&DerivativeSample> = samples.iter().filter(|s| !s.flagged).collect();
    let flagged = samples.len() - kept.len();
    let (Some(hi), Some(lo)) = (
        kept.iter().max_by(|a, b| a.value.total_cmp(&b.value)),
        kept.iter().min_by(|a, b| a.value.total_cmp(&b.value)),
    ) else {
        return Ok(VariationBound {
            k,
            value: 0.0,
            witness_subsets: (Vec::new(), Vec::new()),
            conditioning_flag: true,
            samples: samples.len(),
            flagged,
            noise: 0.0,
        });
    };
    Ok(VariationBound {
        k,
        value: hi.value - lo.value,
        witness_subsets: (hi.subset.clone(), lo.subset.clone()),
        conditioning_flag: flagged > 0,
        samples: samples.len(),
        flagged,
        noise: kept.iter().map(|s| s.noise).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_second_difference() {
        let dd = divided_difference(&[0.0, 1.0, 2.0], &[0.0, 1.0, 4.0], 2).unwrap();
        assert_eq!(dd, 1.0);
    }

    #[test]
    fn coincident_nodes_error() {
        let err = divided_difference(&[0.0, 1.0, 1.0], &[0.0, 1.0, 2.0], 2).unwrap_err();
        assert_eq!(err, Error::CoincidentNodes(1.0));
    }

    #[test]
    fn subsets_enumerated() {
        let mut n = 0;
        for_each_subset(6, 3, |s| {
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            n += 1;
        });
        assert_eq!(n, 20);
    }

    #[test]
    fn identity_samples() {
        let c = Correspondence::identity(vec![0.0, 0.2, 0.5, 0.7, 1.0]).unwrap();
        assert!(dd_derivative_samples(&c, 1)
            .unwrap()
            .iter()
            .all(|s| (s.value - 1.0).abs() < 1e-15));
        assert!(dd_derivative_samples(&c, 2)
            .unwrap()
            .iter()
            .all(|s| s.value.abs() < 1e-12));
        assert_eq!(variation_lower_bound(&c, 3).unwrap().value, 0.0);
    }

    #[test]
    fn affine_slope_then_renormalized() {
        let src = vec![0.0, 0.3, 0.6, 1.0];
        let tgt: Vec<f64> = src.iter().map(|x| 2.0 + 0.5 * x).collect();
        let c = Correspondence::new(src, tgt, "affine").unwrap();
        assert!(dd_derivative_samples(&c, 1)
            .unwrap()
            .iter()
            .all(|s| (s.value - 0.5).abs() < 1e-15));
        let r = c.renormalized();
        assert!(dd_derivative_samples(&r, 1)
            .unwrap()
            .iter()
            .all(|s| (s.value - 1.0).abs() < 1e-15));
    }

    #[test]
    fn clustered_power_samples_in_analytic_range() {
        let xs = [1e-4, 2e-4, 3.5e-4];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| x.powf(2.5)).collect();
        let v = 2.0 * divided_difference(&xs, &ys, 2).unwrap();
        let d2 = |x: f64| 3.75 * x.sqrt();
        assert!(v >= d2(xs[0]) && v <= d2(xs[2]));
    }

    #[test]
    fn tight_spacing_is_flagged() {
        let c = Correspondence::new(vec![0.0, 0.5, 0.5 + 1e-11, 1.0], vec![0.0, 0.4, 0.4 + 2e-11, 1.0], "t").unwrap();
        let b = variation_lower_bound(&c, 2).unwrap();
        assert!(b.conditioning_flag);
    }
}
