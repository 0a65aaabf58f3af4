//! Taylor remainders of the forward map between Cantor points.
//!
//! For a pair `x < y` in one branch domain and `l ≤ k`,
//! `R_l(x, y) = f_l(y) - Σ_{t=l}^{k} f_t(x) (y - x)^{t-l} / (t - l)!`
//! with `f_t = D^t f`. A `C^{k+ε}` map has `R_l = O(|y - x|^{k-l+ε})`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::exponent::check_eps;
use crate::branch::{Branch, BranchSystem};
use crate::error::{Error, Result};
use crate::fit::ols;
use crate::symbolic::Word;

/// Remainders below this multiple of their rounding estimate are dropped.
pub const NOISE_MULTIPLE: f64 = 10.0;

/// Allowed shortfall of a fitted exponent below its target.
pub const WHITNEY_TOLERANCE: f64 = 0.1;

/// Extra symbols below the level cylinder when placing Cantor points.
const POINT_DEPTH: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhitneyOptions {
    pub levels: std::ops::RangeInclusive<usize>,
    /// Random pairs per level, besides the pairs at domain ends.
    pub sample_count: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for WhitneyOptions {
    fn default() -> Self {
        WhitneyOptions {
            levels: 4..=12,
            sample_count: 64,
            seed: 0x5eed,
            tolerance: WHITNEY_TOLERANCE,
        }
    }
}

/// Largest kept remainder at one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemainderLevel {
    pub level: usize,
    pub log_distance: f64,
    pub log_remainder: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhitneyOrder {
    pub l: usize,
    pub target: f64,
    /// `None` when every remainder is at rounding level.
    pub exponent: Option<f64>,
    pub r_squared: Option<f64>,
    pub exact: bool,
    pub pass: bool,
    pub levels: Vec<RemainderLevel>,
}

/// `t!·DD` estimate of `f_t` from cylinder endpoints against the analytic value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReconstructionRow {
    pub level: usize,
    pub order: usize,
    pub max_abs_error: f64,
    /// Rounding estimate of the divided difference; errors below it carry no information.
    pub rounding: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhitneyReport {
    pub k: usize,
    pub eps: f64,
    pub tolerance: f64,
    pub orders: Vec<WhitneyOrder>,
    /// All remainders vanish to rounding: the affine case.
    pub exact_case: bool,
    pub pairs_used: usize,
    pub reconstruction: Vec<ReconstructionRow>,
}

impl WhitneyReport {
    pub fn pass(&self) -> bool {
        self.orders.iter().all(|o| o.pass)
    }
}

struct Pair {
    level: usize,
    x: f64,
    y: f64,
    symbol: u32,
}

fn remainders(branch: &Branch, x: f64, y: f64, k: usize) -> Result<Vec<(f64, f64)>> {
    let h = y - x;
    let fx: Vec<f64> = (0..=k).map(|t| branch.derivative(x, t)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(k + 1);
    for l in 0..=k {
        let (head, head_abs) = if l == 0 {
            let inc = branch.forward_increment(x, h);
            (inc, inc.abs())
        } else {
            let fy = branch.derivative(y, l)?;
            (fy - fx[l], fy.abs() + fx[l].abs())
        };
        let mut r = head;
        let mut scale = head_abs;
        let mut fact = 1.0;
        let mut hp = 1.0;
        for (i, ft) in fx.iter().enumerate().skip(l + 1) {
            let m = i - l;
            fact *= m as f64;
            hp *= h;
            let term = ft * hp / fact;
            r -= term;
            scale += term.abs();
        }
        out.push((r, 4.0 * f64::EPSILON * scale));
    }
    Ok(out)
}

fn sample_pairs(sys: &BranchSystem, opts: &WhitneyOptions) -> Result<Vec<Pair>> {
    let d = sys.d();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();
    let left = |w: &Word| sys.cylinder_hull(w).map(|h| h.a);
    for m in opts.levels.clone() {
        if m == 0 {
            return Err(Error::InvalidParameter("Whitney levels start at 1".into()));
        }
        for i in 1..=d as u32 {
            // Domain ends of J_i against a point one child in.
            let base_l = Word::repeat(1, m - 1).append(i);
            let x = sys.branch(i)?.lo;
            let y = left(&base_l.prepend(2))?;
            out.push(Pair {
                level: m,
                x,
                y,
                symbol: i,
            });
            let base_r = Word::repeat(d as u32, m - 1).append(i);
            let h = sys.cylinder_hull(&base_r.prepend(d as u32 - 1))?;
            out.push(Pair {
                level: m,
                x: h.b(),
                y: sys.branch(i)?.hi,
                symbol: i,
            });
        }
        for _ in 0..opts.sample_count {
            let c = Word::from_symbols((0..m).map(|_| rng.random_range(1..=d as u32)).collect());
            let s = rng.random_range(1..d as u32);
            let mut draw = |first: u32| {
                let mut u: Vec<u32> = (0..POINT_DEPTH).map(|_| rng.random_range(1..=d as u32)).collect();
                u[POINT_DEPTH - 1] = first;
                Word::from_symbols(u).concat(&c)
            };
            let (a, b) = (draw(s), draw(s + 1));
            let (x, y) = (left(&a)?, left(&b)?);
            let symbol = c.symbols()[m - 1];
            out.push(Pair {
                level: m,
                x: x.min(y),
                y: x.max(y),
                symbol,
            });
        }
    }
    Ok(out)
}

/// Fits the remainder envelopes of the forward map for orders `0..=k`.
pub fn whitney_check(sys: &BranchSystem, k: usize, eps: f64, opts: &WhitneyOptions) -> Result<WhitneyReport> {
    check_eps(eps)?;
    let pairs = sample_pairs(sys, opts)?;
    let rs: Vec<Vec<(f64, f64)>> = pairs
        .par_iter()
        .map(|p| remainders(sys.branch(p.symbol)?, p.x, p.y, k))
        .collect::<Result<_>>()?;
    let mut orders = Vec::with_capacity(k + 1);
    for l in 0..=k {
        let target = (k - l) as f64 + eps;
        let mut levels = Vec::new();
        for m in opts.levels.clone() {
            let best = pairs
                .iter()
                .zip(&rs)
                .filter(|(p, r)| p.level == m && p.y > p.x && r[l].0.abs() > NOISE_MULTIPLE * r[l].1)
                .max_by(|a, b| a.1[l].0.abs().total_cmp(&b.1[l].0.abs()));
            if let Some((p, r)) = best {
                levels.push(RemainderLevel {
                    level: m,
                    log_distance: (p.y - p.x).ln(),
                    log_remainder: r[l].0.abs().ln(),
                });
            }
        }
        let (exponent, r_squared) = if levels.len() >= 2 {
            let xs: Vec<f64> = levels.iter().map(|v| v.log_distance).collect();
            let ys: Vec<f64> = levels.iter().map(|v| v.log_remainder).collect();
            let f = ols(&xs, &ys)?;
            (Some(f.slope), Some(f.r_squared))
        } else {
            (None, None)
        };
        let exact = levels.is_empty();
        let pass = exact || exponent.is_some_and(|e| e >= target - opts.tolerance);
        orders.push(WhitneyOrder {
            l,
            target,
            exponent,
            r_squared,
            exact,
            pass,
            levels,
        });
    }
    Ok(WhitneyReport {
        k,
        eps,
        tolerance: opts.tolerance,
        exact_case: orders.iter().all(|o| o.exact),
        pairs_used: pairs.len(),
        reconstruction: reconstruction(sys, k, opts)?,
        orders,
    })
}

/// Compares `t!·DD` over the partition points of nested cylinders with `f_t`.
fn reconstruction(sys: &BranchSystem, k: usize, opts: &WhitneyOptions) -> Result<Vec<ReconstructionRow>> {
    let d = sys.d();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x7ec0);
    let deep = *opts.levels.end() + POINT_DEPTH;
    let points: Vec<Word> = (0..8)
        .map(|_| Word::from_symbols((0..deep).map(|_| rng.random_range(1..=d as u32)).collect()))
        .collect();
    let mut rows = Vec::new();
    for m in opts.levels.clone() {
        for t in 1..=k.min(2 * d - 1) {
            let mut worst: f64 = 0.0;
            let mut rounding: f64 = 0.0;
            let mut used = 0;
            for v in &points {
                let anc = v.suffix(deep - m);
                let branch = sys.branch(anc.symbols()[m - 1])?;
                let x = sys.cylinder_hull(v)?.a;
                let dec = sys.child_decomposition(&anc)?;
                let nodes: Vec<f64> = dec
                    .interleaved()
                    .iter()
                    .map(|h| h.a)
                    .chain(std::iter::once(dec.children[d - 1].b()))
                    .take(t + 1)
                    .collect();
                // Partition points below double resolution carry no information.
                if nodes.windows(2).any(|w| w[1] <= w[0]) {
                    continue;
                }
                used += 1;
                let vals: Vec<f64> = nodes
                    .iter()
                    .map(|&n| branch.forward_increment(nodes[0], n - nodes[0]))
                    .collect();
                let fact: f64 = (1..=t).map(|i| i as f64).product();
                let est = fact * super::dd::divided_difference(&nodes, &vals, t)?;
                worst = worst.max((est - branch.derivative(x, t)?).abs());
                let spacing = nodes.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
                let vmax = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
                rounding = rounding.max(f64::EPSILON * vmax * fact / spacing.powi(t as i32));
            }
            if used == 0 {
                continue;
            }
            rows.push(ReconstructionRow {
                level: m,
                order: t,
                max_abs_error: worst,
                rounding,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_is_exact() {
        let s = BranchSystem::affine(3, &[0.2, 0.1, 0.2, 0.1, 0.4]).unwrap();
        let r = whitney_check(&s, 2, 0.5, &WhitneyOptions::default()).unwrap();
        assert!(r.exact_case && r.pass());
    }

    #[test]
    fn unresolved_levels_are_skipped() {
        let s = BranchSystem::power_example(3, 2, 0.5).unwrap().regroup(2).unwrap();
        let r = whitney_check(&s, 2, 0.5, &WhitneyOptions::default()).unwrap();
        assert!(r.reconstruction.iter().all(|row| row.level < 12));
    }

    #[test]
    fn bad_eps_rejected() {
        let s = BranchSystem::affine(2, &[0.4, 0.2, 0.4]).unwrap();
        assert!(whitney_check(&s, 1, 0.0, &WhitneyOptions::default()).is_err());
        assert!(whitney_check(&s, 1, 1.5, &WhitneyOptions::default()).is_err());
    }
}
