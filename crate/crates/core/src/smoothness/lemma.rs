//! Rigidity of interpolants with bounded `k`-th derivative variation.
//!
//! Two maps `f, g` that agree on `2d` points and whose `k`-th derivatives
//! vary by at most `M` are claimed to stay within `M` of each other in every
//! derivative of order `t ≤ k`, provided `k < 2d`. Since `D^k(f - g)` has a
//! zero and varies by at most `2M`, only `2M` follows in general; reports
//! carry both checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `|f(p) - g(p)|` accepted on the interpolation points.
pub const INTERPOLATION_TOL: f64 = 1e-10;

/// Coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Polynomial { coeffs }
    }

    /// `Π (x - r)`.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots.iter().fold(Polynomial::new(vec![1.0]), |p, r| {
            p.mul(&Polynomial::new(vec![-r, 1.0]))
        })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Polynomial::new(Vec::new());
        }
        let mut c = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let at = |p: &Polynomial, i: usize| p.coeffs.get(i).copied().unwrap_or(0.0);
        Polynomial::new((0..n).map(|i| at(self, i) + at(other, i)).collect())
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `D^t p(x)` by Horner on the differentiated coefficients.
    pub fn derivative(&self, x: f64, t: usize) -> f64 {
        let mut acc = 0.0;
        for i in (t..self.coeffs.len()).rev() {
            let falling: f64 = (0..t).map(|j| (i - j) as f64).product();
            acc = acc * x + self.coeffs[i] * falling;
        }
        acc
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }
}

/// `f` and `g = f + η Π_{p ∈ A1} (x - p) q` agreeing on `A1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaPair {
    pub a1: Vec<f64>,
    pub f: Polynomial,
    pub g: Polynomial,
}

impl LemmaPair {
    pub fn perturb(a1: Vec<f64>, f: Polynomial, q: &Polynomial, eta: f64) -> Self {
        let g = f.add(&Polynomial::from_roots(&a1).mul(q).scale(eta));
        LemmaPair { a1, f, g }
    }

    /// Increasing `f` with `f(0) = 0`, `f(1) = 1`; `A1` holds `0`, `1` and
    /// `2d - 2` interior points at least `0.02` apart.
    pub fn random(rng: &mut ChaCha8Rng, d: usize) -> Self {
        let deg = rng.random_range(3..=7usize);
        let raw: Vec<f64> = (0..deg).map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut coeffs = vec![0.0];
        coeffs.extend(raw.iter().map(|c| c / total));
        let f = Polynomial::new(coeffs);
        let a1 = loop {
            let mut pts: Vec<f64> = (0..2 * d - 2).map(|_| rng.random_range(0.02..0.98)).collect();
            pts.push(0.0);
            pts.push(1.0);
            pts.sort_by(f64::total_cmp);
            if pts.windows(2).all(|w| w[1] - w[0] >= 0.02) {
                break pts;
            }
        };
        let qdeg = rng.random_range(0..=2usize);
        let q = Polynomial::new((0..=qdeg).map(|_| rng.random_range(-1.0..1.0)).collect());
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let eta: f64 = rng.random_range(1e-3..1e-1);
        // Shrink η until g is increasing too.
        let h = Polynomial::from_roots(&a1).mul(&q);
        let grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
        let min_df = grid.iter().map(|&x| f.derivative(x, 1)).fold(f64::INFINITY, f64::min);
        let max_dh = grid.iter().map(|&x| h.derivative(x, 1).abs()).fold(0.0, f64::max);
        let eta = if max_dh > 0.0 {
            eta.min(0.5 * min_df / max_dh)
        } else {
            eta
        };
        Self::perturb(a1, f, &q, sign * eta)
    }

    /// `f + s (g - f)`: the same interpolation points with the perturbation scaled.
    pub fn scaled(&self, s: f64) -> LemmaPair {
        let diff = self.g.add(&self.f.scale(-1.0)).scale(s);
        LemmaPair {
            a1: self.a1.clone(),
            f: self.f.clone(),
            g: self.f.add(&diff),
        }
    }

    /// A seeded family of random pairs.
    pub fn suite(seed: u64, d: usize, count: usize) -> Vec<LemmaPair> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| Self::random(&mut rng, d)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaOrder {
    pub t: usize,
    pub sup_difference: f64,
    /// `M - sup |D^t f - D^t g|`.
    pub margin: f64,
    pub holds: bool,
    /// `sup |D^t f - D^t g| ≤ 2M`, the bound the zero-plus-variation argument gives.
    pub holds_2m: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub d: usize,
    pub k: usize,
    /// `k < 2d`.
    pub hypothesis_holds: bool,
    pub variation_f: f64,
    pub variation_g: f64,
    /// `max(variation_f, variation_g)`.
    pub m: f64,
    pub interpolation_residual: f64,
    pub orders: Vec<LemmaOrder>,
    pub holds: bool,
    pub holds_2m: bool,
}

fn variation(p: &Polynomial, k: usize, grid: &[f64]) -> f64 {
    let (lo, hi) = grid.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
        let v = p.derivative(x, k);
        (lo.min(v), hi.max(v))
    });
    hi - lo
}

/// Checks `sup_grid |D^t f - D^t g| ≤ M` for `t ≤ k` on `grid` points over the hull of `A1`.
pub fn lemma_check(pair: &LemmaPair, k: usize, grid: usize) -> Result<LemmaReport> {
    let a1 = &pair.a1;
    if a1.len() < 4 || !a1.len().is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "A1 must hold 2d >= 4 points, got {}",
            a1.len()
        )));
    }
    if a1.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("A1 must be strictly increasing".into()));
    }
    if grid < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 points".into()));
    }
    let d = a1.len() / 2;
    let interpolation_residual = a1
        .iter()
        .map(|&p| (pair.f.eval(p) - pair.g.eval(p)).abs())
        .fold(0.0, f64::max);
    if interpolation_residual > INTERPOLATION_TOL {
        return Err(Error::Mismatch(format!(
            "g does not interpolate f on A1: residual {interpolation_residual:e}"
        )));
    }
    let (lo, hi) = (a1[0], a1[a1.len() - 1]);
    let xs: Vec<f64> = (0..grid)
        .map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64)
        .collect();
    let variation_f = variation(&pair.f, k, &xs);
    let variation_g = variation(&pair.g, k, &xs);
    let m = variation_f.max(variation_g);
    let orders: Vec<LemmaOrder> = (0..=k)
        .map(|t| {
            let sup = xs
                .iter()
                .map(|&x| (pair.f.derivative(x, t) - pair.g.derivative(x, t)).abs())
                .fold(0.0, f64::max);
            LemmaOrder {
                t,
                sup_difference: sup,
                margin: m - sup,
                holds: sup <= m,
                holds_2m: sup <= 2.0 * m,
            }
        })
        .collect();
    Ok(LemmaReport {
        d,
        k,
        hypothesis_holds: k < 2 * d,
        variation_f,
        variation_g,
        m,
        interpolation_residual,
        holds: orders.iter().all(|o| o.holds),
        holds_2m: orders.iter().all(|o| o.holds_2m),
        orders,
    })
}

/// `k = 2d`, `f(x) = x`, `g = f + η Π(x - p)`: every `D^k` is constant, so
/// `M = 0` while `f - g` does not vanish.
pub fn violation_probe(a1: Vec<f64>, eta: f64, grid: usize) -> Result<LemmaReport> {
    let k = a1.len();
    let pair = LemmaPair::perturb(a1, Polynomial::new(vec![0.0, 1.0]), &Polynomial::new(vec![1.0]), eta);
    lemma_check(&pair, k, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives() {
        let p = Polynomial::new(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(p.eval(2.0), 1.0 + 4.0 + 12.0 + 32.0);
        assert_eq!(p.derivative(2.0, 1), 2.0 + 12.0 + 48.0);
        assert_eq!(p.derivative(2.0, 3), 24.0);
        assert_eq!(p.derivative(2.0, 4), 0.0);
        let r = Polynomial::from_roots(&[0.5, 2.0]);
        assert_eq!(r.eval(0.5), 0.0);
        assert_eq!(r.degree(), 2);
    }

    #[test]
    fn zero_perturbation_has_full_margin() {
        let f = Polynomial::new(vec![0.0, 0.5, 0.2, 0.3]);
        let pair = LemmaPair::perturb(vec![0.0, 0.3, 0.6, 1.0], f, &Polynomial::new(vec![1.0]), 0.0);
        let r = lemma_check(&pair, 2, 1000).unwrap();
        assert!(r.holds);
        assert!(r.orders.iter().all(|o| o.margin == r.m));
    }

    #[test]
    fn unscaled_perturbation_is_trivial() {
        let pair = LemmaPair::suite(7, 3, 1).remove(0).scaled(0.0);
        let r = lemma_check(&pair, 4, 1000).unwrap();
        assert!(r.holds && r.orders.iter().all(|o| o.sup_difference == 0.0));
    }

    #[test]
    fn affine_six_points_order_four() {
        let a1 = vec![0.0, 0.15, 0.4, 0.55, 0.8, 1.0];
        let pair = LemmaPair::perturb(a1, Polynomial::new(vec![0.0, 1.0]), &Polynomial::new(vec![1.0]), 1e-3);
        let r = lemma_check(&pair, 4, 10_000).unwrap();
        assert!(r.hypothesis_holds && r.holds);
    }

    #[test]
    fn broken_hypothesis_fails() {
        let r = violation_probe(vec![0.0, 0.15, 0.4, 0.55, 0.8, 1.0], 1e-2, 10_000).unwrap();
        assert!(!r.hypothesis_holds);
        assert!(!r.holds);
    }

    #[test]
    fn non_interpolating_pair_rejected() {
        let pair = LemmaPair {
            a1: vec![0.0, 0.3, 0.6, 1.0],
            f: Polynomial::new(vec![0.0, 1.0]),
            g: Polynomial::new(vec![0.01, 1.0]),
        };
        assert!(matches!(lemma_check(&pair, 1, 100), Err(Error::Mismatch(_))));
    }
}
