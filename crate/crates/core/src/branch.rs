//! Expanding maps given by their inverse branches, and the cylinder
//! intervals those branches generate.
//!
//! Cylinder `I_{j_1..j_n}` is `f_{j_n}^{-1} ∘ .. ∘ f_{j_1}^{-1}([0,1])`:
//! branch `j_1` is applied first. Hulls carry an authoritative log-length
//! so that ratios stay accurate long after endpoint subtraction has lost
//! all significant digits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots::{solve_increasing, Tolerance};
use crate::symbolic::{check_alphabet, Word};

/// Below this log-length an interval is pushed through the linearization of the branch.
const LINEAR_REGIME_LOG_LEN: f64 = -600.0;

/// Convex hull `[a, a + exp(log_len)]` of a cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hull {
    pub a: f64,
    pub log_len: f64,
}

impl Hull {
    pub const UNIT: Hull = Hull { a: 0.0, log_len: 0.0 };

    pub fn new(a: f64, b: f64) -> Result<Hull> {
        if !(b > a) {
            return Err(Error::InvalidParameter(format!("empty hull [{a}, {b}]")));
        }
        Ok(Hull {
            a,
            log_len: (b - a).ln(),
        })
    }

    pub fn len(&self) -> f64 {
        self.log_len.exp()
    }

    pub fn b(&self) -> f64 {
        self.a + self.len()
    }

    /// Containment with absolute slack `tol`.
    pub fn contains(&self, other: &Hull, tol: f64) -> bool {
        other.a >= self.a - tol && other.b() <= self.b() + tol
    }
}

/// The shape of a single forward branch `f|J_i`.
#[derive(Debug, Clone, PartialEq)]
pub enum BranchMap {
    /// Affine from `J_i` onto `[0,1]`.
    Affine,
    /// `A (c x + x^p)` on `[0, 1/c]`, differentiable up to `order`.
    Power {
        scale: f64,
        slope: f64,
        exponent: f64,
        order: usize,
    },
    /// `t + amplitude sin(harmonic π t)` in the normalized coordinate `t` of `J_i`.
    Sine { amplitude: f64, harmonic: u32 },
    /// `f_{parts[n-1]} ∘ .. ∘ f_{parts[0]}`: an iterate restricted to a cylinder.
    Composite(Vec<Branch>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub index: u32,
    pub lo: f64,
    pub hi: f64,
    /// `hi - lo` as constructed, free of subtraction error.
    pub width: f64,
    pub map: BranchMap,
}

fn falling_factorial(p: f64, t: usize) -> f64 {
    (0..t).map(|i| p - i as f64).product()
}

/// `(x + δ)^p - x^p` without cancellation.
fn power_increment(x: f64, delta: f64, p: f64) -> f64 {
    if x == 0.0 {
        delta.powf(p)
    } else {
        x.powf(p) * (p * (delta / x).ln_1p()).exp_m1()
    }
}

impl Branch {
    /// Highest derivative order with an analytic formula on the whole domain.
    pub fn max_order(&self) -> usize {
        match &self.map {
            BranchMap::Affine | BranchMap::Sine { .. } => usize::MAX,
            BranchMap::Power { order, .. } => *order,
            BranchMap::Composite(parts) => parts.iter().map(Branch::max_order).min().unwrap_or(0),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn forward(&self, x: f64) -> f64 {
        match &self.map {
            BranchMap::Affine => (x - self.lo) / self.width,
            BranchMap::Power {
                scale, slope, exponent, ..
            } => scale * (slope * x + x.max(0.0).powf(*exponent)),
            BranchMap::Sine { amplitude, harmonic } => {
                let t = (x - self.lo) / self.width;
                t + amplitude * (*harmonic as f64 * std::f64::consts::PI * t).sin()
            }
            BranchMap::Composite(parts) => parts.iter().fold(x, |y, p| p.forward(y)),
        }
    }

    /// `f(x + δ) - f(x)` for `δ >= 0`, accurate relative to the result.
    pub fn forward_increment(&self, x: f64, delta: f64) -> f64 {
        match &self.map {
            BranchMap::Affine => delta / self.width,
            BranchMap::Power {
                scale, slope, exponent, ..
            } => scale * (slope * delta + power_increment(x.max(0.0), delta, *exponent)),
            BranchMap::Sine { amplitude, harmonic } => {
                let w = *harmonic as f64 * std::f64::consts::PI;
                let t = (x - self.lo) / self.width;
                let tau = delta / self.width;
                tau + amplitude * 2.0 * (w * (t + 0.5 * tau)).cos() * (0.5 * w * tau).sin()
            }
            BranchMap::Composite(parts) => {
                let (mut y, mut dy) = (x, delta);
                for p in parts {
                    dy = p.forward_increment(y, dy);
                    y = p.forward(y);
                }
                dy
            }
        }
    }

    /// Analytic `D^t f(x)`; `t = 0` is the map itself.
    pub fn derivative(&self, x: f64, t: usize) -> Result<f64> {
        if t > self.max_order() {
            return Err(Error::DerivativeOrder {
                branch: self.index,
                order: t,
                max: self.max_order(),
            });
        }
        if t == 0 {
            return Ok(self.forward(x));
        }
        Ok(match &self.map {
            BranchMap::Affine => {
                if t == 1 {
                    1.0 / self.width
                } else {
                    0.0
                }
            }
            BranchMap::Power {
                scale, slope, exponent, ..
            } => {
                let linear = if t == 1 { *slope } else { 0.0 };
                scale * (linear + falling_factorial(*exponent, t) * x.max(0.0).powf(exponent - t as f64))
            }
            BranchMap::Sine { amplitude, harmonic } => {
                let w = *harmonic as f64 * std::f64::consts::PI;
                let s = (x - self.lo) / self.width;
                let linear = if t == 1 { 1.0 } else { 0.0 };
                let phase = w * s + t as f64 * std::f64::consts::FRAC_PI_2;
                (linear + amplitude * w.powi(t as i32) * phase.sin()) / self.width.powi(t as i32)
            }
            BranchMap::Composite(parts) => {
                let jet = composite_jet(parts, x, t)?;
                jet[t] * (1..=t).map(|i| i as f64).product::<f64>()
            }
        })
    }

    /// `f^{-1}(y)` for `y` in `[0,1]`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(-1e-15..=1.0 + 1e-15).contains(&y) {
            return Err(Error::OutsideUnitInterval { x: y });
        }
        let y = y.clamp(0.0, 1.0);
        match &self.map {
            BranchMap::Affine => Ok(self.lo + self.width * y),
            BranchMap::Composite(parts) => parts.iter().rev().try_fold(y, |v, p| p.inverse(v)),
            BranchMap::Power { scale, slope, .. } => {
                if y == 0.0 {
                    return Ok(0.0);
                }
                // f(x) >= A c x, so y / (A c) overshoots the root.
                let start = (y / (scale * slope)).min(self.hi);
                self.solve_point(y, start)
            }
            BranchMap::Sine { .. } => self.solve_point(y, self.lo + self.width * y),
        }
    }

    fn solve_point(&self, y: f64, start: f64) -> Result<f64> {
        if y == 0.0 {
            return Ok(self.lo);
        }
        if y == 1.0 {
            return Ok(self.hi);
        }
        solve_increasing(
            |x| {
                let d1 = self.derivative(x, 1).unwrap_or(f64::NAN);
                (self.forward(x) - y, d1)
            },
            self.lo,
            self.hi,
            start,
            Tolerance::POINT,
        )
        .map_err(|reason| Error::RootFinding {
            branch: self.index,
            target: y,
            reason,
        })
    }

    /// Image of the hull under the inverse branch, with a relatively accurate length.
    pub fn push(&self, hull: &Hull) -> Result<Hull> {
        let u = self.inverse(hull.a)?;
        if let BranchMap::Affine = self.map {
            return Ok(Hull {
                a: u,
                log_len: hull.log_len + self.width.ln(),
            });
        }
        if let BranchMap::Composite(parts) = &self.map {
            return parts.iter().rev().try_fold(*hull, |h, p| p.push(&h));
        }
        let slope = self.derivative(u, 1)?;
        if hull.log_len < LINEAR_REGIME_LOG_LEN {
            return Ok(Hull {
                a: u,
                log_len: hull.log_len - slope.ln(),
            });
        }
        let target = hull.len();
        // `u` carries the inverse solve's rounding, so `hi - u` alone can cut
        // the root off for hulls ending at `hi`.
        let upper = ((self.hi - u).max(0.0) + 64.0 * f64::EPSILON * self.hi.abs()) * (1.0 + 1e-12) + 1e-300;
        let start = (target / slope).min(upper);
        let delta = solve_increasing(
            |dx| {
                let d1 = self.derivative(u + dx, 1).unwrap_or(f64::NAN);
                (self.forward_increment(u, dx) - target, d1)
            },
            0.0,
            upper,
            start,
            Tolerance { abs: 0.0, rel: 1e-15 },
        )
        .map_err(|reason| Error::RootFinding {
            branch: self.index,
            target,
            reason,
        })?;
        Ok(Hull {
            a: u,
            log_len: delta.ln(),
        })
    }

    /// Uniform lower bound for the forward derivative on the domain.
    pub fn min_forward_derivative(&self) -> f64 {
        match &self.map {
            BranchMap::Affine => 1.0 / self.width,
            BranchMap::Power { scale, slope, .. } => scale * slope,
            BranchMap::Sine { .. } => {
                let grid = 2048;
                (0..=grid)
                    .map(|i| {
                        let x = self.lo + self.width * i as f64 / grid as f64;
                        self.derivative(x, 1).unwrap_or(f64::NAN)
                    })
                    .fold(f64::INFINITY, f64::min)
            }
            BranchMap::Composite(parts) => parts.iter().map(Branch::min_forward_derivative).product(),
        }
    }
}

/// Taylor coefficients `D^s h(x) / s!`, `s = 0..=t`, of the composite `h`.
fn composite_jet(parts: &[Branch], x: f64, t: usize) -> Result<Vec<f64>> {
    let mut jet = vec![0.0; t + 1];
    jet[0] = x;
    if t >= 1 {
        jet[1] = 1.0;
    }
    for p in parts {
        let u = jet[0];
        let mut outer = Vec::with_capacity(t + 1);
        let mut fact = 1.0;
        for s in 0..=t {
            if s > 0 {
                fact *= s as f64;
            }
            outer.push(p.derivative(u, s)? / fact);
        }
        // Σ_s outer[s] (jet - u)^s, truncated at degree t.
        let mut inner = jet.clone();
        inner[0] = 0.0;
        let mut power = vec![0.0; t + 1];
        power[0] = 1.0;
        let mut next = vec![0.0; t + 1];
        next[0] = outer[0];
        for coeff in outer.iter().skip(1) {
            let mut prod = vec![0.0; t + 1];
            for (i, &a) in power.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (j, &b) in inner.iter().enumerate().skip(1) {
                    if i + j > t {
                        break;
                    }
                    prod[i + j] += a * b;
                }
            }
            power = prod;
            for (n, &pw) in next.iter_mut().zip(power.iter()) {
                *n += coeff * pw;
            }
        }
        jet = next;
    }
    Ok(jet)
}

/// Smoothness class of the forward map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Smoothness {
    Analytic,
    /// `C^{k+ε}`.
    Finite {
        k: usize,
        eps: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PerturbationShape {
    Sine { harmonic: u32 },
}

/// Children `I_{j0 w}` and gaps of a cylinder `I_w`, left to right.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChildDecomposition {
    pub children: Vec<Hull>,
    pub gaps: Vec<Hull>,
}

impl ChildDecomposition {
    /// Child 1, gap 1, child 2, .., child d.
    pub fn interleaved(&self) -> Vec<Hull> {
        let mut v = Vec::with_capacity(self.children.len() + self.gaps.len());
        for (i, c) in self.children.iter().enumerate() {
            v.push(*c);
            if let Some(g) = self.gaps.get(i) {
                v.push(*g);
            }
        }
        v
    }
}

/// `d` orientation preserving expanding branches with domains `J_1 < .. < J_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchSystem {
    d: usize,
    branches: Vec<Branch>,
    smoothness: Smoothness,
    /// `J_1, gap_1, J_2, .., J_d` as hulls.
    pieces: Vec<Hull>,
}

impl BranchSystem {
    fn from_branches(branches: Vec<Branch>, gap_widths: Vec<f64>, smoothness: Smoothness) -> Result<Self> {
        let d = branches.len();
        check_alphabet(d)?;
        if gap_widths.len() + 1 != d {
            return Err(Error::InvalidParameter("need d - 1 gaps".into()));
        }
        if branches[0].lo != 0.0 || (branches[d - 1].hi - 1.0).abs() > 1e-14 {
            return Err(Error::InvalidParameter(
                "branch domains must start at 0 and end at 1".into(),
            ));
        }
        for (i, b) in branches.iter().enumerate() {
            if !(b.width > 0.0) {
                return Err(Error::InvalidParameter(format!("branch {} has empty domain", i + 1)));
            }
            let (f_lo, f_hi) = (b.forward(b.lo), b.forward(b.hi));
            if f_lo.abs() > 1e-12 || (f_hi - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "branch {} must map its domain increasingly onto [0,1] (got f(lo)={f_lo}, f(hi)={f_hi})",
                    i + 1
                )));
            }
            let m = b.min_forward_derivative();
            if !(m > 1.0) {
                return Err(Error::NotExpanding {
                    branch: b.index,
                    min_derivative: m,
                });
            }
        }
        for (i, w) in gap_widths.iter().enumerate() {
            if !(*w > 0.0) || branches[i].hi >= branches[i + 1].lo {
                return Err(Error::InvalidParameter(format!(
                    "domains {} and {} must be separated by a nonempty gap",
                    i + 1,
                    i + 2
                )));
            }
        }
        let mut pieces = Vec::with_capacity(2 * d - 1);
        for (i, b) in branches.iter().enumerate() {
            pieces.push(Hull {
                a: b.lo,
                log_len: b.width.ln(),
            });
            if i + 1 < d {
                pieces.push(Hull {
                    a: b.hi,
                    log_len: gap_widths[i].ln(),
                });
            }
        }
        Ok(BranchSystem {
            d,
            branches,
            smoothness,
            pieces,
        })
    }

    /// Affine system whose children and gaps of `[0,1]` have the given lengths,
    /// listed as child 1, gap 1, child 2, .., child d.
    pub fn affine(d: usize, lengths: &[f64]) -> Result<Self> {
        Self::affine_with_map(d, lengths, |_| BranchMap::Affine, Smoothness::Analytic)
    }

    fn affine_with_map(
        d: usize,
        lengths: &[f64],
        map: impl Fn(usize) -> BranchMap,
        smoothness: Smoothness,
    ) -> Result<Self> {
        check_alphabet(d)?;
        if lengths.len() != 2 * d - 1 {
            return Err(Error::InvalidParameter(format!(
                "expected {} lengths for d = {d}, got {}",
                2 * d - 1,
                lengths.len()
            )));
        }
        if lengths.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::InvalidParameter("lengths must be positive".into()));
        }
        let total: f64 = lengths.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("lengths sum to {total}, not 1")));
        }
        let mut branches = Vec::with_capacity(d);
        let mut gaps = Vec::with_capacity(d - 1);
        let mut pos = 0.0;
        for (i, &l) in lengths.iter().enumerate() {
            if i % 2 == 0 {
                let hi = if i + 1 == lengths.len() { 1.0 } else { pos + l };
                branches.push(Branch {
                    index: (i / 2 + 1) as u32,
                    lo: pos,
                    hi,
                    width: l,
                    map: map(i / 2),
                });
            } else {
                gaps.push(l);
            }
            pos += l;
        }
        Self::from_branches(branches, gaps, smoothness)
    }

    /// `f(x) = A((2d-1)x + x^{k+ε})` on `J_1`, affine on `J_2..J_d`, with
    /// `J_i = [(2i-2)/(2d-1), (2i-1)/(2d-1)]` and `A` normalizing `f(J_1) = [0,1]`.
    pub fn power_example(d: usize, k: usize, eps: f64) -> Result<Self> {
        check_alphabet(d)?;
        if k < 1 {
            return Err(Error::InvalidParameter("k >= 1 required".into()));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("0 < eps < 1 required, got {eps}")));
        }
        if k >= 2 * d - 1 {
            return Err(Error::InvalidParameter(format!(
                "k < 2d - 1 required (k = {k}, d = {d})"
            )));
        }
        let c = (2 * d - 1) as f64;
        let p = k as f64 + eps;
        let scale = 1.0 / (1.0 + c.powf(-p));
        let width = 1.0 / c;
        let mut branches = Vec::with_capacity(d);
        for i in 1..=d {
            let lo = if i == 1 { 0.0 } else { (2 * i - 2) as f64 / c };
            let hi = if i == d { 1.0 } else { (2 * i - 1) as f64 / c };
            let map = if i == 1 {
                BranchMap::Power {
                    scale,
                    slope: c,
                    exponent: p,
                    order: k,
                }
            } else {
                BranchMap::Affine
            };
            branches.push(Branch {
                index: i as u32,
                lo,
                hi,
                width,
                map,
            });
        }
        Self::from_branches(branches, vec![width; d - 1], Smoothness::Finite { k, eps })
    }

    /// Affine system plus `amplitude · sin(harmonic π t)` on every branch.
    pub fn perturbed_affine(d: usize, lengths: &[f64], amplitude: f64, shape: PerturbationShape) -> Result<Self> {
        let PerturbationShape::Sine { harmonic } = shape;
        if harmonic == 0 {
            return Err(Error::InvalidParameter("harmonic must be >= 1".into()));
        }
        let sys = Self::affine_with_map(
            d,
            lengths,
            |_| BranchMap::Sine { amplitude, harmonic },
            Smoothness::Analytic,
        );
        let sys = match sys {
            Err(Error::NotExpanding { branch, min_derivative }) => {
                return Err(Error::NotExpanding { branch, min_derivative })
            }
            other => other?,
        };
        for b in &sys.branches {
            let m = b.min_forward_derivative();
            if !(m > 1.0 + 1e-6) {
                return Err(Error::NotExpanding {
                    branch: b.index,
                    min_derivative: m,
                });
            }
        }
        Ok(sys)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch(&self, symbol: u32) -> Result<&Branch> {
        self.branches
            .get((symbol as usize).wrapping_sub(1))
            .ok_or(Error::SymbolOutOfRange { symbol, d: self.d })
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    /// `J_1, gap_1, .., J_d` as hulls of `[0,1]`.
    pub fn base_pieces(&self) -> &[Hull] {
        &self.pieces
    }

    /// The `2d` endpoints of the branch domains.
    pub fn partition_points(&self) -> Vec<f64> {
        self.branches.iter().flat_map(|b| [b.lo, b.hi]).collect()
    }

    pub fn is_affine(&self) -> bool {
        self.branches.iter().all(|b| matches!(b.map, BranchMap::Affine))
    }

    /// Pushes a hull through `f_{w_n}^{-1} ∘ .. ∘ f_{w_1}^{-1}`.
    pub fn push_word(&self, hull: &Hull, w: &Word) -> Result<Hull> {
        w.symbols().iter().try_fold(*hull, |h, &s| self.branch(s)?.push(&h))
    }

    /// Pushes a point through the same composition.
    pub fn push_point(&self, x: f64, w: &Word) -> Result<f64> {
        w.symbols().iter().try_fold(x, |y, &s| self.branch(s)?.inverse(y))
    }

    pub fn cylinder_hull(&self, w: &Word) -> Result<Hull> {
        self.push_word(&Hull::UNIT, w)
    }

    pub fn child_decomposition(&self, w: &Word) -> Result<ChildDecomposition> {
        w.check(self.d)?;
        let mut children = Vec::with_capacity(self.d);
        let mut gaps = Vec::with_capacity(self.d - 1);
        for (i, piece) in self.pieces.iter().enumerate() {
            let h = self.push_word(piece, w)?;
            if i % 2 == 0 {
                children.push(h);
            } else {
                gaps.push(h);
            }
        }
        Ok(ChildDecomposition { children, gaps })
    }

    /// `|F_w([0, x])| / |F_w([0, 1])|`: position of `F_w(x)` inside `I_w` in relative coordinates.
    pub fn relative_image(&self, w: &Word, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        if x >= 1.0 {
            return Ok(1.0);
        }
        let part = self.push_word(
            &Hull {
                a: 0.0,
                log_len: x.ln(),
            },
            w,
        )?;
        let whole = self.push_word(&Hull::UNIT, w)?;
        Ok((part.log_len - whole.log_len).exp())
    }

    pub fn branch_at(&self, x: f64) -> Result<&Branch> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutsideUnitInterval { x });
        }
        if let Some(b) = self.branches.iter().find(|b| b.contains(x)) {
            return Ok(b);
        }
        let i = self.branches.iter().position(|b| b.lo > x).unwrap_or(self.d - 1);
        Err(Error::InGap {
            x,
            left: self.branches[i - 1].hi,
            right: self.branches[i].lo,
        })
    }

    /// The expanding map.
    pub fn forward(&self, x: f64) -> Result<f64> {
        Ok(self.branch_at(x)?.forward(x))
    }

    /// Analytic `D^t f(x)` of the forward map.
    pub fn induced_map_derivatives(&self, x: f64, t: usize) -> Result<f64> {
        self.branch_at(x)?.derivative(x, t)
    }

    /// `λ = max_i sup |D f_i^{-1}|`.
    pub fn contraction_factor(&self) -> f64 {
        self.branches
            .iter()
            .map(|b| 1.0 / b.min_forward_derivative())
            .fold(0.0, f64::max)
    }

    /// The system of `n`-th iterates on `d^n` branches.
    ///
    /// A new symbol codes a forward block `α_1..α_n` lexicographically, which
    /// keeps the domains ordered left to right. Dual words of the new system
    /// correspond to old dual words with every block reversed, see
    /// [`crate::symbolic::BlockOrder::Reversed`].
    pub fn regroup(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("regroup block size must be >= 1".into()));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let big = self.d.pow(n as u32);
        let mut branches = Vec::with_capacity(big);
        for code in 0..big {
            // α_1 is the most significant digit.
            let mut block = vec![0u32; n];
            let mut c = code;
            for i in (0..n).rev() {
                block[i] = (c % self.d) as u32 + 1;
                c /= self.d;
            }
            let parts: Vec<Branch> = block.iter().map(|&s| self.branches[s as usize - 1].clone()).collect();
            // Inverse branch f_{α_1}^{-1} ∘ .. ∘ f_{α_n}^{-1}: dual word α_n .. α_1.
            let dual: Vec<u32> = block.iter().rev().copied().collect();
            let dom = self.cylinder_hull(&Word::from_symbols(dual.clone()))?;
            let lo = self.push_point(0.0, &Word::from_symbols(dual.clone()))?;
            let hi = self.push_point(1.0, &Word::from_symbols(dual))?;
            branches.push(Branch {
                index: code as u32 + 1,
                lo,
                hi,
                width: dom.len(),
                map: BranchMap::Composite(parts),
            });
        }
        branches[0].lo = 0.0;
        branches[big - 1].hi = 1.0;
        let gaps: Vec<f64> = branches.windows(2).map(|w| w[1].lo - w[0].hi).collect();
        Self::from_branches(branches, gaps, self.smoothness)
    }
}
