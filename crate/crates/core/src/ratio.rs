//! Ratio geometry, the scaling function and the metrics it induces on the
//! dual Cantor set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branch::BranchSystem;
use crate::error::{Error, Result};
use crate::fit::{ols, LinearFit};
use crate::symbolic::{check_alphabet, lcp, ungroup_with, BlockOrder, DualPoint, Seq, Word};

/// Tolerance on the coordinate sum of a ratio vector.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Differences below this are treated as exact zeros.
pub const CONSTANT_FLOOR: f64 = 1e-12;

/// A point of the open simplex: `d` child ratios and `d - 1` gap ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioVector {
    children: Vec<f64>,
    gaps: Vec<f64>,
}

impl RatioVector {
    pub fn new(children: Vec<f64>, gaps: Vec<f64>) -> Result<Self> {
        check_alphabet(children.len())?;
        if gaps.len() + 1 != children.len() {
            return Err(Error::Simplex(format!(
                "{} children need {} gaps, got {}",
                children.len(),
                children.len() - 1,
                gaps.len()
            )));
        }
        let v = RatioVector { children, gaps };
        if let Some(x) = v.coords().find(|x| !(*x > 0.0 && *x < 1.0)) {
            return Err(Error::Simplex(format!("entry {x} outside (0,1)")));
        }
        let s = v.sum();
        if (s - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::Simplex(format!("entries sum to {s}")));
        }
        Ok(v)
    }

    /// From spatial order: child 1, gap 1, child 2, .., child d.
    pub fn from_interleaved(v: &[f64]) -> Result<Self> {
        if v.len() < 3 || v.len().is_multiple_of(2) {
            return Err(Error::Simplex(format!("{} entries is not 2d - 1", v.len())));
        }
        let children = v.iter().step_by(2).copied().collect();
        let gaps = v.iter().skip(1).step_by(2).copied().collect();
        Self::new(children, gaps)
    }

    /// Divides positive interleaved lengths by their sum.
    pub fn normalize_interleaved(raw: &[f64]) -> Result<Self> {
        if let Some(x) = raw.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
            return Err(Error::Simplex(format!("length {x} is not positive")));
        }
        let s: f64 = raw.iter().sum();
        Self::from_interleaved(&raw.iter().map(|x| x / s).collect::<Vec<_>>())
    }

    /// Normalizes interleaved log-lengths without leaving log space until the end.
    pub fn from_log_lengths(logs: &[f64]) -> Result<Self> {
        let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !m.is_finite() {
            return Err(Error::Simplex("non-finite log-length".into()));
        }
        let lse = m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln();
        Self::from_interleaved(&logs.iter().map(|l| (l - lse).exp()).collect::<Vec<_>>())
    }

    pub fn d(&self) -> usize {
        self.children.len()
    }

    pub fn children(&self) -> &[f64] {
        &self.children
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    /// Child ratio for `symbol` in `1..=d`.
    pub fn child(&self, symbol: u32) -> f64 {
        self.children[symbol as usize - 1]
    }

    /// Children first, then gaps.
    pub fn coords(&self) -> impl Iterator<Item = f64> + '_ {
        self.children.iter().chain(&self.gaps).copied()
    }

    pub fn interleaved(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.d() - 1);
        for (i, c) in self.children.iter().enumerate() {
            v.push(*c);
            if let Some(g) = self.gaps.get(i) {
                v.push(*g);
            }
        }
        v
    }

    pub fn sum(&self) -> f64 {
        self.coords().sum()
    }

    /// Max-norm distance.
    pub fn distance(&self, other: &RatioVector) -> f64 {
        self.coords()
            .zip(other.coords())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// The `2d` partition points from 0 to 1; both ends are exact.
    pub fn cumulative(&self) -> Vec<f64> {
        let pieces = self.interleaved();
        let total: f64 = pieces.iter().sum();
        let mut pts = Vec::with_capacity(pieces.len() + 1);
        let mut acc = 0.0;
        pts.push(0.0);
        for p in &pieces[..pieces.len() - 1] {
            acc += p;
            pts.push(acc / total);
        }
        pts.push(1.0);
        pts
    }
}

/// Anything that assigns a ratio vector to each finite dual word.
pub trait ScalingSource: Sync {
    fn d(&self) -> usize;

    /// `S(w)`.
    fn ratio(&self, w: &Word) -> Result<RatioVector>;

    /// `S(j w)` for a finite `j` followed by an infinite tail, read to `tail_depth` tail symbols.
    fn ratio_with_tail(&self, j: &Word, tail: &DualPoint, tail_depth: usize) -> Result<RatioVector> {
        self.ratio(&tail.prepend_word(j).truncate(j.len() + tail_depth))
    }

    /// `ln Π_t S(c_{t+1}..c_n tail)_{c_t}`.
    fn log_child_product(&self, c: &Word, tail: &Word) -> Result<f64> {
        let s = c.symbols();
        let mut acc = 0.0;
        for t in 0..s.len() {
            let below = Word::from_symbols(s[t + 1..].to_vec()).concat(tail);
            acc += self.ratio(&below)?.child(s[t]).ln();
        }
        Ok(acc)
    }

    /// `ln |I_w|` when the source carries a geometric realization.
    fn cylinder_log_length(&self, _w: &Word) -> Option<Result<f64>> {
        None
    }

    /// True when `S` does not depend on the word.
    fn is_constant(&self) -> bool {
        false
    }
}

impl ScalingSource for BranchSystem {
    fn d(&self) -> usize {
        BranchSystem::d(self)
    }

    fn ratio(&self, w: &Word) -> Result<RatioVector> {
        ratio_geometry(self, w)
    }

    fn log_child_product(&self, c: &Word, tail: &Word) -> Result<f64> {
        let whole = self.cylinder_hull(&c.concat(tail))?;
        let base = self.cylinder_hull(tail)?;
        Ok(whole.log_len - base.log_len)
    }

    fn cylinder_log_length(&self, w: &Word) -> Option<Result<f64>> {
        Some(self.cylinder_hull(w).map(|h| h.log_len))
    }

    fn is_constant(&self) -> bool {
        self.is_affine()
    }
}

/// `S` read over the alphabet `{1..d^n}` of symbol blocks.
///
/// Symbol `c` stands for the dual block of [`BlockOrder::Reversed`], the
/// convention of [`BranchSystem::regroup`], so both views give the same cylinders.
#[derive(Debug, Clone)]
pub struct Regrouped<S> {
    inner: S,
    block: usize,
}

impl<S: ScalingSource> Regrouped<S> {
    pub fn new(inner: S, block: usize) -> Result<Self> {
        if block == 0 {
            return Err(Error::InvalidParameter("regroup block size must be >= 1".into()));
        }
        Ok(Regrouped { inner, block })
    }

    fn small(&self, w: &Word) -> Result<Word> {
        ungroup_with(w, self.inner.d(), self.block, BlockOrder::Reversed)
    }

    /// `(offset, length)` of `I_{u v}` inside `I_v`.
    fn relative(&self, u: &[u32], v: &Word) -> Result<(f64, f64)> {
        let (mut a, mut len) = (0.0, 1.0);
        let mut below = v.clone();
        for &s in u.iter().rev() {
            let r = self.inner.ratio(&below)?;
            let pts = r.cumulative();
            let i = 2 * (s as usize - 1);
            a += len * pts[i];
            len *= r.child(s);
            below = below.prepend(s);
        }
        Ok((a, len))
    }
}

impl<S: ScalingSource> ScalingSource for Regrouped<S> {
    fn d(&self) -> usize {
        self.inner.d().pow(self.block as u32)
    }

    fn ratio(&self, w: &Word) -> Result<RatioVector> {
        let v = self.small(w)?;
        let d = self.d();
        let pieces: Vec<(f64, f64)> = (1..=d as u32)
            .map(|c| {
                let u = ungroup_with(
                    &Word::from_symbols(vec![c]),
                    self.inner.d(),
                    self.block,
                    BlockOrder::Reversed,
                )?;
                self.relative(u.symbols(), &v)
            })
            .collect::<Result<_>>()?;
        let mut interleaved = Vec::with_capacity(2 * d - 1);
        for (i, p) in pieces.iter().enumerate() {
            if i > 0 {
                let prev = pieces[i - 1];
                interleaved.push(p.0 - (prev.0 + prev.1));
            }
            interleaved.push(p.1);
        }
        RatioVector::normalize_interleaved(&interleaved)
    }

    fn cylinder_log_length(&self, w: &Word) -> Option<Result<f64>> {
        match self.small(w) {
            Ok(v) => self.inner.cylinder_log_length(&v),
            Err(e) => Some(Err(e)),
        }
    }

    fn is_constant(&self) -> bool {
        self.inner.is_constant()
    }
}

/// `S(w)` of a branch system: the pieces of `I_w` relative to `|I_w|`.
pub fn ratio_geometry(sys: &BranchSystem, w: &Word) -> Result<RatioVector> {
    let logs: Vec<f64> = sys
        .child_decomposition(w)?
        .interleaved()
        .iter()
        .map(|h| h.log_len)
        .collect();
    RatioVector::from_log_lengths(&logs)
}

/// `|ln|I_w| - Σ_t ln S(w_{t+1}..w_n)_{w_t}|`.
pub fn log_length_residual(sys: &BranchSystem, w: &Word) -> Result<f64> {
    let direct = sys.cylinder_hull(w)?.log_len;
    let s = w.symbols();
    let mut acc = 0.0;
    for t in 0..s.len() {
        let below = Word::from_symbols(s[t + 1..].to_vec());
        acc += ratio_geometry(sys, &below)?.child(s[t]).ln();
    }
    Ok((direct - acc).abs())
}

/// Geometric decay `C γ^m` of `sup |S(j) - S(j')|` over pairs with lcp length `m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaFit {
    pub c: f64,
    pub gamma: f64,
    pub r_squared: f64,
    /// `S` is constant on the sample; `gamma = 0` by convention.
    pub degenerate: bool,
    /// `(m, sup |ΔS|)` per lcp length.
    pub levels: Vec<(usize, f64)>,
    /// Slope of `ln sup |ΔS|` against `ln |I_{j∩j'}|`, when lengths are available.
    pub strong_exponent: Option<f64>,
}

impl GammaFit {
    pub fn bound(&self, n: usize) -> f64 {
        if self.degenerate {
            0.0
        } else {
            self.c * self.gamma.powi(n as i32)
        }
    }
}

/// Estimates `(C, γ)` from pairs with lcp lengths `1..=max_depth`.
pub fn gamma_estimate(src: &dyn ScalingSource, max_depth: usize, sampler: &PairSampler) -> Result<GammaFit> {
    if max_depth < 4 {
        return Err(Error::InvalidParameter(format!(
            "gamma estimate needs max_depth >= 4, got {max_depth}"
        )));
    }
    let sampler = PairSampler {
        min_lcp: 1,
        max_lcp: max_depth,
        ..sampler.clone()
    };
    let d = src.d();
    let pairs = sampler.sample(d)?;
    // Finite words along the constant prefixes.
    let finite: Vec<(Word, Word, usize)> = (1..=max_depth)
        .flat_map(|m| (1..=d as u32).map(move |i| (Word::repeat(i, m), Word::repeat(i, m + 1), m)))
        .collect();
    let depth = |p: &SampledPair| p.lcp + sampler.eval_extra;
    let mut diffs: Vec<(usize, f64, Word)> = pairs
        .par_iter()
        .map(|p| {
            let n = depth(p);
            let a = src.ratio(&p.a.truncate(n))?;
            let b = src.ratio(&p.b.truncate(n))?;
            Ok((p.lcp, a.distance(&b), p.a.truncate(p.lcp)))
        })
        .collect::<Result<_>>()?;
    let finite_diffs: Vec<(usize, f64, Word)> = finite
        .par_iter()
        .map(|(a, b, m)| Ok((*m, src.ratio(a)?.distance(&src.ratio(b)?), a.clone())))
        .collect::<Result<_>>()?;
    diffs.extend(finite_diffs);

    let mut levels = Vec::new();
    let mut argmax = Vec::new();
    for m in 1..=max_depth {
        let best = diffs
            .iter()
            .filter(|(l, _, _)| *l == m)
            .max_by(|x, y| x.1.total_cmp(&y.1));
        if let Some((_, v, c)) = best {
            levels.push((m, *v));
            argmax.push(c.clone());
        }
    }
    if levels.iter().all(|(_, v)| *v < CONSTANT_FLOOR) {
        return Ok(GammaFit {
            c: 0.0,
            gamma: 0.0,
            r_squared: 1.0,
            degenerate: true,
            levels,
            strong_exponent: None,
        });
    }
    let usable: Vec<(usize, f64, &Word)> = levels
        .iter()
        .zip(&argmax)
        .filter(|((_, v), _)| *v >= CONSTANT_FLOOR)
        .map(|((m, v), c)| (*m, *v, c))
        .collect();
    let xs: Vec<f64> = usable.iter().map(|u| u.0 as f64).collect();
    let ys: Vec<f64> = usable.iter().map(|u| u.1.ln()).collect();
    let f = ols(&xs, &ys)?;
    let gamma = f.slope.exp();
    let c = usable
        .iter()
        .map(|(m, v, _)| v / gamma.powi(*m as i32))
        .fold(0.0, f64::max);
    let strong_exponent = {
        let lens: Option<Result<Vec<f64>>> = usable.iter().map(|(_, _, w)| src.cylinder_log_length(w)).collect();
        match lens {
            Some(l) => Some(ols(&l?, &ys)?.slope),
            None => None,
        }
    };
    Ok(GammaFit {
        c,
        gamma,
        r_squared: f.r_squared,
        degenerate: false,
        levels,
        strong_exponent,
    })
}

/// `S(truncate(j, n))` with the error bound `C γ^n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingLimit {
    pub value: RatioVector,
    pub error_bound: f64,
}

pub fn scaling_limit(src: &dyn ScalingSource, j: &DualPoint, n: usize, fit: &GammaFit) -> Result<ScalingLimit> {
    if n == 0 {
        return Err(Error::InvalidParameter("scaling limit needs depth >= 1".into()));
    }
    j.check(src.d())?;
    Ok(ScalingLimit {
        value: src.ratio(&j.truncate(n))?,
        error_bound: fit.bound(n),
    })
}

/// Finite family of tails over which the `ρ_S` product is maximized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailPolicy {
    /// Tails are all words of this length, repeated periodically.
    pub period: usize,
    /// Symbols of each tail actually used.
    pub depth: usize,
    /// Comparison depth for infinite points.
    pub lcp_bound: usize,
}

impl Default for TailPolicy {
    fn default() -> Self {
        TailPolicy {
            period: 3,
            depth: 12,
            lcp_bound: 64,
        }
    }
}

impl TailPolicy {
    pub fn tails(&self, d: usize) -> Vec<Word> {
        Word::all_of_length(self.period, d)
            .map(|u| {
                DualPoint::periodic(u)
                    .map(|p| p.truncate(self.depth))
                    .unwrap_or_default()
            })
            .collect()
    }
}

/// `ln ρ_S` for common prefix `c`: the largest child product over the tail family.
pub fn log_rho_s_prefix(src: &dyn ScalingSource, c: &Word, policy: &TailPolicy) -> Result<f64> {
    if c.is_empty() {
        return Ok(0.0);
    }
    let tails = policy.tails(src.d());
    let mut best = f64::NEG_INFINITY;
    for t in &tails {
        best = best.max(src.log_child_product(c, t)?);
    }
    Ok(best)
}

/// `ρ_S(a, b)`. Lcp length 0 gives 1; equal infinite points give 0.
pub fn rho_s<'a, 'b>(
    src: &dyn ScalingSource,
    a: impl Into<Seq<'a>>,
    b: impl Into<Seq<'b>>,
    policy: &TailPolicy,
) -> Result<f64> {
    let (a, b) = (a.into(), b.into());
    let l = lcp(a, b, Some(policy.lcp_bound))?;
    let infinite = matches!(a, Seq::Infinite(_)) || matches!(b, Seq::Infinite(_));
    if l.coincident && infinite {
        return Ok(0.0);
    }
    Ok(log_rho_s_prefix(src, &l.word, policy)?.exp())
}

/// Distance used on the dual Cantor set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Metric {
    RhoS(TailPolicy),
    RhoDelta(f64),
}

/// Seeded sampler of dual point pairs, stratified by lcp length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSampler {
    pub seed: u64,
    pub min_lcp: usize,
    pub max_lcp: usize,
    /// Random pairs per lcp length, on top of the constant-prefix pairs.
    pub pairs_per_level: usize,
    /// Symbols beyond the common prefix used when evaluating `S`.
    pub eval_extra: usize,
}

impl Default for PairSampler {
    fn default() -> Self {
        PairSampler {
            seed: 0x5eed,
            min_lcp: 1,
            max_lcp: 12,
            pairs_per_level: 24,
            eval_extra: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledPair {
    pub a: DualPoint,
    pub b: DualPoint,
    pub lcp: usize,
}

impl PairSampler {
    /// Pairs `(c x u, c y v)` with `|c| = m`, `x != y`. Every level contains
    /// the constant prefixes `c = i_m` for each symbol `i`, with every
    /// divergence `x < y` continued by the constant tails `x̄`, `ȳ`.
    pub fn sample(&self, d: usize) -> Result<Vec<SampledPair>> {
        check_alphabet(d)?;
        if self.min_lcp > self.max_lcp {
            return Err(Error::InvalidParameter(format!(
                "empty lcp range {}..={}",
                self.min_lcp, self.max_lcp
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let sym = |rng: &mut ChaCha8Rng| rng.random_range(1..=d as u32);
        let mut out = Vec::new();
        for m in self.min_lcp..=self.max_lcp {
            let constant = (1..=d as u32).map(|i| Word::repeat(i, m));
            let random: Vec<Word> = (0..self.pairs_per_level)
                .map(|_| Word::from_symbols((0..m).map(|_| sym(&mut rng)).collect()))
                .collect();
            for c in constant {
                for x in 1..=d as u32 {
                    for y in x + 1..=d as u32 {
                        let a = DualPoint::constant(x).prepend_word(&c);
                        let b = DualPoint::constant(y).prepend_word(&c);
                        out.push(SampledPair { a, b, lcp: m });
                    }
                }
            }
            let mut prefixes: Vec<(Word, u32, u32)> = Vec::new();
            for c in random {
                let x = sym(&mut rng);
                let y = loop {
                    let y = sym(&mut rng);
                    if y != x {
                        break y;
                    }
                };
                prefixes.push((c, x, y));
            }
            for (c, x, y) in prefixes {
                let a = self.tail(&mut rng, d)?.prepend(x).prepend_word(&c);
                let b = self.tail(&mut rng, d)?.prepend(y).prepend_word(&c);
                out.push(SampledPair { a, b, lcp: m });
            }
        }
        Ok(out)
    }

    fn tail(&self, rng: &mut ChaCha8Rng, d: usize) -> Result<DualPoint> {
        let plen = rng.random_range(0..=3usize);
        let qlen = rng.random_range(1..=3usize);
        let mut draw = |n: usize| Word::from_symbols((0..n).map(|_| rng.random_range(1..=d as u32)).collect());
        let prefix = draw(plen);
        let period = draw(qlen);
        DualPoint::new(prefix, period)
    }
}

/// One sampled pair, as emitted in sampling tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRecord {
    pub word_a: String,
    pub word_b: String,
    pub lcp_len: usize,
    pub metric: f64,
    pub delta_s: f64,
}

/// Envelope point of one lcp level: the pair with the largest `|ΔS|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderLevel {
    pub lcp: usize,
    pub log_metric: f64,
    pub log_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderEstimate {
    /// Infinite for a constant scaling function.
    pub exponent: f64,
    pub log_constant: f64,
    pub r_squared: f64,
    pub pairs_used: usize,
    pub residual_max: f64,
    pub constant: bool,
    pub levels: Vec<HolderLevel>,
    pub records: Vec<PairRecord>,
}

/// Minimum sample size for a Hölder fit.
pub const MIN_PAIRS: usize = 200;
/// Minimum number of distinct lcp lengths for a Hölder fit.
pub const MIN_LEVELS: usize = 6;

/// Slope of `ln sup|ΔS|` against `ln(metric)` over lcp levels.
pub fn holder_exponent(src: &dyn ScalingSource, metric: &Metric, sampler: &PairSampler) -> Result<HolderEstimate> {
    let d = src.d();
    let pairs = sampler.sample(d)?;
    let levels_spanned = sampler.max_lcp + 1 - sampler.min_lcp;
    if pairs.len() < MIN_PAIRS || levels_spanned < MIN_LEVELS {
        return Err(Error::Insufficient(format!(
            "{} pairs over {} lcp lengths; need {MIN_PAIRS} over {MIN_LEVELS}",
            pairs.len(),
            levels_spanned
        )));
    }
    if let Metric::RhoDelta(delta) = metric {
        if !(*delta > 0.0) {
            return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
        }
    }
    let records: Vec<PairRecord> = pairs
        .par_iter()
        .map(|p| {
            let n = p.lcp + sampler.eval_extra;
            let delta_s = src.ratio(&p.a.truncate(n))?.distance(&src.ratio(&p.b.truncate(n))?);
            let metric = match metric {
                Metric::RhoS(policy) => log_rho_s_prefix(src, &p.a.truncate(p.lcp), policy)?.exp(),
                Metric::RhoDelta(delta) => (-delta * p.lcp as f64).exp(),
            };
            Ok(PairRecord {
                word_a: p.a.encode(d),
                word_b: p.b.encode(d),
                lcp_len: p.lcp,
                metric,
                delta_s,
            })
        })
        .collect::<Result<_>>()?;

    let mut levels = Vec::new();
    for m in sampler.min_lcp..=sampler.max_lcp {
        let best = records
            .iter()
            .filter(|r| r.lcp_len == m)
            .max_by(|x, y| x.delta_s.total_cmp(&y.delta_s));
        if let Some(r) = best {
            levels.push(HolderLevel {
                lcp: m,
                log_metric: r.metric.ln(),
                log_delta: r.delta_s.ln(),
            });
        }
    }
    if records.iter().all(|r| r.delta_s < CONSTANT_FLOOR) {
        return Ok(HolderEstimate {
            exponent: f64::INFINITY,
            log_constant: f64::NEG_INFINITY,
            r_squared: 1.0,
            pairs_used: records.len(),
            residual_max: 0.0,
            constant: true,
            levels,
            records,
        });
    }
    let usable: Vec<&HolderLevel> = levels.iter().filter(|l| l.log_delta >= CONSTANT_FLOOR.ln()).collect();
    let xs: Vec<f64> = usable.iter().map(|l| l.log_metric).collect();
    let ys: Vec<f64> = usable.iter().map(|l| l.log_delta).collect();
    let LinearFit {
        slope,
        intercept,
        r_squared,
        residual_max,
        ..
    } = ols(&xs, &ys)?;
    Ok(HolderEstimate {
        exponent: slope,
        log_constant: intercept,
        r_squared,
        pairs_used: records.len(),
        residual_max,
        constant: false,
        levels,
        records,
    })
}

/// Band of `|I_c| / ρ_S(c)` over a set of prefixes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparability {
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Smallest `K` with every ratio in `[1/K, K]`.
    pub k: f64,
}

pub fn comparability(src: &dyn ScalingSource, prefixes: &[Word], policy: &TailPolicy) -> Result<Comparability> {
    if prefixes.is_empty() {
        return Err(Error::Insufficient("no prefixes".into()));
    }
    let logs: Vec<f64> = prefixes
        .par_iter()
        .map(|c| {
            let len = src
                .cylinder_log_length(c)
                .ok_or_else(|| Error::InvalidParameter("source has no cylinder lengths".into()))??;
            Ok(len - log_rho_s_prefix(src, c, policy)?)
        })
        .collect::<Result<_>>()?;
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Comparability {
        min_ratio: lo.exp(),
        max_ratio: hi.exp(),
        k: hi.max(-lo).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn third() -> BranchSystem {
        BranchSystem::affine(2, &[1.0 / 3.0; 3]).unwrap()
    }

    #[test]
    fn simplex_validation() {
        assert!(RatioVector::new(vec![0.4, 0.4], vec![0.2]).is_ok());
        assert!(RatioVector::new(vec![0.4, 0.5], vec![0.2]).is_err());
        assert!(RatioVector::new(vec![0.4, 0.6], vec![0.0]).is_err());
        assert!(RatioVector::new(vec![0.4, 0.4], vec![]).is_err());
        assert!(RatioVector::from_interleaved(&[0.5, 0.5]).is_err());
    }

    #[test]
    fn cumulative_points() {
        let v = RatioVector::from_interleaved(&[0.2, 0.1, 0.2, 0.1, 0.4]).unwrap();
        let p = v.cumulative();
        let expect = [0.0, 0.2, 0.3, 0.5, 0.6, 1.0];
        for (x, y) in p.iter().zip(expect) {
            assert!((x - y).abs() < 1e-15);
        }
        assert_eq!(*p.last().unwrap(), 1.0);
    }

    #[test]
    fn middle_thirds_ratios_are_constant() {
        let s = third();
        for n in 0..=10 {
            let w = Word::repeat(2, n).prepend(1);
            let r = ratio_geometry(&s, &w).unwrap();
            assert!(r.coords().all(|x| (x - 1.0 / 3.0).abs() < 1e-12));
        }
    }

    #[test]
    fn affine_ratios_reproduce_lengths() {
        let lens = [0.2, 0.1, 0.2, 0.1, 0.4];
        let s = BranchSystem::affine(3, &lens).unwrap();
        for w in Word::all_of_length(4, 3) {
            let r = ratio_geometry(&s, &w).unwrap();
            for (x, y) in r.interleaved().iter().zip(lens) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn power_example_ratio_differences_shrink() {
        let s = BranchSystem::power_example(3, 2, 0.5).unwrap();
        let r = |n| ratio_geometry(&s, &Word::repeat(1, n)).unwrap();
        let d5 = r(5).distance(&r(6));
        let d6 = r(6).distance(&r(7));
        assert!(d5 > 0.0 && d6 < d5);
    }

    #[test]
    fn residual_small_for_power_example() {
        let s = BranchSystem::power_example(3, 2, 0.5).unwrap();
        let w = Word::from_symbols(vec![1, 1, 2, 3, 1, 1, 1, 2, 1, 3, 1, 1]);
        assert!(log_length_residual(&s, &w).unwrap() < 1e-9);
    }

    #[test]
    fn rho_s_of_constant_scaling_is_product() {
        let s = BranchSystem::affine(2, &[1.0 / 3.0; 3]).unwrap();
        let a = Word::from_symbols(vec![1, 2, 2, 1, 1]);
        let b = Word::from_symbols(vec![1, 2, 2, 2]);
        let r = rho_s(&s, &a, &b, &TailPolicy::default()).unwrap();
        assert!((r / 3f64.powi(-3) - 1.0).abs() < 1e-12);
        let z = rho_s(
            &s,
            &Word::from_symbols(vec![1]),
            &Word::from_symbols(vec![2]),
            &TailPolicy::default(),
        )
        .unwrap();
        assert_eq!(z, 1.0);
    }

    #[test]
    fn branch_product_matches_default_product() {
        struct Plain<'a>(&'a BranchSystem);
        impl ScalingSource for Plain<'_> {
            fn d(&self) -> usize {
                self.0.d()
            }
            fn ratio(&self, w: &Word) -> Result<RatioVector> {
                ratio_geometry(self.0, w)
            }
        }
        let s = BranchSystem::power_example(2, 1, 0.5).unwrap();
        let c = Word::from_symbols(vec![1, 1, 2, 1]);
        let t = Word::from_symbols(vec![2, 1, 2]);
        let fast = s.log_child_product(&c, &t).unwrap();
        let slow = Plain(&s).log_child_product(&c, &t).unwrap();
        assert!((fast - slow).abs() < 1e-12);
    }

    #[test]
    fn sampler_is_deterministic_and_stratified() {
        let sp = PairSampler::default();
        let a = sp.sample(3).unwrap();
        let b = sp.sample(3).unwrap();
        assert_eq!(a, b);
        for p in &a {
            let l = lcp(&p.a, &p.b, Some(100)).unwrap();
            assert_eq!(l.length, p.lcp);
        }
        let per_level = 3 * 3 + sp.pairs_per_level;
        assert_eq!(a.len(), per_level * sp.max_lcp);
    }

    #[test]
    fn affine_gamma_is_degenerate() {
        let s = BranchSystem::affine(3, &[0.2, 0.1, 0.2, 0.1, 0.4]).unwrap();
        let sp = PairSampler {
            pairs_per_level: 4,
            eval_extra: 6,
            ..PairSampler::default()
        };
        let g = gamma_estimate(&s, 6, &sp).unwrap();
        assert!(g.degenerate);
        assert_eq!(g.gamma, 0.0);
    }

    #[test]
    fn too_few_pairs_rejected() {
        let sp = PairSampler {
            pairs_per_level: 2,
            ..PairSampler::default()
        };
        let err = holder_exponent(&third(), &Metric::RhoDelta(1.0), &sp).unwrap_err();
        assert!(matches!(err, Error::Insufficient(_)));
    }

    #[test]
    fn regrouped_source_matches_regrouped_system() {
        let s = BranchSystem::power_example(2, 1, 0.5).unwrap();
        let g = s.regroup(2).unwrap();
        let r = Regrouped::new(s.clone(), 2).unwrap();
        assert_eq!(ScalingSource::d(&r), 4);
        for w in Word::all_of_length(2, 4) {
            let want = ratio_geometry(&g, &w).unwrap();
            assert!(r.ratio(&w).unwrap().distance(&want) < 1e-12, "{w}");
        }
    }
}
