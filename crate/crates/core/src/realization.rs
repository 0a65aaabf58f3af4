//! Cantor sets built from a prescribed scaling function by repeated
//! subdivision, endpoint sets `A(j)` and the correspondences between them.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::branch::{BranchSystem, Hull};
use crate::error::{Error, Result};
use crate::ratio::{RatioVector, ScalingSource};
use crate::symbolic::{check_alphabet, DualPoint, Word};

/// Tail symbols read when a source is evaluated along `j w`.
pub const DEFAULT_TAIL_DEPTH: usize = 24;

/// `S(w)` is the table entry of the longest key that is a prefix of `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMemory {
    d: usize,
    table: HashMap<Word, RatioVector>,
    max_key: usize,
    fallback: RatioVector,
}

impl FiniteMemory {
    pub fn new(d: usize, entries: Vec<(Word, RatioVector)>, fallback: RatioVector) -> Result<Self> {
        check_alphabet(d)?;
        check_dim(&fallback, d)?;
        let mut table = HashMap::with_capacity(entries.len());
        let mut max_key = 0;
        for (w, v) in entries {
            w.check(d)?;
            check_dim(&v, d)?;
            if w.is_empty() {
                return Err(Error::InvalidParameter(
                    "the empty word is covered by the fallback".into(),
                ));
            }
            max_key = max_key.max(w.len());
            if table.insert(w.clone(), v).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate table key {w}")));
            }
        }
        Ok(FiniteMemory {
            d,
            table,
            max_key,
            fallback,
        })
    }

    pub fn lookup(&self, w: &Word) -> &RatioVector {
        (1..=self.max_key.min(w.len()))
            .rev()
            .find_map(|n| self.table.get(&w.truncate(n)))
            .unwrap_or(&self.fallback)
    }
}

/// `S(j) = normalize(base + Σ_m A0 e^{-δαm} φ(j_m))`, designed to be
/// `α`-Hölder with respect to `ρ_δ`.
///
/// The profile moves mass between child 1 and gap 1 with weight
/// `v_s = 2(s-1)/(d-1) - 1`, so every perturbation sums to zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderSeries {
    pub base: RatioVector,
    pub a0: f64,
    pub delta: f64,
    pub alpha: f64,
}

impl HolderSeries {
    pub fn new(base: RatioVector, a0: f64, delta: f64, alpha: f64) -> Result<Self> {
        if !(delta > 0.0) || !(alpha > 0.0) || !(a0 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "holder series needs a0 >= 0, delta > 0, alpha > 0 (got {a0}, {delta}, {alpha})"
            )));
        }
        let q = (-delta * alpha).exp();
        let total = a0 * q / (1.0 - q);
        let room = base.children()[0].min(base.gaps()[0]);
        if total > 0.5 * room {
            return Err(Error::InvalidParameter(format!(
                "amplitude sum {total} exceeds half of min(child 1, gap 1) = {room}"
            )));
        }
        Ok(HolderSeries { base, a0, delta, alpha })
    }

    /// Children `e^{-δ}` each, gaps sharing the remainder; needs `δ > ln d`.
    pub fn default_base(d: usize, delta: f64) -> Result<RatioVector> {
        check_alphabet(d)?;
        let c = (-delta).exp();
        let rest = 1.0 - d as f64 * c;
        if !(rest > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "default base needs delta > ln {d}, got {delta}"
            )));
        }
        RatioVector::new(vec![c; d], vec![rest / (d - 1) as f64; d - 1])
    }

    fn evaluate(&self, w: &Word) -> Result<RatioVector> {
        let d = self.base.d();
        let mut raw = self.base.interleaved();
        let q = (-self.delta * self.alpha).exp();
        let mut amp = self.a0;
        for &s in w.symbols() {
            amp *= q;
            let v = 2.0 * (s - 1) as f64 / (d - 1) as f64 - 1.0;
            raw[0] += amp * v;
            raw[1] -= amp * v;
        }
        RatioVector::normalize_interleaved(&raw)
    }
}

fn check_dim(v: &RatioVector, d: usize) -> Result<()> {
    if v.d() != d {
        return Err(Error::Simplex(format!("ratio vector for d={} used with d={d}", v.d())));
    }
    Ok(())
}

/// A scaling function given by formula.
#[derive(Debug, Clone, PartialEq)]
pub enum PrescribedScaling {
    Constant(RatioVector),
    FiniteMemory(FiniteMemory),
    HolderSeries(HolderSeries),
}

impl PrescribedScaling {
    pub fn evaluate(&self, w: &Word) -> Result<RatioVector> {
        w.check(ScalingSource::d(self))?;
        match self {
            PrescribedScaling::Constant(v) => Ok(v.clone()),
            PrescribedScaling::FiniteMemory(f) => Ok(f.lookup(w).clone()),
            PrescribedScaling::HolderSeries(h) => h.evaluate(w),
        }
    }
}

impl ScalingSource for PrescribedScaling {
    fn d(&self) -> usize {
        match self {
            PrescribedScaling::Constant(v) => v.d(),
            PrescribedScaling::FiniteMemory(f) => f.d,
            PrescribedScaling::HolderSeries(h) => h.base.d(),
        }
    }

    fn ratio(&self, w: &Word) -> Result<RatioVector> {
        self.evaluate(w)
    }

    /// A finite-memory table only sees `j`; the root gets the fallback.
    fn ratio_with_tail(&self, j: &Word, tail: &DualPoint, tail_depth: usize) -> Result<RatioVector> {
        match self {
            PrescribedScaling::FiniteMemory(_) => self.evaluate(j),
            _ => self.evaluate(&tail.prepend_word(j).truncate(j.len() + tail_depth)),
        }
    }

    fn is_constant(&self) -> bool {
        matches!(self, PrescribedScaling::Constant(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Node {
    hull: Hull,
    /// Left end and length as fractions of the parent.
    rel_a: f64,
    rel_len: f64,
}

/// Hulls `I_j` for every word of length at most `depth`.
///
/// Level `n` is stored in [`Word::index`] order, so the children `s·v` of a
/// node `v` occupy the contiguous block `d·index(v) + (s - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalTree {
    d: usize,
    tail: DualPoint,
    levels: Vec<Vec<Node>>,
}

/// Subdivides `[0,1]` to depth `n`, node `j` according to `S(j w)`.
pub fn realize(src: &dyn ScalingSource, tail: &DualPoint, n: usize) -> Result<IntervalTree> {
    realize_with(src, tail, n, DEFAULT_TAIL_DEPTH)
}

pub fn realize_with(src: &dyn ScalingSource, tail: &DualPoint, n: usize, tail_depth: usize) -> Result<IntervalTree> {
    let d = src.d();
    if n == 0 {
        return Err(Error::InvalidParameter("realization depth must be >= 1".into()));
    }
    tail.check(d)?;
    let root = Node {
        hull: Hull::UNIT,
        rel_a: 0.0,
        rel_len: 1.0,
    };
    let mut levels = vec![vec![root]];
    for level in 0..n {
        let parents = &levels[level];
        let blocks: Vec<Vec<Node>> = parents
            .par_iter()
            .enumerate()
            .map(|(idx, parent)| {
                let j = Word::from_index(idx, level, d);
                let s = src.ratio_with_tail(&j, tail, tail_depth)?;
                Ok(subdivide(parent, &s))
            })
            .collect::<Result<_>>()?;
        // Children of parent idx are s·v with index (s-1) + d·idx: transpose the blocks.
        let mut next = vec![root; parents.len() * d];
        for (idx, block) in blocks.into_iter().enumerate() {
            for (s, node) in block.into_iter().enumerate() {
                next[s + d * idx] = node;
            }
        }
        levels.push(next);
    }
    Ok(IntervalTree {
        d,
        tail: tail.clone(),
        levels,
    })
}

fn subdivide(parent: &Node, s: &RatioVector) -> Vec<Node> {
    let pieces = s.interleaved();
    let total: f64 = pieces.iter().sum();
    let mut out = Vec::with_capacity(s.d());
    let mut acc = 0.0;
    for (i, p) in pieces.iter().enumerate() {
        if i % 2 == 0 {
            let rel_a = acc / total;
            let rel_len = p / total;
            out.push(Node {
                hull: Hull {
                    a: parent.hull.a + rel_a * parent.hull.len(),
                    log_len: parent.hull.log_len + rel_len.ln(),
                },
                rel_a,
                rel_len,
            });
        }
        acc += p;
    }
    out
}

impl IntervalTree {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn tail(&self) -> &DualPoint {
        &self.tail
    }

    /// Number of stored hulls.
    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn node(&self, w: &Word) -> Result<&Node> {
        w.check(self.d)?;
        if w.len() > self.depth() {
            return Err(Error::DepthExceeded {
                requested: w.len(),
                available: self.depth(),
            });
        }
        Ok(&self.levels[w.len()][w.index(self.d)])
    }

    pub fn hull(&self, w: &Word) -> Result<Hull> {
        Ok(self.node(w)?.hull)
    }

    /// All `(word, hull)` pairs of one level, in index order.
    pub fn level(&self, n: usize) -> Result<Vec<(Word, Hull)>> {
        let nodes = self.levels.get(n).ok_or(Error::DepthExceeded {
            requested: n,
            available: self.depth(),
        })?;
        Ok(nodes
            .iter()
            .enumerate()
            .map(|(i, nd)| (Word::from_index(i, n, self.d), nd.hull))
            .collect())
    }

    /// Ratio geometry read back from the children of an interior node.
    pub fn node_ratio(&self, w: &Word) -> Result<RatioVector> {
        if w.len() >= self.depth() {
            return Err(Error::DepthExceeded {
                requested: w.len() + 1,
                available: self.depth(),
            });
        }
        let base = self.d * w.index(self.d);
        let kids = &self.levels[w.len() + 1][base..base + self.d];
        let mut pieces = Vec::with_capacity(2 * self.d - 1);
        for (i, k) in kids.iter().enumerate() {
            pieces.push(k.rel_len);
            if let Some(next) = kids.get(i + 1) {
                pieces.push(next.rel_a - (k.rel_a + k.rel_len));
            }
        }
        RatioVector::from_interleaved(&pieces)
    }

    /// `(left, right)` of `I_{u j}` in the coordinates of `I_j` scaled to `[0,1]`.
    pub fn relative_hull(&self, j: &Word, u: &Word) -> Result<(f64, f64)> {
        let full = u.concat(j);
        self.node(&full)?;
        let (mut a, mut len) = (0.0, 1.0);
        // Walk down from j: ancestors of u·j are u_t..u_m·j for t = m..1.
        for t in (0..u.len()).rev() {
            let nd = self.node(&u.suffix(t).concat(j))?;
            a += len * nd.rel_a;
            len *= nd.rel_len;
        }
        Ok((a, a + len))
    }

    /// One `word\ta\tlog_len` record per node, level by level in index order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (n, nodes) in self.levels.iter().enumerate() {
            for (i, nd) in nodes.iter().enumerate() {
                let w = Word::from_index(i, n, self.d);
                let _ = writeln!(
                    out,
                    "{}\t{:.16e}\t{:.16e}",
                    w.encode(self.d),
                    nd.hull.a,
                    nd.hull.log_len
                );
            }
        }
        out
    }

    /// Parses [`IntervalTree::to_text`] output back to `(word, hull)` records.
    pub fn parse_records(text: &str, d: usize) -> Result<Vec<(Word, Hull)>> {
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|line| {
                let mut f = line.split('\t');
                let (w, a, l) = (f.next(), f.next(), f.next());
                let (Some(w), Some(a), Some(l), None) = (w, a, l, f.next()) else {
                    return Err(Error::Parse(format!("expected 3 tab-separated fields: '{line}'")));
                };
                let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("'{s}': {e}")));
                Ok((
                    Word::decode(w, d)?,
                    Hull {
                        a: num(a)?,
                        log_len: num(l)?,
                    },
                ))
            })
            .collect()
    }
}

impl ScalingSource for IntervalTree {
    fn d(&self) -> usize {
        self.d
    }

    fn ratio(&self, w: &Word) -> Result<RatioVector> {
        self.node_ratio(w)
    }

    fn cylinder_log_length(&self, w: &Word) -> Option<Result<f64>> {
        Some(self.hull(w).map(|h| h.log_len))
    }
}

/// The `2d` partition points of `[0,1]` encoded by one ratio vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EndpointSet {
    pub points: Vec<f64>,
}

impl EndpointSet {
    pub fn from_ratio(s: &RatioVector) -> Self {
        EndpointSet { points: s.cumulative() }
    }

    /// `(left, right)` of child `j0`.
    pub fn child(&self, j0: u32) -> (f64, f64) {
        let i = 2 * (j0 as usize - 1);
        (self.points[i], self.points[i + 1])
    }
}

/// `A(j)` from `S(truncate(j, depth))`.
pub fn endpoints(src: &dyn ScalingSource, j: &DualPoint, depth: usize) -> Result<EndpointSet> {
    if depth == 0 {
        return Err(Error::InvalidParameter("endpoint depth must be >= 1".into()));
    }
    Ok(EndpointSet::from_ratio(&src.ratio(&j.truncate(depth))?))
}

/// Matched increasing point sequences, source to target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correspondence {
    pub source: Vec<f64>,
    pub target: Vec<f64>,
    pub label: String,
}

impl Correspondence {
    pub fn new(source: Vec<f64>, target: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if source.len() != target.len() {
            return Err(Error::Mismatch(format!(
                "{} source points against {} target points",
                source.len(),
                target.len()
            )));
        }
        if source.len() < 2 {
            return Err(Error::Mismatch("a correspondence needs at least 2 points".into()));
        }
        for side in [&source, &target] {
            if side.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::Mismatch("points must be strictly increasing".into()));
            }
        }
        Ok(Correspondence {
            source,
            target,
            label: label.into(),
        })
    }

    pub fn identity(points: Vec<f64>) -> Result<Self> {
        Self::new(points.clone(), points, "identity")
    }

    pub fn between(a: &EndpointSet, b: &EndpointSet, label: impl Into<String>) -> Result<Self> {
        Self::new(a.points.clone(), b.points.clone(), label)
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    /// Both sides affinely mapped so that they span `[0,1]`.
    pub fn renormalized(&self) -> Correspondence {
        fn norm(v: &[f64]) -> Vec<f64> {
            let (lo, hi) = (v[0], v[v.len() - 1]);
            let mut out: Vec<f64> = v.iter().map(|x| (x - lo) / (hi - lo)).collect();
            out[0] = 0.0;
            *out.last_mut().unwrap() = 1.0;
            out
        }
        Correspondence {
            source: norm(&self.source),
            target: norm(&self.target),
            label: self.label.clone(),
        }
    }

    /// Largest `|target - source|`.
    pub fn deviation(&self) -> f64 {
        self.source
            .iter()
            .zip(&self.target)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// Adds `inner`, affinely placed into `[lo_s, hi_s] → [lo_t, hi_t]`.
    /// Points already present are kept once.
    pub fn with_embedded(&self, inner: &Correspondence, src_span: (f64, f64), tgt_span: (f64, f64)) -> Result<Self> {
        let inner = inner.renormalized();
        let mut pairs: Vec<(f64, f64)> = self.source.iter().copied().zip(self.target.iter().copied()).collect();
        for (x, y) in inner.source.iter().zip(&inner.target) {
            let sx = src_span.0 + x * (src_span.1 - src_span.0);
            let ty = tgt_span.0 + y * (tgt_span.1 - tgt_span.0);
            let sx = if *x == 0.0 {
                src_span.0
            } else if *x == 1.0 {
                src_span.1
            } else {
                sx
            };
            let ty = if *y == 0.0 {
                tgt_span.0
            } else if *y == 1.0 {
                tgt_span.1
            } else {
                ty
            };
            pairs.push((sx, ty));
        }
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        pairs.dedup_by(|p, q| p.0 == q.0 && p.1 == q.1);
        let (s, t) = pairs.into_iter().unzip();
        Self::new(s, t, format!("{} + {}", self.label, inner.label))
    }
}

/// `A(j0 j) → A(j0 j')`, the inner constraint set after restricting `corr`
/// to child `j0` and renormalizing.
pub fn renormalize_restrict(
    corr: &Correspondence,
    j0: u32,
    src: &dyn ScalingSource,
    j: &DualPoint,
    j_prime: &DualPoint,
    depth: usize,
) -> Result<Correspondence> {
    let d = src.d();
    if corr.len() != 2 * d {
        return Err(Error::Mismatch(format!(
            "expected a 2d = {} point correspondence, got {}",
            2 * d,
            corr.len()
        )));
    }
    if j0 == 0 || j0 as usize > d {
        return Err(Error::Mismatch(format!("child index {j0} outside 1..={d}")));
    }
    let a = endpoints(src, &j.prepend(j0), depth + 1)?;
    let b = endpoints(src, &j_prime.prepend(j0), depth + 1)?;
    Correspondence::between(&a, &b, format!("R_{j0}"))
}

/// Nested cylinder hulls addressable relative to an ancestor.
pub trait Cylinders: Sync {
    fn d(&self) -> usize;
    /// `(left, right)` of `I_{u j}` inside `I_j` scaled to `[0,1]`.
    fn relative_hull(&self, j: &Word, u: &Word) -> Result<(f64, f64)>;
}

impl Cylinders for IntervalTree {
    fn d(&self) -> usize {
        self.d
    }

    fn relative_hull(&self, j: &Word, u: &Word) -> Result<(f64, f64)> {
        IntervalTree::relative_hull(self, j, u)
    }
}

impl Cylinders for BranchSystem {
    fn d(&self) -> usize {
        BranchSystem::d(self)
    }

    fn relative_hull(&self, j: &Word, u: &Word) -> Result<(f64, f64)> {
        let h = self.cylinder_hull(u)?;
        let right = if u.symbols().iter().all(|&s| s as usize == BranchSystem::d(self)) {
            1.0
        } else {
            h.b()
        };
        Ok((self.relative_image(j, h.a)?, self.relative_image(j, right)?))
    }
}

/// Endpoints of `I_{u j}` paired with those of `I_{u j'}` for all `|u| = m`,
/// both sides renormalized by their ancestor.
pub fn identification_correspondence(
    cyl: &dyn Cylinders,
    j: &Word,
    j_prime: &Word,
    m: usize,
) -> Result<Correspondence> {
    let d = cyl.d();
    let words: Vec<Word> = Word::all_of_length(m, d).collect();
    let pairs: Vec<[(f64, f64); 2]> = words
        .par_iter()
        .map(|u| {
            let (a0, a1) = cyl.relative_hull(j, u)?;
            let (b0, b1) = cyl.relative_hull(j_prime, u)?;
            Ok([(a0, b0), (a1, b1)])
        })
        .collect::<Result<_>>()?;
    let mut pts: Vec<(f64, f64)> = pairs.into_iter().flatten().collect();
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    pts.dedup_by(|p, q| p.0 == q.0);
    let (s, t) = pts.into_iter().unzip();
    Correspondence::new(s, t, format!("F[{j_prime}|{j}]"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(v: &[f64]) -> RatioVector {
        RatioVector::from_interleaved(v).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::decode(s, 9).unwrap()
    }

    #[test]
    fn constant_realization_is_middle_thirds() {
        let s = PrescribedScaling::Constant(rv(&[1.0 / 3.0; 3]));
        let t = realize(&s, &DualPoint::constant(1), 3).unwrap();
        let h = t.hull(&w("12")).unwrap();
        assert!((h.a - 2.0 / 3.0).abs() < 1e-15);
        assert!((h.b() - 7.0 / 9.0).abs() < 1e-15);
        assert_eq!(t.len(), 15);
    }

    #[test]
    fn finite_memory_hand_computation() {
        let fm = FiniteMemory::new(
            2,
            vec![(w("1"), rv(&[0.4, 0.2, 0.4])), (w("2"), rv(&[0.3, 0.4, 0.3]))],
            rv(&[0.4, 0.2, 0.4]),
        )
        .unwrap();
        let s = PrescribedScaling::FiniteMemory(fm);
        let t = realize(&s, &DualPoint::constant(2), 2).unwrap();
        let h1 = t.hull(&w("1")).unwrap();
        let h2 = t.hull(&w("2")).unwrap();
        let h11 = t.hull(&w("11")).unwrap();
        assert!(h1.a == 0.0 && (h1.b() - 0.4).abs() < 1e-15);
        assert!((h2.a - 0.6).abs() < 1e-15 && (h2.b() - 1.0).abs() < 1e-15);
        assert!(h11.a == 0.0 && (h11.b() - 0.16).abs() < 1e-15);
        // Under node 2 the table entry for "2" applies.
        let h12 = t.hull(&w("12")).unwrap();
        assert!((h12.a - 0.6).abs() < 1e-15 && (h12.len() - 0.12).abs() < 1e-15);
    }

    #[test]
    fn node_ratio_round_trip() {
        let fm = FiniteMemory::new(
            2,
            vec![(w("1"), rv(&[0.4, 0.2, 0.4])), (w("21"), rv(&[0.3, 0.4, 0.3]))],
            rv(&[0.25, 0.25, 0.5]),
        )
        .unwrap();
        let s = PrescribedScaling::FiniteMemory(fm);
        let t = realize(&s, &DualPoint::constant(1), 6).unwrap();
        for n in 0..6 {
            for (word, _) in t.level(n).unwrap() {
                let got = t.node_ratio(&word).unwrap();
                let want = s.evaluate(&word).unwrap();
                assert!(got.distance(&want) < 1e-12, "{word}");
            }
        }
    }

    #[test]
    fn holder_series_stays_on_simplex() {
        let base = HolderSeries::default_base(3, 1.5).unwrap();
        let h = HolderSeries::new(base, 0.02, 1.5, 0.3).unwrap();
        let s = PrescribedScaling::HolderSeries(h);
        for word in Word::all_of_length(5, 3) {
            let r = s.evaluate(&word).unwrap();
            assert!((r.sum() - 1.0).abs() < 1e-12);
        }
        assert!(HolderSeries::default_base(3, 1.0).is_err());
        let base = HolderSeries::default_base(2, 1.0).unwrap();
        assert!(HolderSeries::new(base, 10.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn text_format_round_trip() {
        let s = PrescribedScaling::Constant(rv(&[0.3, 0.3, 0.4]));
        let t = realize(&s, &DualPoint::constant(1), 3).unwrap();
        let text = t.to_text();
        assert_eq!(text.lines().count(), 15);
        assert!(text.starts_with("\t0.0000000000000000e0\t0.0000000000000000e0\n"));
        let recs = IntervalTree::parse_records(&text, 2).unwrap();
        for (word, h) in recs {
            let orig = t.hull(&word).unwrap();
            assert_eq!(orig.a, h.a);
            assert_eq!(orig.log_len, h.log_len);
        }
    }

    #[test]
    fn endpoint_sets() {
        let s = PrescribedScaling::Constant(rv(&[0.2, 0.1, 0.2, 0.1, 0.4]));
        let e = endpoints(&s, &DualPoint::constant(2), 4).unwrap();
        let want = [0.0, 0.2, 0.3, 0.5, 0.6, 1.0];
        for (x, y) in e.points.iter().zip(want) {
            assert!((x - y).abs() < 1e-15);
        }
        assert_eq!(e.child(2), (e.points[2], e.points[3]));
    }

    #[test]
    fn constant_restriction_is_identity() {
        let s = PrescribedScaling::Constant(rv(&[1.0 / 3.0; 3]));
        let j = DualPoint::constant(1);
        let k = DualPoint::constant(2);
        let outer =
            Correspondence::between(&endpoints(&s, &j, 3).unwrap(), &endpoints(&s, &k, 3).unwrap(), "o").unwrap();
        let inner = renormalize_restrict(&outer, 1, &s, &j, &k, 3).unwrap();
        assert_eq!(inner.deviation(), 0.0);
        assert!(renormalize_restrict(&outer, 3, &s, &j, &k, 3).is_err());
    }

    #[test]
    fn identification_is_identity_for_self_similar_sets() {
        let sys = BranchSystem::affine(2, &[1.0 / 3.0; 3]).unwrap();
        let c = identification_correspondence(&sys, &w("1"), &w("212"), 3).unwrap();
        assert_eq!(c.len(), 16);
        assert!(c.deviation() < 1e-12);
        let same = identification_correspondence(&sys, &w("12"), &w("12"), 2).unwrap();
        assert_eq!(same.deviation(), 0.0);
    }

    #[test]
    fn identification_is_monotone_for_power_example() {
        let sys = BranchSystem::power_example(2, 1, 0.5).unwrap();
        let c = identification_correspondence(&sys, &w("1"), &w("2"), 3).unwrap();
        assert!(c.deviation() > 1e-4);
        assert!(c.target.windows(2).all(|p| p[1] > p[0]));
    }

    #[test]
    fn embedded_constraints_merge() {
        let outer = Correspondence::new(vec![0.0, 0.3, 0.7, 1.0], vec![0.0, 0.35, 0.7, 1.0], "o").unwrap();
        let inner = Correspondence::new(vec![0.0, 0.4, 0.6, 1.0], vec![0.0, 0.5, 0.6, 1.0], "i").unwrap();
        let c = outer.with_embedded(&inner, (0.0, 0.3), (0.0, 0.35)).unwrap();
        assert_eq!(c.len(), 6);
        assert!((c.source[1] - 0.12).abs() < 1e-15 && (c.target[1] - 0.175).abs() < 1e-15);
    }
}
