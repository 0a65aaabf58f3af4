//! Words over the alphabet `{1..d}`, eventually periodic dual points and
//! the prefix metric `rho_delta`.
//!
//! Symbols are 1-based throughout. A [`Word`] `j_1..j_n` addresses the
//! cylinder obtained by applying inverse branch `j_1` first and `j_n` last,
//! so prepending a symbol refines the cylinder and dropping the last symbol
//! corresponds to one application of the expanding map.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single letter of the alphabet `{1..d}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Symbol(u32);

impl Symbol {
    pub fn new(value: u32, d: usize) -> Result<Self> {
        check_alphabet(d)?;
        if value == 0 || value as usize > d {
            return Err(Error::SymbolOutOfRange { symbol: value, d });
        }
        Ok(Symbol(value))
    }

    pub fn value(self) -> u32 {
        self.0
    }
}

pub(crate) fn check_alphabet(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::AlphabetTooSmall(d));
    }
    Ok(())
}

/// Finite string of symbols; the empty word addresses the root interval.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word, checking every symbol against the alphabet size.
    pub fn new(symbols: Vec<u32>, d: usize) -> Result<Self> {
        check_alphabet(d)?;
        for &s in &symbols {
            if s == 0 || s as usize > d {
                return Err(Error::SymbolOutOfRange { symbol: s, d });
            }
        }
        Ok(Word(symbols))
    }

    /// Builds a word without alphabet validation. Symbols must be >= 1.
    pub fn from_symbols(symbols: Vec<u32>) -> Self {
        debug_assert!(symbols.iter().all(|&s| s >= 1));
        Word(symbols)
    }

    /// The word `s s .. s` of length `n`.
    pub fn repeat(symbol: u32, n: usize) -> Self {
        Word(vec![symbol; n])
    }

    pub fn symbols(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check(&self, d: usize) -> Result<()> {
        check_alphabet(d)?;
        match self.0.iter().find(|&&s| s == 0 || s as usize > d) {
            Some(&s) => Err(Error::SymbolOutOfRange { symbol: s, d }),
            None => Ok(()),
        }
    }

    /// `j0 j_1 .. j_n`: the refinement of this cylinder by branch `j0`.
    pub fn prepend(&self, j0: u32) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(j0);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn append(&self, s: u32) -> Word {
        let mut v = self.0.clone();
        v.push(s);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Drops the last symbol (the image of the cylinder under the shift).
    pub fn shift_drop_last(&self) -> Result<Word> {
        if self.0.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Word(self.0[..self.0.len() - 1].to_vec()))
    }

    /// The suffix `j_{t+1} .. j_n` (0-based `t`).
    pub fn suffix(&self, t: usize) -> Word {
        Word(self.0[t.min(self.0.len())..].to_vec())
    }

    pub fn truncate(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Encodes 1-based symbols: concatenated digits for `d <= 9`, '.'-separated otherwise.
    pub fn encode(&self, d: usize) -> String {
        if d <= 9 {
            self.0.iter().map(|s| char::from(b'0' + *s as u8)).collect()
        } else {
            self.0.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(".")
        }
    }

    pub fn decode(text: &str, d: usize) -> Result<Word> {
        check_alphabet(d)?;
        let text = text.trim();
        if text.is_empty() {
            return Ok(Word::empty());
        }
        let symbols: Vec<u32> = if d <= 9 {
            text.chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| Error::Parse(format!("bad symbol '{c}' in word '{text}'")))
                })
                .collect::<Result<_>>()?
        } else {
            text.split('.')
                .map(|t| {
                    t.parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad symbol '{t}' in word '{text}'")))
                })
                .collect::<Result<_>>()?
        };
        Word::new(symbols, d)
    }

    /// Index of the word among all words of its length, first symbol least significant.
    pub fn index(&self, d: usize) -> usize {
        self.0.iter().rev().fold(0usize, |acc, &s| acc * d + (s as usize - 1))
    }

    /// Inverse of [`Word::index`].
    pub fn from_index(mut index: usize, len: usize, d: usize) -> Word {
        let mut v = Vec::with_capacity(len);
        for _ in 0..len {
            v.push((index % d) as u32 + 1);
            index /= d;
        }
        Word(v)
    }

    /// All words of length `n` in index order.
    pub fn all_of_length(n: usize, d: usize) -> impl Iterator<Item = Word> {
        let count = d.pow(n as u32);
        (0..count).map(move |i| Word::from_index(i, n, d))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.0.iter().any(|&s| s > 9);
        f.write_str(&self.encode(if wide { 10 } else { 9 }))
    }
}

/// The eventually periodic infinite string `prefix period period ..`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DualPoint {
    prefix: Word,
    period: Word,
}

impl DualPoint {
    pub fn new(prefix: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        Ok(DualPoint { prefix, period })
    }

    /// `s s s ..`
    pub fn constant(symbol: u32) -> Self {
        DualPoint {
            prefix: Word::empty(),
            period: Word::from_symbols(vec![symbol]),
        }
    }

    /// `period period ..`
    pub fn periodic(period: Word) -> Result<Self> {
        DualPoint::new(Word::empty(), period)
    }

    pub fn prefix(&self) -> &Word {
        &self.prefix
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn check(&self, d: usize) -> Result<()> {
        self.prefix.check(d)?;
        self.period.check(d)
    }

    pub fn symbol_at(&self, i: usize) -> u32 {
        let p = self.prefix.len();
        if i < p {
            self.prefix.0[i]
        } else {
            self.period.0[(i - p) % self.period.len()]
        }
    }

    /// The first `n` symbols.
    pub fn truncate(&self, n: usize) -> Word {
        Word((0..n).map(|i| self.symbol_at(i)).collect())
    }

    pub fn prepend(&self, j0: u32) -> DualPoint {
        DualPoint {
            prefix: self.prefix.prepend(j0),
            period: self.period.clone(),
        }
    }

    /// `w` followed by this point.
    pub fn prepend_word(&self, w: &Word) -> DualPoint {
        DualPoint {
            prefix: w.concat(&self.prefix),
            period: self.period.clone(),
        }
    }

    /// Length after which the two points either agree forever or differ.
    fn decision_horizon(&self, other: &DualPoint) -> usize {
        self.prefix.len().max(other.prefix.len()) + lcm(self.period.len(), other.period.len())
    }

    pub fn encode(&self, d: usize) -> String {
        format!("{}({})", self.prefix.encode(d), self.period.encode(d))
    }

    /// Parses `prefix(period)`, e.g. `11(2)`.
    pub fn decode(text: &str, d: usize) -> Result<DualPoint> {
        let text = text.trim();
        let open = text
            .find('(')
            .ok_or_else(|| Error::Parse(format!("dual point '{text}' lacks '(period)'")))?;
        if !text.ends_with(')') {
            return Err(Error::Parse(format!("dual point '{text}' lacks closing ')'")));
        }
        let prefix = Word::decode(&text[..open], d)?;
        let period = Word::decode(&text[open + 1..text.len() - 1], d)?;
        DualPoint::new(prefix, period)
    }
}

impl fmt::Display for DualPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.prefix, self.period)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// A finite word or an infinite dual point.
#[derive(Debug, Clone, Copy)]
pub enum Seq<'a> {
    Finite(&'a Word),
    Infinite(&'a DualPoint),
}

impl<'a> From<&'a Word> for Seq<'a> {
    fn from(w: &'a Word) -> Self {
        Seq::Finite(w)
    }
}

impl<'a> From<&'a DualPoint> for Seq<'a> {
    fn from(p: &'a DualPoint) -> Self {
        Seq::Infinite(p)
    }
}

impl Seq<'_> {
    fn len(&self) -> Option<usize> {
        match self {
            Seq::Finite(w) => Some(w.len()),
            Seq::Infinite(_) => None,
        }
    }

    fn at(&self, i: usize) -> Option<u32> {
        match self {
            Seq::Finite(w) => w.0.get(i).copied(),
            Seq::Infinite(p) => Some(p.symbol_at(i)),
        }
    }
}

/// Longest common prefix `j ∩ j'`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lcp {
    pub length: usize,
    pub word: Word,
    /// Both sequences agree on the entire compared range and have the same extent.
    pub coincident: bool,
}

/// Longest common prefix of two words or dual points.
///
/// Two equal infinite points have no finite common prefix; `depth_bound`
/// caps the comparison, otherwise [`Error::InfiniteCoincidence`] is returned.
pub fn lcp<'a, 'b>(a: impl Into<Seq<'a>>, b: impl Into<Seq<'b>>, depth_bound: Option<usize>) -> Result<Lcp> {
    let (a, b) = (a.into(), b.into());
    let horizon = match (a, b) {
        (Seq::Infinite(p), Seq::Infinite(q)) => Some(p.decision_horizon(q)),
        _ => None,
    };
    let finite_limit = match (a.len(), b.len()) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    };
    let limit = match (finite_limit, depth_bound) {
        (Some(l), Some(b)) => l.min(b),
        (Some(l), None) => l,
        (None, Some(b)) => b,
        (None, None) => horizon.unwrap_or(0),
    };
    let mut n = 0;
    while n < limit {
        match (a.at(n), b.at(n)) {
            (Some(x), Some(y)) if x == y => n += 1,
            _ => break,
        }
    }
    let word = Word((0..n).map(|i| a.at(i).unwrap_or(0)).collect());
    let agrees_fully = n == limit;
    let coincident = match (a.len(), b.len()) {
        (Some(x), Some(y)) => agrees_fully && x == y,
        (None, None) => {
            if agrees_fully && depth_bound.is_none() {
                return Err(Error::InfiniteCoincidence);
            }
            // Bounded comparison: equal as infinite sequences?
            agrees_fully && {
                let h = horizon.unwrap_or(0);
                (0..h).all(|i| a.at(i) == b.at(i))
            }
        }
        _ => false,
    };
    Ok(Lcp {
        length: n,
        word,
        coincident,
    })
}

/// `exp(-delta * #(a ∩ b))`; zero for coincident sequences.
pub fn rho_delta<'a, 'b>(
    delta: f64,
    a: impl Into<Seq<'a>>,
    b: impl Into<Seq<'b>>,
    depth_bound: Option<usize>,
) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let l = lcp(a, b, depth_bound)?;
    if l.coincident {
        return Ok(0.0);
    }
    Ok((-delta * l.length as f64).exp())
}

/// Order in which the `n` symbols of a block are read when coding it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockOrder {
    /// Block `s_1..s_n` codes as `1 + Σ (s_i - 1) d^(n-i)`: `11→1, 12→2, 21→3, 22→4`.
    AsWritten,
    /// The block is reversed before lexicographic coding.
    Reversed,
}

fn code_block(block: &[u32], d: usize, order: BlockOrder) -> u32 {
    let fold = |acc: u32, &s: &u32| acc * d as u32 + (s - 1);
    1 + match order {
        BlockOrder::AsWritten => block.iter().fold(0, fold),
        BlockOrder::Reversed => block.iter().rev().fold(0, fold),
    }
}

fn decode_block(code: u32, d: usize, n: usize, order: BlockOrder) -> Vec<u32> {
    let mut c = code - 1;
    let mut block = vec![0; n];
    for i in (0..n).rev() {
        block[i] = c % d as u32 + 1;
        c /= d as u32;
    }
    if order == BlockOrder::Reversed {
        block.reverse();
    }
    block
}

/// Groups symbols in blocks of `n`, producing a word over `{1..d^n}`.
pub fn regroup(w: &Word, d: usize, n: usize) -> Result<Word> {
    regroup_with(w, d, n, BlockOrder::AsWritten)
}

pub fn regroup_with(w: &Word, d: usize, n: usize, order: BlockOrder) -> Result<Word> {
    check_alphabet(d)?;
    if n == 0 || !w.len().is_multiple_of(n) {
        return Err(Error::RegroupLength { len: w.len(), block: n });
    }
    w.check(d)?;
    Ok(Word(w.0.chunks(n).map(|b| code_block(b, d, order)).collect()))
}

/// Inverse of [`regroup`].
pub fn ungroup(w: &Word, d: usize, n: usize) -> Result<Word> {
    ungroup_with(w, d, n, BlockOrder::AsWritten)
}

pub fn ungroup_with(w: &Word, d: usize, n: usize, order: BlockOrder) -> Result<Word> {
    check_alphabet(d)?;
    if n == 0 {
        return Err(Error::RegroupLength { len: w.len(), block: n });
    }
    let big = d.pow(n as u32);
    w.check(big)?;
    Ok(Word(w.0.iter().flat_map(|&c| decode_block(c, d, n, order)).collect()))
}

/// Regroups a dual point, unrolling prefix and period so both align with blocks of `n`.
pub fn regroup_dual(p: &DualPoint, d: usize, n: usize) -> Result<DualPoint> {
    regroup_dual_with(p, d, n, BlockOrder::AsWritten)
}

pub fn regroup_dual_with(p: &DualPoint, d: usize, n: usize, order: BlockOrder) -> Result<DualPoint> {
    if n == 0 {
        return Err(Error::RegroupLength { len: 0, block: 0 });
    }
    let prefix_len = p.prefix.len().div_ceil(n) * n;
    let period_len = lcm(p.period.len(), n);
    let prefix = p.truncate(prefix_len);
    let period = Word((prefix_len..prefix_len + period_len).map(|i| p.symbol_at(i)).collect());
    DualPoint::new(regroup_with(&prefix, d, n, order)?, regroup_with(&period, d, n, order)?)
}
