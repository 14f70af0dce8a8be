//! Depth-bounded direct semantics of systems and requirements, and the
//! queries combining them. This is the left-hand side of every correctness
//! check: it never looks at a product.
//!
//! Every semantics is the `k`-th Kleene iterate of its transformer from the
//! empty value; traces have length `1..=k`. Because trace length equals the
//! number of steps taken, the depth-`k` value is the depth-`K` value
//! restricted to traces of length at most `k` (for `k ≤ K`); the `*_by_depth`
//! queries rely on this.

pub mod modality;
pub mod query;
pub mod semantics;

use std::fmt;

use num_traits::Zero;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::domains::Rational;
use crate::models::Alphabet;

pub use query::*;
pub use semantics::*;

/// Non-empty word over an alphabet, as symbol indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trace(Vec<u16>);

impl Trace {
    /// `None` for the empty word, which is not a trace.
    pub fn new(symbols: impl IntoIterator<Item = usize>) -> Option<Trace> {
        let v: Vec<u16> = symbols.into_iter().map(sym16).collect();
        (!v.is_empty()).then_some(Trace(v))
    }

    pub fn single(a: usize) -> Trace {
        Trace(vec![sym16(a)])
    }

    /// `a · self`.
    pub fn prepend(&self, a: usize) -> Trace {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(sym16(a));
        v.extend_from_slice(&self.0);
        Trace(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; present for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&a| a as usize)
    }

    pub fn symbol(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    /// First `n` symbols, `1 ≤ n ≤ len`.
    pub fn prefix(&self, n: usize) -> Trace {
        Trace(self.0[..n].to_vec())
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        alphabet.render(&self.symbols().collect::<Vec<_>>())
    }

    /// Parses `a·b·c` (or `a.b.c`) against an alphabet.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Option<Trace> {
        let parts = text.split(['·', '.']).map(str::trim);
        let mut v = Vec::new();
        for p in parts {
            v.push(alphabet.index_of(p)?);
        }
        Trace::new(v)
    }
}

fn sym16(a: usize) -> u16 {
    u16::try_from(a).expect("alphabets hold at most 65536 symbols")
}

/// Sub-probability distribution over traces; zero masses are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceDist {
    mass: FxHashMap<Trace, Rational>,
}

impl TraceDist {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (Trace, Rational)>) -> Self {
        let mut d = TraceDist::new();
        for (w, p) in entries {
            d.add(w, &p);
        }
        d
    }

    pub fn add(&mut self, w: Trace, p: &Rational) {
        if p.is_zero() {
            return;
        }
        let slot = self.mass.entry(w).or_insert_with(Rational::zero);
        *slot += p;
        if slot.is_zero() {
            // Only reachable with negative input; keeps the map canonical.
            self.mass.retain(|_, v| !v.is_zero());
        }
    }

    pub fn get(&self, w: &Trace) -> Rational {
        self.mass.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.mass.values().fold(Rational::zero(), |acc, p| acc + p)
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Trace, &Rational)> {
        self.mass.iter()
    }

    /// Entries ordered by trace length, then lexicographically.
    pub fn sorted(&self) -> Vec<(&Trace, &Rational)> {
        let mut v: Vec<_> = self.mass.iter().collect();
        v.sort_by(|a, b| (a.0.len(), a.0).cmp(&(b.0.len(), b.0)));
        v
    }

    /// Restriction to traces of length at most `k`.
    pub fn truncate(&self, k: usize) -> TraceDist {
        TraceDist { mass: self.mass.iter().filter(|(w, _)| w.len() <= k).map(|(w, p)| (w.clone(), p.clone())).collect() }
    }
}

/// Sub-distribution over (trace, accumulated reward) pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceRewardDist {
    mass: FxHashMap<(Trace, u64), Rational>,
}

impl TraceRewardDist {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, w: Trace, reward: u64, p: &Rational) {
        if p.is_zero() {
            return;
        }
        *self.mass.entry((w, reward)).or_insert_with(Rational::zero) += p;
    }

    pub fn get(&self, w: &Trace, reward: u64) -> Rational {
        self.mass.get(&(w.clone(), reward)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Trace, u64), &Rational)> {
        self.mass.iter()
    }

    pub fn total(&self) -> Rational {
        self.mass.values().fold(Rational::zero(), |acc, p| acc + p)
    }

    /// Forgets the rewards.
    pub fn marginal(&self) -> TraceDist {
        let mut d = TraceDist::new();
        for ((w, _), p) in &self.mass {
            d.add(w.clone(), p);
        }
        d
    }

    pub fn truncate(&self, k: usize) -> TraceRewardDist {
        TraceRewardDist {
            mass: self.mass.iter().filter(|((w, _), _)| w.len() <= k).map(|(e, p)| (e.clone(), p.clone())).collect(),
        }
    }
}

/// Finite set of (trace, weight) pairs; one trace may carry several weights.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceWeightSet {
    pairs: FxHashSet<(Trace, u64)>,
}

impl TraceWeightSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Trace, u64)>) -> Self {
        TraceWeightSet { pairs: pairs.into_iter().collect() }
    }

    pub fn insert(&mut self, w: Trace, m: u64) {
        self.pairs.insert((w, m));
    }

    pub fn contains(&self, w: &Trace, m: u64) -> bool {
        self.pairs.contains(&(w.clone(), m))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Trace, u64)> {
        self.pairs.iter()
    }

    pub fn sorted(&self) -> Vec<&(Trace, u64)> {
        let mut v: Vec<_> = self.pairs.iter().collect();
        v.sort_by(|a, b| (a.0.len(), &a.0, a.1).cmp(&(b.0.len(), &b.0, b.1)));
        v
    }

    /// Least weight per trace.
    pub fn min_weights(&self) -> FxHashMap<&Trace, u64> {
        let mut out: FxHashMap<&Trace, u64> = FxHashMap::default();
        for (w, m) in &self.pairs {
            out.entry(w).and_modify(|v| *v = (*v).min(*m)).or_insert(*m);
        }
        out
    }

    pub fn truncate(&self, k: usize) -> TraceWeightSet {
        TraceWeightSet { pairs: self.pairs.iter().filter(|(w, _)| w.len() <= k).cloned().collect() }
    }
}

/// Finite language.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LangSet {
    words: FxHashSet<Trace>,
}

impl LangSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_words(words: impl IntoIterator<Item = Trace>) -> Self {
        LangSet { words: words.into_iter().collect() }
    }

    pub fn insert(&mut self, w: Trace) -> bool {
        self.words.insert(w)
    }

    pub fn contains(&self, w: &Trace) -> bool {
        self.words.contains(w)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Trace> {
        self.words.iter()
    }

    pub fn sorted(&self) -> Vec<&Trace> {
        let mut v: Vec<_> = self.words.iter().collect();
        v.sort_by(|a, b| (a.len(), *a).cmp(&(b.len(), *b)));
        v
    }

    pub fn is_subset(&self, other: &LangSet) -> bool {
        self.words.is_subset(&other.words)
    }

    pub fn intersection(&self, other: &LangSet) -> LangSet {
        LangSet { words: self.words.intersection(&other.words).cloned().collect() }
    }

    pub fn truncate(&self, k: usize) -> LangSet {
        LangSet { words: self.words.iter().filter(|w| w.len() <= k).cloned().collect() }
    }
}

/// A reward machine's semantics on a finite set of traces: each trace is
/// mapped to its weight sequence (same length as the trace).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeightMap {
    map: FxHashMap<Trace, Vec<u64>>,
}

impl WeightMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, w: Trace, weights: Vec<u64>) {
        debug_assert_eq!(w.len(), weights.len());
        self.map.insert(w, weights);
    }

    pub fn get(&self, w: &Trace) -> Option<&[u64]> {
        self.map.get(w).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Trace, &Vec<u64>)> {
        self.map.iter()
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join("·"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::rat;

    #[test]
    fn empty_word_is_not_a_trace() {
        assert!(Trace::new([]).is_none());
        assert_eq!(Trace::single(2).prepend(1), Trace::new([1, 2]).unwrap());
    }

    #[test]
    fn dist_drops_zero_mass() {
        let mut d = TraceDist::new();
        d.add(Trace::single(0), &rat(0, 1));
        assert!(d.is_empty());
        d.add(Trace::single(0), &rat(1, 3));
        d.add(Trace::single(0), &rat(1, 3));
        assert_eq!(d.get(&Trace::single(0)), rat(2, 3));
    }

    #[test]
    fn parse_round_trips_rendering() {
        let a = Alphabet::new(["sand", "lake"]).unwrap();
        let w = Trace::parse("sand·lake·sand", &a).unwrap();
        assert_eq!(w.render(&a), "sand·lake·sand");
        assert!(Trace::parse("sand·mud", &a).is_none());
    }
}
