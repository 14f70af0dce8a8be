//! One-step modalities `τ: F(Ω) → Ω` of systems and requirements on their
//! semantic domains. Successor positions already hold semantic values.
//! Kleene iteration of these gives the depth-bounded semantics, and the
//! diagram check evaluates them on sampled inputs.

use super::{LangSet, Trace, TraceDist, TraceRewardDist, TraceWeightSet, WeightMap};
use crate::domains::Rational;
use crate::models::Succ;

fn add_weight(m: u64, n: u64) -> u64 {
    m.checked_add(n).expect("weight overflow")
}

/// Labelled MC: `a ↦ ν(★)` and `a·w ↦ Σ_σ ν(σ)·σ(w)`.
pub fn tau_mc(row: &[(Succ<&TraceDist>, Rational)], a: usize) -> TraceDist {
    let mut out = TraceDist::new();
    for (s, p) in row {
        match s {
            Succ::Target => out.add(Trace::single(a), p),
            Succ::State(sigma) => {
                for (w, q) in sigma.iter() {
                    out.add(w.prepend(a), &(p * q));
                }
            }
        }
    }
    out
}

/// MC with state reward `n`: `(a, n) ↦ ν(★)`, `(a·w, m+n) ↦ Σ ν(σ)·σ(w, m)`.
pub fn tau_mrm(row: &[(Succ<&TraceRewardDist>, Rational)], a: usize, n: u64) -> TraceRewardDist {
    let mut out = TraceRewardDist::new();
    for (s, p) in row {
        match s {
            Succ::Target => out.add(Trace::single(a), n, p),
            Succ::State(sigma) => {
                for ((w, m), q) in sigma.iter() {
                    out.add(w.prepend(a), add_weight(*m, n), &(p * q));
                }
            }
        }
    }
    out
}

/// DFA: `{a | δ(a) = (_, ⊤)} ∪ {a·w | δ(a) = (L, _), w ∈ L}`.
pub fn tau_dfa(delta: &[(&LangSet, bool)]) -> LangSet {
    let mut out = LangSet::new();
    for (a, (lang, flag)) in delta.iter().enumerate() {
        if *flag {
            out.insert(Trace::single(a));
        }
        for w in lang.iter() {
            out.insert(w.prepend(a));
        }
    }
    out
}

/// NFA: as [`tau_dfa`] over every element of `δ(a)`.
pub fn tau_nfa(delta: &[Vec<(&LangSet, bool)>]) -> LangSet {
    let mut out = LangSet::new();
    for (a, set) in delta.iter().enumerate() {
        for (lang, flag) in set {
            if *flag {
                out.insert(Trace::single(a));
            }
            for w in lang.iter() {
                out.insert(w.prepend(a));
            }
        }
    }
    out
}

/// WTS: `{(a, m) | (★, a, m) ∈ T} ∪ {(a·w, m+n) | (S, a, m) ∈ T, (w, n) ∈ S}`.
pub fn tau_wts(trans: &[(Succ<&TraceWeightSet>, usize, u64)]) -> TraceWeightSet {
    let mut out = TraceWeightSet::new();
    for (s, a, m) in trans {
        match s {
            Succ::Target => out.insert(Trace::single(*a), *m),
            Succ::State(set) => {
                for (w, n) in set.iter() {
                    out.insert(w.prepend(*a), add_weight(*m, *n));
                }
            }
        }
    }
    out
}

/// Weighted Mealy machine: `{(a, n) | (_, ⊤, n) ∈ δ(a)} ∪
/// {(a·w, n+n') | (S, _, n) ∈ δ(a), (w, n') ∈ S}`.
pub fn tau_wmm(delta: &[Vec<(&TraceWeightSet, bool, u64)>]) -> TraceWeightSet {
    let mut out = TraceWeightSet::new();
    for (a, set) in delta.iter().enumerate() {
        for (sem, flag, n) in set {
            if *flag {
                out.insert(Trace::single(a), *n);
            }
            for (w, n2) in sem.iter() {
                out.insert(w.prepend(a), add_weight(*n, *n2));
            }
        }
    }
    out
}

/// Reward machine: `f(a) = j` and `f(a·w) = j · f'(w)` for `δ(a) = (f', j)`.
pub fn tau_rm(delta: &[(&WeightMap, u64)]) -> WeightMap {
    let mut out = WeightMap::new();
    for (a, (f, j)) in delta.iter().enumerate() {
        out.insert(Trace::single(a), vec![*j]);
        for (w, ws) in f.iter() {
            let mut seq = Vec::with_capacity(ws.len() + 1);
            seq.push(*j);
            seq.extend_from_slice(ws);
            out.insert(w.prepend(a), seq);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::rat;

    #[test]
    fn wmm_unfolds_two_steps() {
        // δ(y, a) = {(y, ⊤, 2)} unfolded twice gives {(a,2), (a·a,4)}.
        let empty = TraceWeightSet::new();
        let one = tau_wmm(&[vec![(&empty, true, 2)]]);
        let two = tau_wmm(&[vec![(&one, true, 2)]]);
        let a = Trace::single(0);
        assert_eq!(two, TraceWeightSet::from_pairs([(a.clone(), 2), (a.prepend(0), 4)]));
    }

    #[test]
    fn mc_point_mass_on_target() {
        let row = [(Succ::Target, rat(1, 1))];
        let d = tau_mc(&row, 3);
        assert_eq!(d.get(&Trace::single(3)), rat(1, 1));
    }
}
