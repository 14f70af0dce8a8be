//! Queries `q: Ω_S × Ω_R → Ω` on depth-bounded semantic values.
//!
//! The `*_by_depth` variants return, at index `k`, the query applied to the
//! depth-`k` restrictions of both arguments, for every `k ≤ kmax`.

use num_traits::Zero;

use super::semantics::{dfa_language, ntmc_marginal, partition};
use super::{LangSet, Trace, TraceDist, TraceRewardDist, TraceWeightSet, WeightMap};
use crate::domains::{rat_int, ExtNat, ExtRational, ProbReward, Rational};
use crate::models::{Dfa, NonTerminatingMc};

/// `Σ_{w∈L} ν(w)`.
pub fn query_prob(nu: &TraceDist, lang: &LangSet) -> Rational {
    prob_by_depth(nu, lang, usize::MAX).pop().expect("non-empty")
}

/// `q_prob(ν, L ∩ C) / q_prob(ν, C)`; `None` when the condition has
/// probability 0.
pub fn query_cond(nu: &TraceDist, lang: &LangSet, cond: &LangSet) -> Option<Rational> {
    let den = query_prob(nu, cond);
    if den.is_zero() {
        return None;
    }
    Some(query_prob(nu, &lang.intersection(cond)) / den)
}

/// Acceptance probability and partial expected reward
/// `Σ_n n · ν({(w, n) | w ∈ L})`.
pub fn query_reward(nu: &TraceRewardDist, lang: &LangSet) -> ProbReward {
    reward_by_depth(nu, lang, usize::MAX).pop().expect("non-empty")
}

/// `min {m | w ∈ L, (w, m) ∈ T}`, ∞ when nothing matches.
pub fn query_tropical(t: &TraceWeightSet, lang: &LangSet) -> ExtNat {
    tropical_by_depth(t, lang, usize::MAX).pop().expect("non-empty")
}

/// `min {m + n | (w, m) ∈ T, (w, n) ∈ L}`.
pub fn query_wmm(t: &TraceWeightSet, l: &TraceWeightSet) -> ExtNat {
    wmm_by_depth(t, l, usize::MAX).pop().expect("non-empty")
}

/// `Σ_{w, Σw < N} ν(w)` for traces over the weight alphabet `[M]`, where
/// symbol index `j` stands for weight `j + 1`.
pub fn query_cost_bounded(nu: &TraceDist, bound: u64) -> Rational {
    cost_bounded_by_depth(nu, bound, usize::MAX).pop().expect("non-empty")
}

/// `Σ_{w, Σf(w) < N} ν(w)`; `f` must be defined on the support of `ν`.
pub fn query_cost_induced(nu: &TraceDist, f: &WeightMap, bound: u64) -> Rational {
    cost_induced_by_depth(nu, f, bound, usize::MAX).pop().expect("non-empty")
}

/// `Σ_{i ≤ k} mrg σ i (Tⁱ)` with `T = L_k(y)` partitioned into its
/// prefix-minimal layers: the probability of seeing an accepted prefix
/// within `k` symbols.
pub fn query_safety(c: &NonTerminatingMc, x: usize, d: &Dfa, y: usize, k: usize) -> Rational {
    let t = dfa_language(d, y, k);
    let parts = partition(&t, k);
    let marginals: Vec<TraceDist> = (1..=k).map(|i| ntmc_marginal(c, x, i)).collect();
    safety_by_depth(&marginals, &parts).pop().expect("non-empty")
}

/// Folds per-length contributions into per-depth values.
fn accumulate<V: Clone>(
    kmax: usize,
    bottom: V,
    items: impl IntoIterator<Item = (usize, V)>,
    join: impl Fn(&V, &V) -> V,
) -> Vec<V> {
    let mut buckets: Vec<Option<V>> = Vec::new();
    let mut longest = 0;
    for (len, v) in items {
        if len > kmax {
            continue;
        }
        if buckets.len() <= len {
            buckets.resize(len + 1, None);
        }
        longest = longest.max(len);
        buckets[len] = Some(match &buckets[len] {
            Some(acc) => join(acc, &v),
            None => v,
        });
    }
    let depth = if kmax == usize::MAX { longest } else { kmax };
    let mut out = Vec::with_capacity(depth + 1);
    let mut acc = bottom;
    for k in 0..=depth {
        if let Some(Some(v)) = buckets.get(k) {
            acc = join(&acc, v);
        }
        out.push(acc.clone());
    }
    out
}

fn add(a: &Rational, b: &Rational) -> Rational {
    a + b
}

pub fn prob_by_depth(nu: &TraceDist, lang: &LangSet, kmax: usize) -> Vec<Rational> {
    let items = nu.iter().filter(|(w, _)| lang.contains(w)).map(|(w, p)| (w.len(), p.clone()));
    accumulate(kmax, Rational::zero(), items, add)
}

pub fn reward_by_depth(nu: &TraceRewardDist, lang: &LangSet, kmax: usize) -> Vec<ProbReward> {
    let items = nu
        .iter()
        .filter(|((w, _), _)| lang.contains(w))
        .map(|((w, n), p)| (w.len(), ProbReward::new(p.clone(), p * rat_int(*n))));
    accumulate(kmax, ProbReward::zero(), items, |a, b| ProbReward {
        prob: &a.prob + &b.prob,
        reward: &a.reward + &b.reward,
    })
}

pub fn tropical_by_depth(t: &TraceWeightSet, lang: &LangSet, kmax: usize) -> Vec<ExtNat> {
    let items = t.iter().filter(|(w, _)| lang.contains(w)).map(|(w, m)| (w.len(), ExtNat::Fin(*m)));
    accumulate(kmax, ExtNat::Inf, items, |a, b| *a.min(b))
}

pub fn wmm_by_depth(t: &TraceWeightSet, l: &TraceWeightSet, kmax: usize) -> Vec<ExtNat> {
    let penalty = l.min_weights();
    let items = t.iter().filter_map(|(w, m)| {
        penalty.get(w).map(|n| (w.len(), ExtNat::Fin(m.checked_add(*n).expect("weight overflow"))))
    });
    accumulate(kmax, ExtNat::Inf, items, |a, b| *a.min(b))
}

fn weight_sum(ws: impl IntoIterator<Item = u64>) -> u64 {
    ws.into_iter().fold(0u64, |acc, j| acc.checked_add(j).expect("weight overflow"))
}

pub fn cost_bounded_by_depth(nu: &TraceDist, bound: u64, kmax: usize) -> Vec<Rational> {
    let items = nu
        .iter()
        .filter(|(w, _)| weight_sum(w.symbols().map(|j| j as u64 + 1)) < bound)
        .map(|(w, p)| (w.len(), p.clone()));
    accumulate(kmax, Rational::zero(), items, add)
}

pub fn cost_induced_by_depth(nu: &TraceDist, f: &WeightMap, bound: u64, kmax: usize) -> Vec<Rational> {
    let total = |w: &Trace| {
        let seq = f.get(w).unwrap_or_else(|| panic!("weight map undefined on trace {w}"));
        weight_sum(seq.iter().copied())
    };
    let items = nu.iter().filter(|(w, _)| total(w) < bound).map(|(w, p)| (w.len(), p.clone()));
    accumulate(kmax, Rational::zero(), items, add)
}

/// `marginals[i − 1]` and `parts[i − 1]` are the depth-`i` marginal and
/// the layer `Tⁱ`; the result has one entry per depth `0..=len`.
pub fn safety_by_depth(marginals: &[TraceDist], parts: &[LangSet]) -> Vec<Rational> {
    assert_eq!(marginals.len(), parts.len(), "one marginal per layer");
    let mut out = vec![Rational::zero()];
    for (m, part) in marginals.iter().zip(parts) {
        let layer = if part.len() < m.len() {
            part.iter().fold(Rational::zero(), |acc, w| acc + m.get(w))
        } else {
            m.iter().filter(|(w, _)| part.contains(w)).fold(Rational::zero(), |acc, (_, p)| acc + p)
        };
        let next = out.last().expect("non-empty") + layer;
        out.push(next);
    }
    out
}

/// Reward component as a rational; panics on ∞, which no finite
/// distribution produces.
pub fn finite_reward(v: &ProbReward) -> &Rational {
    match &v.reward {
        ExtRational::Fin(r) => r,
        ExtRational::Inf => panic!("finite distribution produced infinite reward"),
    }
}
