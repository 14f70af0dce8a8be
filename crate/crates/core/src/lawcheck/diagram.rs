//! One-step commutation on sampled semantic values:
//! `q ∘ (τ_S × τ_R) = τ_{S⊗R} ∘ F_{S⊗R}(q) ∘ λ`.
//!
//! Inputs are elements of `F_S(Ω_S) × F_R(Ω_R)` whose successor positions
//! hold small random finite semantic values. Sample 0 puts all system mass
//! on ★ and sample 1 gives the requirement only empty values; the rest are
//! random.

use std::fmt;

use rand::seq::index::sample;
use rand::Rng;
use thiserror::Error;

use super::{random, CheckResult, Counterexample, Pairing};
use crate::domains::{rat, ExtNat, ProbReward, Rational};
use crate::models::Succ;
use crate::oracle::modality::{tau_dfa, tau_mc, tau_mrm, tau_nfa, tau_rm, tau_wmm, tau_wts};
use crate::oracle::{query_prob, query_reward, query_tropical, query_wmm, LangSet, Trace, TraceDist, TraceRewardDist, TraceWeightSet, WeightMap};
use crate::products::{laws, modality, Mutation, ProdSucc};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error(
        "weaker criterion only: the {0} product is correct only up to its Kleene iterates; use step equality instead"
    )]
    WeakerCriterionOnly(Pairing),
}

const MAX_TRACE_LEN: usize = 3;

fn trace<R: Rng>(rng: &mut R, symbols: usize) -> Trace {
    let len = rng.gen_range(1..=MAX_TRACE_LEN);
    Trace::new((0..len).map(|_| rng.gen_range(0..symbols))).expect("non-empty")
}

/// `count` positive masses over a common denominator, summing to at most 1.
fn sub_masses<R: Rng>(rng: &mut R, count: usize) -> Vec<Rational> {
    if count == 0 {
        return Vec::new();
    }
    let den = rng.gen_range(count as i64..=random::MAX_DENOMINATOR);
    let total = rng.gen_range(count as i64..=den);
    let mut cuts: Vec<i64> = sample(rng, (total - 1) as usize, count - 1).into_iter().map(|c| c as i64 + 1).collect();
    cuts.sort_unstable();
    cuts.push(total);
    let mut prev = 0;
    cuts.into_iter()
        .map(|c| {
            let part = c - prev;
            prev = c;
            rat(part, den)
        })
        .collect()
}

fn trace_dist<R: Rng>(rng: &mut R, symbols: usize) -> TraceDist {
    let n = rng.gen_range(0..=3);
    let masses = sub_masses(rng, n);
    TraceDist::from_entries(masses.into_iter().map(|p| (trace(rng, symbols), p)))
}

fn trace_reward_dist<R: Rng>(rng: &mut R, symbols: usize) -> TraceRewardDist {
    let n = rng.gen_range(0..=3);
    let mut d = TraceRewardDist::new();
    for p in sub_masses(rng, n) {
        d.add(trace(rng, symbols), rng.gen_range(0..=random::MAX_REWARD), &p);
    }
    d
}

fn lang<R: Rng>(rng: &mut R, symbols: usize) -> LangSet {
    let n = rng.gen_range(0..=4);
    LangSet::from_words((0..n).map(|_| trace(rng, symbols)))
}

fn weight_set<R: Rng>(rng: &mut R, symbols: usize) -> TraceWeightSet {
    let n = rng.gen_range(0..=4);
    TraceWeightSet::from_pairs((0..n).map(|_| (trace(rng, symbols), rng.gen_range(0..=2 * random::MAX_WEIGHT))))
}

/// A reward machine's semantics restricted to words of length at most 2:
/// total there, weights in `1..=bound`.
fn weight_map<R: Rng>(rng: &mut R, symbols: usize, bound: u64) -> WeightMap {
    let mut f = WeightMap::new();
    for a in 0..symbols {
        f.insert(Trace::single(a), vec![rng.gen_range(1..=bound)]);
        for b in 0..symbols {
            let w = Trace::new([a, b]).expect("non-empty");
            f.insert(w, vec![rng.gen_range(1..=bound), rng.gen_range(1..=bound)]);
        }
    }
    f
}

struct Sample {
    index: usize,
    symbols: usize,
}

impl Sample {
    fn target_only(&self) -> bool {
        self.index == 0
    }

    fn empty_requirement(&self) -> bool {
        self.index == 1
    }
}

/// Successor positions `0..n` hold values, position `n` is ★; masses sum
/// to 1.
fn mc_row<V, R: Rng>(rng: &mut R, s: &Sample, values: &[V]) -> Vec<(Succ<usize>, Rational)> {
    if s.target_only() {
        return vec![(Succ::Target, rat(1, 1))];
    }
    random::distribution(rng, values.len() + 1)
        .into_iter()
        .map(|(t, p)| (if t == values.len() { Succ::Target } else { Succ::State(t) }, p))
        .collect()
}

fn show<T: fmt::Display>(v: &T) -> String {
    v.to_string()
}

fn show_lang(l: &LangSet) -> String {
    let words: Vec<String> = l.sorted().into_iter().map(Trace::to_string).collect();
    format!("{{{}}}", words.join(", "))
}

enum Outcome {
    Equal,
    Differ(String, String),
}

fn outcome<T: PartialEq>(lhs: T, rhs: T, render: impl Fn(&T) -> String) -> Outcome {
    if lhs == rhs {
        Outcome::Equal
    } else {
        Outcome::Differ(render(&lhs), render(&rhs))
    }
}

fn resolve<'a, V>(values: &'a [V], s: &Succ<usize>) -> Succ<&'a V> {
    match s {
        Succ::State(i) => Succ::State(&values[*i]),
        Succ::Target => Succ::Target,
    }
}

fn sample_mc_dfa<R: Rng>(rng: &mut R, s: &Sample, mutation: Option<Mutation>) -> Outcome {
    let n = s.symbols;
    let sys: Vec<TraceDist> = (0..rng.gen_range(1..=3)).map(|_| trace_dist(rng, n)).collect();
    let row = mc_row(rng, s, &sys);
    let row: Vec<(Succ<&TraceDist>, Rational)> = row.iter().map(|(t, p)| (resolve(&sys, t), p.clone())).collect();
    let a = rng.gen_range(0..n);
    let langs: Vec<LangSet> = (0..n).map(|_| if s.empty_requirement() { LangSet::new() } else { lang(rng, n) }).collect();
    let delta: Vec<(&LangSet, bool)> = langs.iter().map(|l| (l, rng.gen_bool(0.5))).collect();

    let lhs = query_prob(&tau_mc(&row, a), &tau_dfa(&delta));
    let prod = laws::mc_dfa(&row, a, &delta, mutation);
    let values: Vec<(ProdSucc<Rational>, &Rational)> =
        prod.iter().map(|(t, p)| (t.clone().map(|(sigma, l)| query_prob(sigma, l)), p)).collect();
    let rhs = modality::reach(values.iter().map(|(t, p)| (t.as_ref(), *p)));
    outcome(lhs, rhs, show)
}

fn sample_mrm_dfa<R: Rng>(rng: &mut R, s: &Sample, mutation: Option<Mutation>) -> Outcome {
    let n = s.symbols;
    let sys: Vec<TraceRewardDist> = (0..rng.gen_range(1..=3)).map(|_| trace_reward_dist(rng, n)).collect();
    let row = mc_row(rng, s, &sys);
    let row: Vec<(Succ<&TraceRewardDist>, Rational)> =
        row.iter().map(|(t, p)| (resolve(&sys, t), p.clone())).collect();
    let a = rng.gen_range(0..n);
    let reward = rng.gen_range(0..=random::MAX_REWARD);
    let langs: Vec<LangSet> = (0..n).map(|_| if s.empty_requirement() { LangSet::new() } else { lang(rng, n) }).collect();
    let delta: Vec<(&LangSet, bool)> = langs.iter().map(|l| (l, rng.gen_bool(0.5))).collect();

    let lhs = query_reward(&tau_mrm(&row, a, reward), &tau_dfa(&delta));
    let (prod, carried) = laws::mrm_dfa(&row, reward, a, &delta, mutation);
    let values: Vec<(ProdSucc<ProbReward>, &Rational)> =
        prod.iter().map(|(t, p)| (t.clone().map(|(sigma, l)| query_reward(sigma, l)), p)).collect();
    let rhs = modality::reach_reward(values.iter().map(|(t, p)| (t.as_ref(), *p)), carried);
    outcome(lhs, rhs, show)
}

/// `q(f, L) = {w ∈ dom f | f(w) ∈ L}`, reading weight `j` as symbol `j − 1`.
fn q_cost(f: &WeightMap, l: &LangSet) -> LangSet {
    LangSet::from_words(
        f.iter()
            .filter(|(_, ws)| l.contains(&Trace::new(ws.iter().map(|j| (*j - 1) as usize)).expect("non-empty")))
            .map(|(w, _)| w.clone()),
    )
}

fn sample_cost<R: Rng>(rng: &mut R, s: &Sample, mutation: Option<Mutation>) -> Outcome {
    let n = s.symbols;
    let m = rng.gen_range(1..=3u64);
    let maps: Vec<WeightMap> = (0..rng.gen_range(1..=3)).map(|_| weight_map(rng, n, m)).collect();
    let delta1: Vec<(&WeightMap, u64)> =
        (0..n).map(|_| (&maps[rng.gen_range(0..maps.len())], rng.gen_range(1..=m))).collect();
    let langs: Vec<LangSet> =
        (0..m).map(|_| if s.empty_requirement() { LangSet::new() } else { lang(rng, m as usize) }).collect();
    let delta2: Vec<(&LangSet, bool)> = langs.iter().map(|l| (l, rng.gen_bool(0.5))).collect();

    let lhs = q_cost(&tau_rm(&delta1), &tau_dfa(&delta2));
    let composite: Vec<(LangSet, bool)> =
        laws::alpha(&delta1, &delta2, mutation).into_iter().map(|((f, l), t)| (q_cost(f, l), t)).collect();
    let rhs = tau_dfa(&composite.iter().map(|(l, t)| (l, *t)).collect::<Vec<_>>());
    outcome(lhs, rhs, show_lang)
}

fn wts_row<R: Rng>(rng: &mut R, s: &Sample, values: &[TraceWeightSet]) -> Vec<(Succ<usize>, usize, u64)> {
    let count = if s.target_only() { 1 } else { rng.gen_range(0..=3) };
    (0..count)
        .map(|_| {
            let succ = if s.target_only() || rng.gen_range(0..=values.len()) == values.len() {
                Succ::Target
            } else {
                Succ::State(rng.gen_range(0..values.len()))
            };
            (succ, rng.gen_range(0..s.symbols), rng.gen_range(1..=random::MAX_WEIGHT))
        })
        .collect()
}

fn sample_wts_nfa<R: Rng>(rng: &mut R, s: &Sample, mutation: Option<Mutation>) -> Outcome {
    let n = s.symbols;
    let sys: Vec<TraceWeightSet> = (0..rng.gen_range(1..=3)).map(|_| weight_set(rng, n)).collect();
    let row = wts_row(rng, s, &sys);
    let row: Vec<(Succ<&TraceWeightSet>, usize, u64)> = row.iter().map(|(t, a, m)| (resolve(&sys, t), *a, *m)).collect();
    let langs: Vec<LangSet> =
        (0..3).map(|_| if s.empty_requirement() { LangSet::new() } else { lang(rng, n) }).collect();
    let delta: Vec<Vec<(&LangSet, bool)>> = (0..n)
        .map(|_| (0..rng.gen_range(0..=2)).map(|_| (&langs[rng.gen_range(0..langs.len())], rng.gen_bool(0.5))).collect())
        .collect();

    let lhs = query_tropical(&tau_wts(&row), &tau_nfa(&delta));
    let prod = laws::wts_nfa(&row, &delta, mutation);
    let values: Vec<(ProdSucc<ExtNat>, u64)> =
        prod.iter().map(|(t, m)| (t.clone().map(|(set, l)| query_tropical(set, l)), *m)).collect();
    let rhs = modality::tropical(values.iter().map(|(t, m)| (t.as_ref(), *m)));
    outcome(lhs, rhs, show)
}

fn sample_wts_wmm<R: Rng>(rng: &mut R, s: &Sample, mutation: Option<Mutation>) -> Outcome {
    let n = s.symbols;
    let sys: Vec<TraceWeightSet> = (0..rng.gen_range(1..=3)).map(|_| weight_set(rng, n)).collect();
    let row = wts_row(rng, s, &sys);
    let row: Vec<(Succ<&TraceWeightSet>, usize, u64)> = row.iter().map(|(t, a, m)| (resolve(&sys, t), *a, *m)).collect();
    let reqs: Vec<TraceWeightSet> =
        (0..3).map(|_| if s.empty_requirement() { TraceWeightSet::new() } else { weight_set(rng, n) }).collect();
    let delta: Vec<Vec<(&TraceWeightSet, bool, u64)>> = (0..n)
        .map(|_| {
            (0..rng.gen_range(0..=2))
                .map(|_| (&reqs[rng.gen_range(0..reqs.len())], rng.gen_bool(0.5), rng.gen_range(0..=random::MAX_WEIGHT)))
                .collect()
        })
        .collect();

    let lhs = query_wmm(&tau_wts(&row), &tau_wmm(&delta));
    let prod = laws::wts_wmm(&row, &delta, mutation);
    let values: Vec<(ProdSucc<ExtNat>, u64)> =
        prod.iter().map(|(t, m)| (t.clone().map(|(set, l)| query_wmm(set, l)), *m)).collect();
    let rhs = modality::tropical(values.iter().map(|(t, m)| (t.as_ref(), *m)));
    outcome(lhs, rhs, show)
}

pub fn check_diagram(pairing: Pairing, samples: usize, seed: u64) -> Result<CheckResult, DiagramError> {
    check_diagram_with(pairing, samples, seed, None)
}

/// As [`check_diagram`] with the law evaluated under a mutation.
pub fn check_diagram_with(
    pairing: Pairing,
    samples: usize,
    seed: u64,
    mutation: Option<Mutation>,
) -> Result<CheckResult, DiagramError> {
    if !pairing.has_full_criterion() {
        return Err(DiagramError::WeakerCriterionOnly(pairing));
    }
    let name = format!("diagram/{pairing}");
    let mut rng = random::rng(seed);
    for index in 0..samples {
        let s = Sample { index, symbols: rng.gen_range(1..=3) };
        let out = match pairing {
            Pairing::McDfa => sample_mc_dfa(&mut rng, &s, mutation),
            Pairing::MrmDfa => sample_mrm_dfa(&mut rng, &s, mutation),
            Pairing::CostDfa => sample_cost(&mut rng, &s, mutation),
            Pairing::WtsNfa => sample_wts_nfa(&mut rng, &s, mutation),
            Pairing::WtsWmm => sample_wts_wmm(&mut rng, &s, mutation),
            Pairing::NtmcDfa => unreachable!("refused above"),
        };
        if let Outcome::Differ(lhs, rhs) = out {
            return Ok(CheckResult::fail(
                name,
                index + 1,
                Counterexample {
                    models: format!("{pairing} sample {index} (seed {seed})"),
                    state: format!("sample {index}"),
                    step: None,
                    lhs,
                    rhs,
                },
            ));
        }
    }
    Ok(CheckResult::pass(name, samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_pairings_commute() {
        for p in Pairing::ALL.into_iter().filter(Pairing::has_full_criterion) {
            let r = check_diagram(p, 200, 11).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn ntmc_is_refused() {
        let e = check_diagram(Pairing::NtmcDfa, 10, 0).unwrap_err();
        assert!(e.to_string().contains("weaker criterion only"));
    }

    #[test]
    fn target_point_mass_gives_the_flag() {
        // Sample 0: ν = δ★, so both sides are [b = ⊤] for the read symbol.
        let mut rng = random::rng(0);
        let s = Sample { index: 0, symbols: 2 };
        assert!(matches!(sample_mc_dfa(&mut rng, &s, None), Outcome::Equal));
    }

    #[test]
    fn mutated_laws_break_the_diagram() {
        let cases = [
            (Pairing::McDfa, Mutation::McDfaFlipFlag),
            (Pairing::MrmDfa, Mutation::MrmDfaDropReward),
            (Pairing::CostDfa, Mutation::CostAlphaForceAccept),
            (Pairing::WtsNfa, Mutation::WtsNfaDropWeight),
            (Pairing::WtsWmm, Mutation::WtsWmmDropPenalty),
        ];
        for (p, m) in cases {
            let r = check_diagram_with(p, 200, 11, Some(m)).unwrap();
            assert!(!r.passed, "{p} with {} went unnoticed", m.name());
        }
    }
}
