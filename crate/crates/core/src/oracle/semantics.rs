//! Depth-`k` semantics of every model kind, for all states at once (Kleene
//! iteration of the modalities in [`super::modality`]), plus single-state
//! path enumerations used as an independent second route.

use num_traits::One;

use super::modality::{tau_dfa, tau_mc, tau_mrm, tau_nfa, tau_rm, tau_wmm, tau_wts};
use super::{LangSet, Trace, TraceDist, TraceRewardDist, TraceWeightSet, WeightMap};
use crate::domains::Rational;
use crate::models::{Dfa, LabeledMc, MarkovRewardModel, Nfa, NonTerminatingMc, RewardMachine, Succ, WeightedMealy, WeightedTs};

/// `Φᵏ(⊥)` for a transformer given state-wise.
fn kleene<V: Default + Clone>(states: usize, k: usize, step: impl Fn(&[V], usize) -> V) -> Vec<V> {
    let mut cur = vec![V::default(); states];
    for _ in 0..k {
        cur = (0..states).map(|x| step(&cur, x)).collect();
    }
    cur
}

fn lookup<'a, V>(values: &'a [V], s: &Succ) -> Succ<&'a V> {
    match s {
        Succ::State(x) => Succ::State(&values[*x]),
        Succ::Target => Succ::Target,
    }
}

pub fn mc_semantics_all(c: &LabeledMc, k: usize) -> Vec<TraceDist> {
    kleene(c.len(), k, |cur: &[TraceDist], x| {
        let row: Vec<_> = c.trans[x].iter().map(|(s, p)| (lookup(cur, s), p.clone())).collect();
        tau_mc(&row, c.label[x])
    })
}

/// Trace distribution of the paths from `x` that reach ★ within `k` steps,
/// by explicit path enumeration.
pub fn mc_semantics(c: &LabeledMc, x: usize, k: usize) -> TraceDist {
    let mut out = TraceDist::new();
    let mut stack: Vec<(usize, Vec<usize>, Rational)> = vec![(x, Vec::new(), Rational::one())];
    while let Some((s, mut word, p)) = stack.pop() {
        if word.len() >= k {
            continue;
        }
        word.push(c.label[s]);
        for (succ, q) in &c.trans[s] {
            let pq = &p * q;
            match succ {
                Succ::Target => out.add(Trace::new(word.iter().copied()).expect("non-empty"), &pq),
                Succ::State(x2) => stack.push((*x2, word.clone(), pq)),
            }
        }
    }
    out
}

pub fn mrm_semantics_all(c: &MarkovRewardModel, k: usize) -> Vec<TraceRewardDist> {
    let chain = &c.chain;
    kleene(chain.len(), k, |cur: &[TraceRewardDist], x| {
        let row: Vec<_> = chain.trans[x].iter().map(|(s, p)| (lookup(cur, s), p.clone())).collect();
        tau_mrm(&row, chain.label[x], c.reward[x])
    })
}

pub fn mrm_semantics(c: &MarkovRewardModel, x: usize, k: usize) -> TraceRewardDist {
    mrm_semantics_all(c, k).swap_remove(x)
}

pub fn dfa_language_all(d: &Dfa, k: usize) -> Vec<LangSet> {
    kleene(d.len(), k, |cur: &[LangSet], y| {
        let delta: Vec<_> = (0..d.alphabet.len())
            .map(|a| {
                let (y2, b) = d.step(y, a);
                (&cur[y2], b)
            })
            .collect();
        tau_dfa(&delta)
    })
}

/// Accepted words of length `1..=k` from `y`.
pub fn dfa_language(d: &Dfa, y: usize, k: usize) -> LangSet {
    dfa_language_all(d, k).swap_remove(y)
}

pub fn nfa_language_all(d: &Nfa, k: usize) -> Vec<LangSet> {
    kleene(d.len(), k, |cur: &[LangSet], y| {
        let delta: Vec<Vec<_>> =
            d.delta[y].iter().map(|set| set.iter().map(|(y2, b)| (&cur[*y2], *b)).collect()).collect();
        tau_nfa(&delta)
    })
}

pub fn nfa_language(d: &Nfa, y: usize, k: usize) -> LangSet {
    nfa_language_all(d, k).swap_remove(y)
}

pub fn wts_semantics_all(c: &WeightedTs, k: usize) -> Vec<TraceWeightSet> {
    kleene(c.len(), k, |cur: &[TraceWeightSet], x| {
        let row: Vec<_> = c.trans[x].iter().map(|e| (lookup(cur, &e.succ), e.symbol, e.weight)).collect();
        tau_wts(&row)
    })
}

pub fn wts_semantics(c: &WeightedTs, x: usize, k: usize) -> TraceWeightSet {
    wts_semantics_all(c, k).swap_remove(x)
}

pub fn wmm_semantics_all(d: &WeightedMealy, k: usize) -> Vec<TraceWeightSet> {
    kleene(d.len(), k, |cur: &[TraceWeightSet], y| {
        let delta: Vec<Vec<_>> = d.delta[y]
            .iter()
            .map(|set| set.iter().map(|e| (&cur[e.target], e.accept, e.weight)).collect())
            .collect();
        tau_wmm(&delta)
    })
}

pub fn wmm_semantics(d: &WeightedMealy, y: usize, k: usize) -> TraceWeightSet {
    wmm_semantics_all(d, k).swap_remove(y)
}

/// Weight sequences of every word of length `1..=k`; `|A|ᵏ` entries, so
/// only for small depths.
pub fn rm_semantics_all(d: &RewardMachine, k: usize) -> Vec<WeightMap> {
    kleene(d.len(), k, |cur: &[WeightMap], y| {
        let delta: Vec<_> = (0..d.alphabet.len())
            .map(|a| {
                let (y2, j) = d.step(y, a);
                (&cur[y2], j)
            })
            .collect();
        tau_rm(&delta)
    })
}

pub fn rm_semantics(d: &RewardMachine, y: usize, k: usize) -> WeightMap {
    rm_semantics_all(d, k).swap_remove(y)
}

/// The same function as [`rm_semantics`], restricted to the given words
/// and computed by running the machine on each.
pub fn rm_semantics_on<'a>(d: &RewardMachine, y: usize, words: impl IntoIterator<Item = &'a Trace>) -> WeightMap {
    let mut out = WeightMap::new();
    for w in words {
        let mut state = y;
        let mut seq = Vec::with_capacity(w.len());
        for a in w.symbols() {
            let (next, j) = d.step(state, a);
            seq.push(j);
            state = next;
        }
        out.insert(w.clone(), seq);
    }
    out
}

/// The pairs of [`wmm_semantics`] whose trace lies in `words`, computed by
/// running the machine on each word: `(w, n)` for every run that accepts
/// on the last symbol of `w` with accumulated weight `n`.
pub fn wmm_semantics_on<'a>(d: &WeightedMealy, y: usize, words: impl IntoIterator<Item = &'a Trace>) -> TraceWeightSet {
    let mut out = TraceWeightSet::new();
    for w in words {
        // (state, weight so far) for runs that have read a proper prefix.
        let mut front: Vec<(usize, u64)> = vec![(y, 0)];
        let last = w.len() - 1;
        for (i, a) in w.symbols().enumerate() {
            let mut next = Vec::new();
            for &(s, acc) in &front {
                for e in &d.delta[s][a] {
                    let total = acc.checked_add(e.weight).expect("weight overflow");
                    if i == last {
                        if e.accept {
                            out.insert(w.clone(), total);
                        }
                    } else {
                        next.push((e.target, total));
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            front = next;
        }
    }
    out
}

/// Depth-`n` marginal of the trace measure from `x`: the probability of each
/// cylinder of length `n`, by path enumeration. Empty for `n = 0`.
pub fn ntmc_marginal(c: &NonTerminatingMc, x: usize, n: usize) -> TraceDist {
    let mut out = TraceDist::new();
    if n == 0 {
        return out;
    }
    let mut stack: Vec<(usize, Vec<usize>, Rational)> = vec![(x, Vec::new(), Rational::one())];
    while let Some((s, mut word, p)) = stack.pop() {
        word.push(c.label[s]);
        if word.len() == n {
            out.add(Trace::new(word).expect("non-empty"), &p);
            continue;
        }
        for (x2, q) in &c.trans[s] {
            stack.push((*x2, word.clone(), &p * q));
        }
    }
    out
}

/// Marginals of depth `1..=n` for every state: entry `[x][i − 1]` is the
/// depth-`i` marginal from `x`.
pub fn ntmc_marginals_all(c: &NonTerminatingMc, n: usize) -> Vec<Vec<TraceDist>> {
    let mut out: Vec<Vec<TraceDist>> = vec![Vec::with_capacity(n); c.len()];
    if n == 0 {
        return out;
    }
    let mut prev: Vec<TraceDist> = (0..c.len()).map(|x| TraceDist::from_entries([(Trace::single(c.label[x]), Rational::one())])).collect();
    for i in 1..=n {
        if i > 1 {
            let next: Vec<TraceDist> = (0..c.len())
                .map(|x| {
                    let mut d = TraceDist::new();
                    for (x2, p) in &c.trans[x] {
                        for (w, q) in prev[*x2].iter() {
                            d.add(w.prepend(c.label[x]), &(p * q));
                        }
                    }
                    d
                })
                .collect();
            prev = next;
        }
        for (x, d) in prev.iter().enumerate() {
            out[x].push(d.clone());
        }
    }
    out
}

/// `T¹ … Tⁿ`: `T¹` holds the length-1 words of `T`, and `Tⁱ⁺¹` the
/// length-(i+1) words of `T` with no proper prefix in an earlier part.
pub fn partition(t: &LangSet, n: usize) -> Vec<LangSet> {
    let mut by_len: Vec<Vec<&Trace>> = vec![Vec::new(); n];
    for w in t.iter() {
        if w.len() <= n {
            by_len[w.len() - 1].push(w);
        }
    }
    let mut parts: Vec<LangSet> = Vec::with_capacity(n);
    for (i, words) in by_len.into_iter().enumerate() {
        let part = LangSet::from_words(
            words
                .into_iter()
                .filter(|w| (1..=i).all(|j| !parts[j - 1].contains(&w.prefix(j))))
                .cloned(),
        );
        parts.push(part);
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::rat;
    use crate::fixtures;
    use crate::models::Alphabet;

    fn word(a: &Alphabet, text: &str) -> Trace {
        Trace::parse(text, a).unwrap()
    }

    #[test]
    fn fig4_trace_distribution_at_depth_three() {
        let c = fixtures::fig4_mc();
        let a = &c.alphabet;
        let expected = TraceDist::from_entries([
            (word(a, "sand·lake·recharge"), rat(4, 5)),
            (word(a, "sand·sand·recharge"), rat(4, 25)),
            (word(a, "sand·sand·volcano"), rat(1, 25)),
        ]);
        assert_eq!(mc_semantics(&c, c.initial, 3), expected);
        assert_eq!(mc_semantics_all(&c, 3)[c.initial], expected);
        let x3 = c.state_index("x3").unwrap();
        assert_eq!(mc_semantics(&c, x3, 1), TraceDist::from_entries([(word(a, "recharge"), rat(1, 1))]));
        assert!(mc_semantics(&c, c.initial, 0).is_empty());
    }

    #[test]
    fn fig2_language_contains_the_accepted_trace() {
        let d = fixtures::fig2_dfa();
        let a = &d.alphabet;
        let l = dfa_language(&d, d.initial, 3);
        assert!(l.contains(&word(a, "sand·sand·recharge")));
        assert!(!l.contains(&word(a, "sand·lake·recharge")));
        assert!(dfa_language(&d, d.initial, 0).is_empty());
    }

    #[test]
    fn fig5_language_up_to_two_letters() {
        let d = fixtures::fig5_nfa();
        let a = &d.alphabet;
        let expected = LangSet::from_words(["T", "P·T", "B·T", "T·T"].map(|w| word(a, w)));
        assert_eq!(nfa_language(&d, d.initial, 2), expected);
    }

    #[test]
    fn partition_excludes_extensions() {
        let t = LangSet::from_words([Trace::new([0]).unwrap(), Trace::new([0, 1]).unwrap(), Trace::new([1]).unwrap()]);
        let parts = partition(&t, 2);
        assert_eq!(parts[0].len(), 2);
        assert!(parts[1].is_empty());
        let t = LangSet::from_words([Trace::new([0, 1]).unwrap()]);
        let parts = partition(&t, 2);
        assert!(parts[0].is_empty());
        assert_eq!(parts[1].len(), 1);
    }

    #[test]
    fn self_loop_marginal_is_deterministic() {
        let a = Alphabet::new(["a"]).unwrap();
        let c = NonTerminatingMc::new(a, vec!["x".into()], vec![0], vec![vec![(0, rat(1, 1))]], 0);
        assert_eq!(ntmc_marginal(&c, 0, 3), TraceDist::from_entries([(Trace::new([0, 0, 0]).unwrap(), rat(1, 1))]));
        assert_eq!(ntmc_marginals_all(&c, 3)[0][2], ntmc_marginal(&c, 0, 3));
    }

    #[test]
    fn constant_reward_machine() {
        let a = Alphabet::new(["a", "b"]).unwrap();
        let rm = RewardMachine { alphabet: a, states: vec!["r".into()], bound: 1, delta: vec![vec![Some((0, 1)), Some((0, 1))]], initial: 0 };
        let f = rm_semantics(&rm, 0, 2);
        let ab = Trace::new([0, 1]).unwrap();
        assert_eq!(f.get(&ab), Some(&[1, 1][..]));
        assert_eq!(rm_semantics_on(&rm, 0, [&ab]).get(&ab), f.get(&ab));
    }

    #[test]
    fn reward_one_state() {
        let a = Alphabet::new(["a"]).unwrap();
        let chain = LabeledMc::new(a, vec!["x".into()], vec![0], vec![vec![(Succ::Target, rat(1, 1))]], 0);
        let m = MarkovRewardModel::new(chain, vec![5]);
        let s = mrm_semantics(&m, 0, 1);
        assert_eq!(s.get(&Trace::single(0), 5), rat(1, 1));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn wmm_runs_agree_with_kleene_semantics() {
        let d = fixtures::travel_wmm();
        let n = d.alphabet.len();
        let mut words: Vec<Trace> = (0..n).map(Trace::single).collect();
        let mut frontier = words.clone();
        for _ in 1..4 {
            frontier = frontier.iter().flat_map(|w| (0..n).map(move |a| w.prepend(a))).collect();
            words.extend(frontier.iter().cloned());
        }
        for y in 0..d.len() {
            assert_eq!(wmm_semantics_on(&d, y, &words), wmm_semantics(&d, y, 4));
        }
    }
}
