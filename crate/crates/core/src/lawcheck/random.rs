//! Seeded random models for the law checks.
//!
//! Distributions: each row has support of size `1..=min(3, targets)`; the
//! masses are positive integers summing to a common denominator drawn from
//! `support..=16`. DFA/NFA/WMM edges accept with probability 1/4. Weights
//! are uniform in `1..=5`; MRM rewards in `0..=5`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domains::{rat, Rational};
use crate::models::{
    Alphabet, Dfa, LabeledMc, MarkovRewardModel, Nfa, NonTerminatingMc, RewardMachine, Succ, WeightedMealy,
    WeightedTs, WmmEdge, WtsEdge,
};

pub const MAX_DENOMINATOR: i64 = 16;
pub const MAX_WEIGHT: u64 = 5;
pub const MAX_REWARD: u64 = 5;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `a`, `b`, … up to `n ≤ 26` symbols.
pub fn alphabet(n: usize) -> Alphabet {
    assert!((1..=26).contains(&n), "alphabet size {n} out of range");
    Alphabet::new((0..n).map(|i| ((b'a' + i as u8) as char).to_string())).expect("distinct symbols")
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn accept_flag<R: Rng>(rng: &mut R) -> bool {
    rng.gen_ratio(1, 4)
}

/// A distribution over `targets` successors, as (successor index, mass).
pub fn distribution<R: Rng>(rng: &mut R, targets: usize) -> Vec<(usize, Rational)> {
    assert!(targets > 0);
    let support = rng.gen_range(1..=targets.min(3));
    let chosen = sample(rng, targets, support).into_vec();
    let den = rng.gen_range(support as i64..=MAX_DENOMINATOR);
    // Cut points split 1..den into `support` positive parts.
    let mut cuts: Vec<i64> = sample(rng, (den - 1) as usize, support - 1).into_iter().map(|c| c as i64 + 1).collect();
    cuts.sort_unstable();
    cuts.push(den);
    let mut prev = 0;
    chosen
        .into_iter()
        .zip(cuts)
        .map(|(t, c)| {
            let part = c - prev;
            prev = c;
            (t, rat(part, den))
        })
        .collect()
}

/// Labelled MC on `n` states; successor index `n` stands for ★.
pub fn mc<R: Rng>(rng: &mut R, alphabet: &Alphabet, n: usize) -> LabeledMc {
    let trans = (0..n)
        .map(|_| {
            distribution(rng, n + 1)
                .into_iter()
                .map(|(t, p)| (if t == n { Succ::Target } else { Succ::State(t) }, p))
                .collect()
        })
        .collect();
    let label = (0..n).map(|_| rng.gen_range(0..alphabet.len())).collect();
    LabeledMc::new(alphabet.clone(), names("x", n), label, trans, 0)
}

/// MC whose transitions only move to higher-indexed states or ★, so every
/// path has at most `n` steps.
pub fn acyclic_mc<R: Rng>(rng: &mut R, alphabet: &Alphabet, n: usize) -> LabeledMc {
    let trans = (0..n)
        .map(|x| {
            let later = n - x - 1;
            distribution(rng, later + 1)
                .into_iter()
                .map(|(t, p)| (if t == later { Succ::Target } else { Succ::State(x + 1 + t) }, p))
                .collect()
        })
        .collect();
    let label = (0..n).map(|_| rng.gen_range(0..alphabet.len())).collect();
    LabeledMc::new(alphabet.clone(), names("x", n), label, trans, 0)
}

pub fn rewards<R: Rng>(rng: &mut R, chain: LabeledMc) -> MarkovRewardModel {
    let reward = (0..chain.len()).map(|_| rng.gen_range(0..=MAX_REWARD)).collect();
    MarkovRewardModel::new(chain, reward)
}

pub fn ntmc<R: Rng>(rng: &mut R, alphabet: &Alphabet, n: usize) -> NonTerminatingMc {
    let trans = (0..n).map(|_| distribution(rng, n)).collect();
    let label = (0..n).map(|_| rng.gen_range(0..alphabet.len())).collect();
    NonTerminatingMc::new(alphabet.clone(), names("x", n), label, trans, 0)
}

/// WTS with `0..=3` edges per state; the successor is ★ with probability
/// `1/(n+1)`.
pub fn wts<R: Rng>(rng: &mut R, alphabet: &Alphabet, n: usize) -> WeightedTs {
    let trans = (0..n)
        .map(|_| {
            let mut row: Vec<WtsEdge> = (0..rng.gen_range(0..=3))
                .map(|_| {
                    let t = rng.gen_range(0..=n);
                    WtsEdge {
                        succ: if t == n { Succ::Target } else { Succ::State(t) },
                        symbol: rng.gen_range(0..alphabet.len()),
                        weight: rng.gen_range(1..=MAX_WEIGHT),
                    }
                })
                .collect();
            row.sort();
            row.dedup();
            row
        })
        .collect();
    WeightedTs::new(alphabet.clone(), names("x", n), trans, 0)
}

pub fn dfa<R: Rng>(rng: &mut R, alphabet: &Alphabet, n: usize) -> Dfa {
    let delta = (0..n)
        .map(|_| (0..alphabet.len()).map(|_| Some((rng.gen_range(0..n), accept_flag(rng)))).collect())
        .collect();
    Dfa { alphabet: alphabet.clone(), states: names("y", n), delta, initial: 0 }
}

/// NFA with `0..=2` elements per transition set.
pub fn nfa<R: Rng>(rng: &mut R, alphabet: &Alphabet, n: usize) -> Nfa {
    let delta = (0..n)
        .map(|_| {
            (0..alphabet.len())
                .map(|_| (0..rng.gen_range(0..=2)).map(|_| (rng.gen_range(0..n), accept_flag(rng))).collect())
                .collect()
        })
        .collect();
    Nfa::new(alphabet.clone(), names("y", n), delta, 0)
}

/// WMM with `0..=2` elements per transition set and penalties in `0..=5`.
pub fn wmm<R: Rng>(rng: &mut R, alphabet: &Alphabet, n: usize) -> WeightedMealy {
    let delta = (0..n)
        .map(|_| {
            (0..alphabet.len())
                .map(|_| {
                    (0..rng.gen_range(0..=2))
                        .map(|_| WmmEdge {
                            target: rng.gen_range(0..n),
                            accept: accept_flag(rng),
                            weight: rng.gen_range(0..=MAX_WEIGHT),
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    WeightedMealy::new(alphabet.clone(), names("y", n), delta, 0)
}

/// Reward machine emitting weights in `[bound]`.
pub fn reward_machine<R: Rng>(rng: &mut R, alphabet: &Alphabet, n: usize, bound: u64) -> RewardMachine {
    let delta = (0..n)
        .map(|_| (0..alphabet.len()).map(|_| Some((rng.gen_range(0..n), rng.gen_range(1..=bound)))).collect())
        .collect();
    RewardMachine { alphabet: alphabet.clone(), states: names("r", n), bound, delta, initial: 0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Validate;
    use num_traits::One;

    #[test]
    fn generated_models_are_valid() {
        let mut r = rng(1);
        for n in 1..=6 {
            for k in 1..=3 {
                let a = alphabet(k);
                assert!(mc(&mut r, &a, n).violations().is_empty());
                assert!(acyclic_mc(&mut r, &a, n).violations().is_empty());
                assert!(ntmc(&mut r, &a, n).violations().is_empty());
                assert!(wts(&mut r, &a, n).violations().is_empty());
                assert!(dfa(&mut r, &a, n).violations().is_empty());
                assert!(nfa(&mut r, &a, n).violations().is_empty());
                assert!(wmm(&mut r, &a, n).violations().is_empty());
                assert!(reward_machine(&mut r, &a, n, 3).violations().is_empty());
            }
        }
    }

    #[test]
    fn distributions_sum_to_one_with_small_denominators() {
        let mut r = rng(2);
        for targets in 1..=7 {
            for _ in 0..50 {
                let d = distribution(&mut r, targets);
                let total: Rational = d.iter().map(|(_, p)| p.clone()).sum();
                assert!(total.is_one());
                assert!(d.iter().all(|(_, p)| *p.denom() <= MAX_DENOMINATOR.into()));
            }
        }
    }

    #[test]
    fn same_seed_same_model() {
        let a = alphabet(3);
        assert_eq!(mc(&mut rng(9), &a, 5), mc(&mut rng(9), &a, 5));
    }
}
