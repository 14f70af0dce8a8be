//! Product modalities `τ_{S⊗R}: F_{S⊗R}(Ω) → Ω`, taking one product step
//! whose pair successors have already been replaced by their values.

use num_traits::Zero;

use super::laws::ProdSucc;
use crate::domains::{rat_int, ExtNat, ExtRational, ProbReward, Rational};

/// `ν(⊤) + Σ_p ν(p)·p`.
pub fn reach<'a>(row: impl IntoIterator<Item = (ProdSucc<&'a Rational>, &'a Rational)>) -> Rational {
    let mut acc = Rational::zero();
    for (s, p) in row {
        match s {
            ProdSucc::State(v) => {
                if !v.is_zero() {
                    acc += p * v;
                }
            }
            ProdSucc::Accept => acc += p,
            ProdSucc::Reject => {}
        }
    }
    acc
}

/// Probability `ν(⊤) + Σ ν(p',r')·p'` and partial reward
/// `n·ν(⊤) + Σ ν(p',r')·(p'·n + r')` for a step carrying reward `n`.
pub fn reach_reward<'a>(
    row: impl IntoIterator<Item = (ProdSucc<&'a ProbReward>, &'a Rational)>,
    n: u64,
) -> ProbReward {
    let n = rat_int(n);
    let mut p = Rational::zero();
    let mut r = ExtRational::zero();
    for (s, mass) in row {
        match s {
            ProdSucc::State(v) => {
                p += mass * &v.prob;
                let term = match &v.reward {
                    ExtRational::Fin(r2) => ExtRational::Fin(mass * (&v.prob * &n + r2)),
                    ExtRational::Inf => ExtRational::Inf,
                };
                r = &r + &term;
            }
            ProdSucc::Accept => {
                p += mass;
                r = &r + &ExtRational::Fin(mass * &n);
            }
            ProdSucc::Reject => {}
        }
    }
    ProbReward { prob: p, reward: r }
}

/// `min({m | (⊤, m)} ∪ {m + v | (v, m)})` with `min ∅ = ∞`.
pub fn tropical<'a>(row: impl IntoIterator<Item = (ProdSucc<&'a ExtNat>, u64)>) -> ExtNat {
    let mut best = ExtNat::Inf;
    for (s, m) in row {
        let candidate = match s {
            ProdSucc::State(v) => ExtNat::Fin(m) + *v,
            ProdSucc::Accept => ExtNat::Fin(m),
            ProdSucc::Reject => continue,
        };
        best = best.min(candidate);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::rat;

    #[test]
    fn reach_reward_single_accepting_step() {
        let one = rat(1, 1);
        let out = reach_reward([(ProdSucc::Accept, &one)], 5);
        assert_eq!(out, ProbReward::new(rat(1, 1), rat(5, 1)));
    }

    #[test]
    fn tropical_ignores_reject() {
        let v = ExtNat::Fin(4);
        let row = [(ProdSucc::Reject, 0), (ProdSucc::State(&v), 1), (ProdSucc::Accept, 7)];
        assert_eq!(tropical(row), ExtNat::Fin(5));
        assert_eq!(tropical([]), ExtNat::Inf);
    }
}
