//! Distributive laws `λ_{X,Y}: F_S(X) × F_R(Y) → F_{S⊗R}(X × Y)`.
//!
//! Each law is polymorphic in `X` and `Y`: product construction instantiates
//! them with state indices, the diagram check with semantic values. The
//! optional [`Mutation`] injects a single-edit fault for mutation testing.

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::domains::Rational;
use crate::models::Succ;

/// Successor in a product: a pair state or one of the two flag sinks.
/// Absorbing products never use `Reject`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProdSucc<Z = usize> {
    State(Z),
    Accept,
    Reject,
}

impl<Z> ProdSucc<Z> {
    pub fn flag(b: bool) -> Self {
        if b {
            ProdSucc::Accept
        } else {
            ProdSucc::Reject
        }
    }

    pub fn as_ref(&self) -> ProdSucc<&Z> {
        match self {
            ProdSucc::State(z) => ProdSucc::State(z),
            ProdSucc::Accept => ProdSucc::Accept,
            ProdSucc::Reject => ProdSucc::Reject,
        }
    }

    pub fn map<W>(self, f: impl FnOnce(Z) -> W) -> ProdSucc<W> {
        match self {
            ProdSucc::State(z) => ProdSucc::State(f(z)),
            ProdSucc::Accept => ProdSucc::Accept,
            ProdSucc::Reject => ProdSucc::Reject,
        }
    }
}

/// Single-edit faults, one per law, used to show that the step-indexed
/// check detects broken products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// mc-dfa: target mass goes to the sink of the negated flag.
    McDfaFlipFlag,
    /// mrm-dfa: the carried reward is replaced by 0.
    MrmDfaDropReward,
    /// ntmc-dfa: accepting transitions follow ν instead of absorbing.
    NtmcDfaNoAbsorb,
    /// wts-nfa: every product weight becomes 0.
    WtsNfaDropWeight,
    /// wts-wmm: the requirement weight n is not added.
    WtsWmmDropPenalty,
    /// α: the composite flag is forced to ⊤.
    CostAlphaForceAccept,
}

impl Mutation {
    pub const ALL: [Mutation; 6] = [
        Mutation::McDfaFlipFlag,
        Mutation::MrmDfaDropReward,
        Mutation::NtmcDfaNoAbsorb,
        Mutation::WtsNfaDropWeight,
        Mutation::WtsWmmDropPenalty,
        Mutation::CostAlphaForceAccept,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Mutation::McDfaFlipFlag => "mc-dfa-flip-flag",
            Mutation::MrmDfaDropReward => "mrm-dfa-drop-reward",
            Mutation::NtmcDfaNoAbsorb => "ntmc-dfa-no-absorb",
            Mutation::WtsNfaDropWeight => "wts-nfa-drop-weight",
            Mutation::WtsWmmDropPenalty => "wts-wmm-drop-penalty",
            Mutation::CostAlphaForceAccept => "cost-alpha-force-accept",
        }
    }

    pub fn from_name(name: &str) -> Option<Mutation> {
        Mutation::ALL.into_iter().find(|m| m.name() == name)
    }
}

fn active(mutation: Option<Mutation>, which: Mutation) -> bool {
    mutation == Some(which)
}

/// MC × DFA: `(x', y') ↦ ν(x')` with `δ(a) = (y', _)`, and `b ↦ ν(★)` with
/// `δ(a) = (_, b)`.
pub fn mc_dfa<X: Clone, Y: Clone>(
    nu: &[(Succ<X>, Rational)],
    a: usize,
    delta: &[(Y, bool)],
    mutation: Option<Mutation>,
) -> Vec<(ProdSucc<(X, Y)>, Rational)> {
    let (y_next, flag) = &delta[a];
    let flag = if active(mutation, Mutation::McDfaFlipFlag) { !flag } else { *flag };
    nu.iter()
        .map(|(s, p)| {
            let succ = match s {
                Succ::State(x) => ProdSucc::State((x.clone(), y_next.clone())),
                Succ::Target => ProdSucc::flag(flag),
            };
            (succ, p.clone())
        })
        .collect()
}

/// MRM × DFA: the probabilistic part as [`mc_dfa`], the state reward carried.
pub fn mrm_dfa<X: Clone, Y: Clone>(
    nu: &[(Succ<X>, Rational)],
    reward: u64,
    a: usize,
    delta: &[(Y, bool)],
    mutation: Option<Mutation>,
) -> (Vec<(ProdSucc<(X, Y)>, Rational)>, u64) {
    let reward = if active(mutation, Mutation::MrmDfaDropReward) { 0 } else { reward };
    (mc_dfa(nu, a, delta, mutation), reward)
}

/// Never-terminating MC × DFA: on an accepting step all mass (1) goes to the
/// absorbing accept state, otherwise mass follows ν.
pub fn ntmc_dfa<X: Clone, Y: Clone>(
    nu: &[(X, Rational)],
    a: usize,
    delta: &[(Y, bool)],
    mutation: Option<Mutation>,
) -> Vec<(ProdSucc<(X, Y)>, Rational)> {
    let (y_next, flag) = &delta[a];
    if *flag && !active(mutation, Mutation::NtmcDfaNoAbsorb) {
        return vec![(ProdSucc::Accept, Rational::one())];
    }
    nu.iter().map(|(x, p)| (ProdSucc::State((x.clone(), y_next.clone())), p.clone())).collect()
}

/// WTS × NFA: every pairing of `(x', a, m) ∈ T` with `(y', b) ∈ δ(a)`.
pub fn wts_nfa<X: Clone, Y: Clone>(
    trans: &[(Succ<X>, usize, u64)],
    delta: &[Vec<(Y, bool)>],
    mutation: Option<Mutation>,
) -> Vec<(ProdSucc<(X, Y)>, u64)> {
    let mut out = Vec::new();
    for (s, a, m) in trans {
        let m = if active(mutation, Mutation::WtsNfaDropWeight) { 0 } else { *m };
        for (y, b) in &delta[*a] {
            let succ = match s {
                Succ::State(x) => ProdSucc::State((x.clone(), y.clone())),
                Succ::Target => ProdSucc::flag(*b),
            };
            out.push((succ, m));
        }
    }
    out
}

/// WTS × WMM: as [`wts_nfa`] with the requirement weight added.
pub fn wts_wmm<X: Clone, Y: Clone>(
    trans: &[(Succ<X>, usize, u64)],
    delta: &[Vec<(Y, bool, u64)>],
    mutation: Option<Mutation>,
) -> Vec<(ProdSucc<(X, Y)>, u64)> {
    let mut out = Vec::new();
    for (s, a, m) in trans {
        for (y, b, n) in &delta[*a] {
            let n = if active(mutation, Mutation::WtsWmmDropPenalty) { 0 } else { *n };
            let w = m.checked_add(n).expect("weight overflow in product");
            let succ = match s {
                Succ::State(x) => ProdSucc::State((x.clone(), y.clone())),
                Succ::Target => ProdSucc::flag(*b),
            };
            out.push((succ, w));
        }
    }
    out
}

/// α: reward machine step `δ₁: A → Y × [M]` composed with a DFA step over
/// `[M]`, `δ₂: [M] → Z × 2`; weight `j` selects `δ₂` entry `j − 1`.
pub fn alpha<Y: Clone, Z: Clone>(
    delta1: &[(Y, u64)],
    delta2: &[(Z, bool)],
    mutation: Option<Mutation>,
) -> Vec<((Y, Z), bool)> {
    delta1
        .iter()
        .map(|(y, j)| {
            let (z, t) = &delta2[(*j - 1) as usize];
            let t = *t || active(mutation, Mutation::CostAlphaForceAccept);
            ((y.clone(), z.clone()), t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::rat;

    #[test]
    fn mc_dfa_routes_target_mass_by_flag() {
        let nu = vec![(Succ::State("x1"), rat(4, 5)), (Succ::Target, rat(1, 5))];
        let delta = vec![("y0", false), ("y1", true)];
        let out = mc_dfa(&nu, 1, &delta, None);
        assert_eq!(out, vec![(ProdSucc::State(("x1", "y1")), rat(4, 5)), (ProdSucc::Accept, rat(1, 5))]);
        let bad = mc_dfa(&nu, 1, &delta, Some(Mutation::McDfaFlipFlag));
        assert_eq!(bad[1], (ProdSucc::Reject, rat(1, 5)));
    }

    #[test]
    fn ntmc_dfa_absorbs_on_accepting_steps() {
        let nu = vec![(0usize, rat(1, 2)), (1, rat(1, 2))];
        let delta = vec![(7usize, true)];
        assert_eq!(ntmc_dfa(&nu, 0, &delta, None), vec![(ProdSucc::Accept, rat(1, 1))]);
        assert_eq!(ntmc_dfa(&nu, 0, &delta, Some(Mutation::NtmcDfaNoAbsorb)).len(), 2);
    }

    #[test]
    fn wts_wmm_adds_weights() {
        let trans = vec![(Succ::<u8>::Target, 0usize, 2u64)];
        let delta = vec![vec![(0u8, true, 3u64)]];
        assert_eq!(wts_wmm(&trans, &delta, None), vec![(ProdSucc::Accept, 5)]);
    }

    #[test]
    fn mutation_names_round_trip() {
        for m in Mutation::ALL {
            assert_eq!(Mutation::from_name(m.name()), Some(m));
        }
    }
}
