//! Executable correctness checks relating products to the direct semantics.
//!
//! * [`check_step_equality`]: for every `k ≤ kmax` and every state pair, the
//!   `k`-th Kleene iterate of the product equals the query applied to the
//!   depth-`k` semantics of both components.
//! * [`check_diagram`]: one-step commutation of the law with the modalities
//!   and the query, on sampled semantic values.
//! * [`check_cost_bounded`], [`check_cost_induced`], [`check_translation`]:
//!   the composite pipelines against the oracle or against each other.
//!
//! Failures are data: a [`CheckResult`] carries the first counterexample.

pub mod diagram;
pub mod mutation;
pub mod random;
mod step;
pub mod sweep;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::models::{Dfa, LabeledMc, MarkovRewardModel, Nfa, NonTerminatingMc, RewardMachine, WeightedMealy, WeightedTs};

pub use diagram::{check_diagram, DiagramError};
pub use mutation::{mutation_check, mutation_harness, run_mutation, MutationOutcome};
pub use step::{
    check_cost_bounded, check_cost_induced, check_reward_exact, check_step_equality, check_step_equality_with,
    check_translation, check_tropical_exact, translation_values,
};
pub use sweep::{instance_seed, step_equality_sweep, SweepConfig};

/// The six system/requirement combinations with a product construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pairing {
    McDfa,
    MrmDfa,
    NtmcDfa,
    /// MC against a reward machine composed with a cost-bound DFA.
    CostDfa,
    WtsNfa,
    WtsWmm,
}

impl Pairing {
    pub const ALL: [Pairing; 6] =
        [Pairing::McDfa, Pairing::MrmDfa, Pairing::NtmcDfa, Pairing::CostDfa, Pairing::WtsNfa, Pairing::WtsWmm];

    pub fn name(&self) -> &'static str {
        match self {
            Pairing::McDfa => "mc-dfa",
            Pairing::MrmDfa => "mrm-dfa",
            Pairing::NtmcDfa => "ntmc-dfa",
            Pairing::CostDfa => "costdfa",
            Pairing::WtsNfa => "wts-nfa",
            Pairing::WtsWmm => "wts-wmm",
        }
    }

    /// Whether the product satisfies the full correctness criterion, so
    /// that the one-step diagram can be checked. The never-terminating
    /// product is only correct up to its Kleene iterates.
    pub fn has_full_criterion(&self) -> bool {
        !matches!(self, Pairing::NtmcDfa)
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pairing {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pairing::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let known: Vec<&str> = Pairing::ALL.iter().map(Pairing::name).collect();
            format!("unknown pairing `{s}` (expected one of {})", known.join(", "))
        })
    }
}

/// A system and a requirement of matching kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    McDfa(LabeledMc, Dfa),
    MrmDfa(MarkovRewardModel, Dfa),
    NtmcDfa(NonTerminatingMc, Dfa),
    /// The requirement is `rm ⊗α costdfa(bound, rm.bound)`.
    CostDfa { chain: LabeledMc, rm: RewardMachine, bound: u64 },
    WtsNfa(WeightedTs, Nfa),
    WtsWmm(WeightedTs, WeightedMealy),
}

impl Instance {
    pub fn pairing(&self) -> Pairing {
        match self {
            Instance::McDfa(..) => Pairing::McDfa,
            Instance::MrmDfa(..) => Pairing::MrmDfa,
            Instance::NtmcDfa(..) => Pairing::NtmcDfa,
            Instance::CostDfa { .. } => Pairing::CostDfa,
            Instance::WtsNfa(..) => Pairing::WtsNfa,
            Instance::WtsWmm(..) => Pairing::WtsWmm,
        }
    }
}

/// Size limits for random instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceLimits {
    pub system_states: usize,
    pub requirement_states: usize,
    pub alphabet: usize,
    /// Largest cost bound `N` and weight alphabet `M` for the cost pairing.
    pub cost_bound: u64,
    pub cost_weights: u64,
}

impl Default for InstanceLimits {
    fn default() -> Self {
        InstanceLimits { system_states: 6, requirement_states: 4, alphabet: 3, cost_bound: 6, cost_weights: 3 }
    }
}

/// A random instance of the given pairing; sizes are uniform up to the
/// limits.
pub fn random_instance<R: Rng>(pairing: Pairing, rng: &mut R, limits: &InstanceLimits) -> Instance {
    let a = random::alphabet(rng.gen_range(1..=limits.alphabet));
    let nx = rng.gen_range(1..=limits.system_states);
    let ny = rng.gen_range(1..=limits.requirement_states);
    match pairing {
        Pairing::McDfa => Instance::McDfa(random::mc(rng, &a, nx), random::dfa(rng, &a, ny)),
        Pairing::MrmDfa => {
            let chain = random::mc(rng, &a, nx);
            Instance::MrmDfa(random::rewards(rng, chain), random::dfa(rng, &a, ny))
        }
        Pairing::NtmcDfa => Instance::NtmcDfa(random::ntmc(rng, &a, nx), random::dfa(rng, &a, ny)),
        Pairing::CostDfa => {
            let m = rng.gen_range(1..=limits.cost_weights);
            let bound = rng.gen_range(1..=limits.cost_bound);
            Instance::CostDfa { chain: random::mc(rng, &a, nx), rm: random::reward_machine(rng, &a, ny, m), bound }
        }
        Pairing::WtsNfa => Instance::WtsNfa(random::wts(rng, &a, nx), random::nfa(rng, &a, ny)),
        Pairing::WtsWmm => Instance::WtsWmm(random::wts(rng, &a, nx), random::wmm(rng, &a, ny)),
    }
}

/// Where and how a check failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// Which models were compared (instance number, fixture names, sample).
    pub models: String,
    /// Product state (or sample position) at which the sides differ.
    pub state: String,
    /// Iteration depth; `None` for checks that are not step-indexed.
    pub step: Option<usize>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Number of individual value comparisons made.
    pub comparisons: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl CheckResult {
    pub fn pass(name: impl Into<String>, comparisons: usize) -> Self {
        CheckResult { name: name.into(), passed: true, comparisons, counterexample: None }
    }

    pub fn fail(name: impl Into<String>, comparisons: usize, cx: Counterexample) -> Self {
        CheckResult { name: name.into(), passed: false, comparisons, counterexample: Some(cx) }
    }

    /// Merges results in order: passes iff all pass, keeping the first
    /// counterexample.
    pub fn all(name: impl Into<String>, results: impl IntoIterator<Item = CheckResult>) -> CheckResult {
        let mut comparisons = 0;
        let mut first = None;
        for r in results {
            comparisons += r.comparisons;
            if first.is_none() {
                first = r.counterexample;
            }
        }
        CheckResult { name: name.into(), passed: first.is_none(), comparisons, counterexample: first }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("check results serialize")
    }
}

/// `{"passed": bool, "checks": [...]}`.
pub fn report_json(results: &[CheckResult]) -> Value {
    json!({
        "passed": results.iter().all(|r| r.passed),
        "checks": results.iter().map(CheckResult::to_json).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_names_round_trip() {
        for p in Pairing::ALL {
            assert_eq!(p.name().parse::<Pairing>(), Ok(p));
        }
        assert!("mc-nfa".parse::<Pairing>().is_err());
    }

    #[test]
    fn merged_result_keeps_first_failure() {
        let cx = |s: &str| Counterexample {
            models: s.into(),
            state: "x".into(),
            step: Some(1),
            lhs: "0".into(),
            rhs: "1".into(),
        };
        let r = CheckResult::all(
            "m",
            [CheckResult::pass("a", 2), CheckResult::fail("b", 1, cx("first")), CheckResult::fail("c", 1, cx("second"))],
        );
        assert!(!r.passed);
        assert_eq!(r.comparisons, 4);
        assert_eq!(r.counterexample.unwrap().models, "first");
    }
}
