//! Mutation testing of the distributive laws: each shipped single-edit
//! fault must make the step-indexed check fail on a fixture instance whose
//! unmutated check passes.

use serde::Serialize;

use super::{check_step_equality_with, CheckResult, Counterexample, Instance};
use crate::fixtures;
use crate::products::Mutation;

/// Cost bound used for the reward-machine fixture.
pub const FIXTURE_COST_BOUND: u64 = 4;

/// The fixture instance exercising the law that `m` breaks, with a label.
pub fn fixture_instance(m: Mutation) -> (&'static str, Instance) {
    match m {
        Mutation::McDfaFlipFlag => ("fig4-mc × fig2-dfa", Instance::McDfa(fixtures::fig4_mc(), fixtures::fig2_dfa())),
        Mutation::MrmDfaDropReward => {
            ("fig4-mrm × fig2-dfa", Instance::MrmDfa(fixtures::fig4_mrm(), fixtures::fig2_dfa()))
        }
        Mutation::NtmcDfaNoAbsorb => {
            ("fig3-reactive × fig3-dfa", Instance::NtmcDfa(fixtures::fig3_ntmc(), fixtures::fig3_dfa()))
        }
        Mutation::CostAlphaForceAccept => (
            "fig4-mc × (fig4-rm ⊗α costdfa(4))",
            Instance::CostDfa { chain: fixtures::fig4_mc(), rm: fixtures::fig4_rm(), bound: FIXTURE_COST_BOUND },
        ),
        Mutation::WtsNfaDropWeight => {
            ("travel-wts × fig5-nfa", Instance::WtsNfa(fixtures::travel_wts(), fixtures::fig5_nfa()))
        }
        Mutation::WtsWmmDropPenalty => {
            ("travel-wts × travel-wmm", Instance::WtsWmm(fixtures::travel_wts(), fixtures::travel_wmm()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MutationOutcome {
    pub mutation: &'static str,
    pub instance: &'static str,
    /// The unmutated product passes the same check.
    pub baseline_passed: bool,
    pub detected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl MutationOutcome {
    pub fn ok(&self) -> bool {
        self.baseline_passed && self.detected
    }
}

pub fn run_mutation(m: Mutation, kmax: usize) -> MutationOutcome {
    let (label, inst) = fixture_instance(m);
    let baseline = check_step_equality_with(&inst, kmax, None);
    let mutated = check_step_equality_with(&inst, kmax, Some(m));
    MutationOutcome {
        mutation: m.name(),
        instance: label,
        baseline_passed: baseline.passed,
        detected: !mutated.passed,
        counterexample: mutated.counterexample.map(|mut cx| {
            cx.models = label.to_string();
            cx
        }),
    }
}

/// Every shipped mutation, in [`Mutation::ALL`] order.
pub fn mutation_harness(kmax: usize) -> Vec<MutationOutcome> {
    Mutation::ALL.into_iter().map(|m| run_mutation(m, kmax)).collect()
}

/// The harness as a single check: passes iff every mutation is detected
/// and every baseline passes.
pub fn mutation_check(kmax: usize) -> CheckResult {
    let outcomes = mutation_harness(kmax);
    let mut result = CheckResult::pass("mutations", outcomes.len());
    if let Some(bad) = outcomes.iter().find(|o| !o.ok()) {
        result = CheckResult::fail(
            "mutations",
            outcomes.len(),
            Counterexample {
                models: bad.instance.to_string(),
                state: bad.mutation.to_string(),
                step: None,
                lhs: format!("baseline passed: {}", bad.baseline_passed),
                rhs: format!("mutation detected: {}", bad.detected),
            },
        );
    }
    result
}
