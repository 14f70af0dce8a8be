//! `lawcheck`: the seeded correctness sweeps, the diagram check and the
//! mutation harness, merged into one report.

use anyhow::{bail, Result};
use coprod_core::lawcheck::diagram::check_diagram_with;
use coprod_core::lawcheck::mutation::fixture_instance;
use coprod_core::lawcheck::sweep::{
    cost_bounded_sweep, cost_induced_sweep, reward_sweep, step_equality_sweep, translation_sweep, tropical_sweep,
    SweepConfig,
};
use coprod_core::lawcheck::{report_json, run_mutation, CheckResult, Counterexample, Pairing};
use coprod_core::products::Mutation;
use serde_json::json;

use crate::output::Output;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CheckKind {
    All,
    Step,
    Diagram,
    Composite,
    Mutations,
}

pub struct LawcheckArgs {
    /// `None` for every pairing.
    pub pairing: Option<Pairing>,
    pub check: CheckKind,
    pub config: SweepConfig,
    pub samples: usize,
    pub mutation: Option<Mutation>,
    pub max_product_states: usize,
}

fn wants(args: &LawcheckArgs, kind: CheckKind) -> bool {
    args.check == CheckKind::All || args.check == kind
}

fn mutation_result(m: Mutation, kmax: usize) -> CheckResult {
    let o = run_mutation(m, kmax);
    let name = format!("mutation/{}", o.mutation);
    if o.ok() {
        return CheckResult::pass(name, 1);
    }
    let cx = Counterexample {
        models: o.instance.to_string(),
        state: o.mutation.to_string(),
        step: None,
        lhs: format!("baseline passed: {}", o.baseline_passed),
        rhs: format!("mutation detected: {}", o.detected),
    };
    CheckResult::fail(name, 1, cx)
}

pub fn run(args: &LawcheckArgs) -> Result<Vec<CheckResult>> {
    let pairings: Vec<Pairing> = args.pairing.map_or_else(|| Pairing::ALL.to_vec(), |p| vec![p]);
    let cfg = &args.config;
    let mut results = Vec::new();
    if wants(args, CheckKind::Step) {
        for &p in &pairings {
            results.push(step_equality_sweep(p, cfg, args.mutation));
        }
    }
    if wants(args, CheckKind::Diagram) {
        for &p in &pairings {
            if !p.has_full_criterion() {
                // Asked for by name: refuse. Part of a larger run: skip.
                if args.check == CheckKind::Diagram && args.pairing.is_some() {
                    bail!(coprod_core::lawcheck::DiagramError::WeakerCriterionOnly(p));
                }
                continue;
            }
            results.push(check_diagram_with(p, args.samples, cfg.seed, args.mutation)?);
        }
    }
    if wants(args, CheckKind::Composite) {
        let has = |p: Pairing| pairings.contains(&p);
        if has(Pairing::McDfa) {
            results.push(translation_sweep(cfg));
        }
        if has(Pairing::MrmDfa) {
            results.push(reward_sweep(cfg));
        }
        if has(Pairing::CostDfa) {
            results.push(cost_bounded_sweep(cfg));
            results.push(cost_induced_sweep(cfg));
        }
        if has(Pairing::WtsNfa) || has(Pairing::WtsWmm) {
            results.push(tropical_sweep(cfg, args.max_product_states));
        }
    }
    if wants(args, CheckKind::Mutations) {
        for m in Mutation::ALL {
            if pairings.contains(&fixture_instance(m).1.pairing()) {
                results.push(mutation_result(m, cfg.kmax));
            }
        }
    }
    Ok(results)
}

pub fn print(out: &mut Output, args: &LawcheckArgs, results: &[CheckResult]) -> Result<()> {
    let passed = results.iter().all(|r| r.passed);
    if out.json() {
        let mut doc = report_json(results);
        doc["seed"] = json!(args.config.seed);
        doc["instances"] = json!(args.config.instances);
        doc["kmax"] = json!(args.config.kmax);
        if let Some(m) = args.mutation {
            doc["mutation"] = json!(m.name());
        }
        return out.value(&doc);
    }
    for r in results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        out.line(format!("{status} {} ({} comparisons)", r.name, r.comparisons))?;
        if let Some(cx) = &r.counterexample {
            let step = cx.step.map_or(String::new(), |k| format!(" at step {k}"));
            out.line(format!("  {} state {}{step}: {} ≠ {}", cx.models, cx.state, cx.lhs, cx.rhs))?;
        }
    }
    out.line(if passed { "all checks passed" } else { "some checks FAILED" })
}
