//! `product`, `infer` and `oracle`: the product pipeline and the direct
//! semantics on the same inputs.

use anyhow::{bail, Result};
use coprod_core::frontend::json::{emit_product_absorbing, emit_product_mc, emit_product_mrm, emit_product_wts};
use coprod_core::lawcheck::{Instance, Pairing};
use coprod_core::models::{make_cost_bound_dfa, product_rm_costdfa, Dfa, LabeledMc, Model, RewardMachine};
use coprod_core::oracle::{
    dfa_language, mc_semantics, mrm_semantics, nfa_language, ntmc_marginal, query_cond, query_cost_bounded,
    query_cost_induced, query_prob, query_reward, query_safety, query_tropical, query_wmm, rm_semantics,
    wmm_semantics_on, wts_semantics, Trace,
};
use coprod_core::products::{
    product_mc_dfa_with, product_mrm_dfa_with, product_ntmc_dfa_with, product_wts_nfa_with, product_wts_wmm_with,
    ProductOptions, ProductSpace,
};
use coprod_core::solvers::{
    solve_partial_expected_reward, solve_reach_prob, solve_tropical, Mode, RenderValue, SolveReport, TropicalMode,
};
use serde_json::{json, Value};

use crate::input::Requirement;
use crate::output::Output;

fn options(all_pairs: bool) -> ProductOptions {
    ProductOptions { reachable_only: !all_pairs, mutation: None }
}

/// `rm ⊗α costdfa(bound)`.
fn cost_requirement(rm: &RewardMachine, bound: u64) -> Result<Dfa> {
    Ok(product_rm_costdfa(rm, &make_cost_bound_dfa(bound, rm.bound)?)?)
}

pub fn product(out: &mut Output, inst: &Instance, all_pairs: bool) -> Result<()> {
    let opts = options(all_pairs);
    let doc = match inst {
        Instance::McDfa(c, d) => emit_product_mc(&product_mc_dfa_with(c, d, opts)?),
        Instance::MrmDfa(c, d) => emit_product_mrm(&product_mrm_dfa_with(c, d, opts)?),
        Instance::NtmcDfa(c, d) => emit_product_absorbing(&product_ntmc_dfa_with(c, d, opts)?),
        Instance::CostDfa { chain, rm, bound } => {
            emit_product_mc(&product_mc_dfa_with(chain, &cost_requirement(rm, *bound)?, opts)?)
        }
        Instance::WtsNfa(c, d) => emit_product_wts(&product_wts_nfa_with(c, d, opts)?),
        Instance::WtsWmm(c, d) => emit_product_wts(&product_wts_wmm_with(c, d, opts)?),
    };
    if out.json() {
        return out.value(&doc);
    }
    out.line(format!("{} with {} states, initial {}", doc["kind"].as_str().unwrap_or("product"), doc["states"].as_array().map_or(0, Vec::len), doc["initial"].as_str().unwrap_or("?")))?;
    if let Some(reward) = doc["reward"].as_object() {
        for (s, r) in reward {
            out.line(format!("reward {s} = {r}"))?;
        }
    }
    let Some(trans) = doc["trans"].as_object() else { return Ok(()) };
    for (s, row) in trans {
        match row {
            Value::Object(row) => {
                for (t, p) in row {
                    out.line(format!("{s} -> {t} @ {}", p.as_str().unwrap_or_default()))?;
                }
            }
            Value::Array(edges) => {
                for e in edges {
                    out.line(format!("{s} -> {} @ {}", e[0].as_str().unwrap_or_default(), e[1]))?;
                }
            }
            _ => {}
        }
    }
    Ok(())
}

pub struct InferArgs {
    pub mode: Option<String>,
    pub all_pairs: bool,
    pub vector: bool,
}

fn print_report<D: RenderValue>(out: &mut Output, pairing: Pairing, space: &ProductSpace, rep: &SolveReport<D>, vector: bool) -> Result<()> {
    let value = &rep.values[space.initial];
    if out.json() {
        let mut doc = json!({
            "pairing": pairing.name(),
            "initial": space.names[space.initial],
            "states": space.len(),
            "value": out.to_json(value),
        });
        let solve = rep.to_json(&space.names, out.decimal);
        for key in ["method", "iterations", "converged"] {
            doc[key] = solve[key].clone();
        }
        if vector {
            doc["values"] = solve["values"].clone();
        }
        return out.value(&doc);
    }
    out.line(out.render(value))?;
    if vector {
        for (name, v) in space.names.iter().zip(rep.values.iter()) {
            let line = format!("{name} {}", out.render(v));
            out.line(line)?;
        }
    }
    Ok(())
}

fn prob_mode(mode: &Option<String>) -> Result<Mode> {
    Ok(mode.as_deref().unwrap_or("exact").parse()?)
}

fn tropical_mode(mode: &Option<String>) -> Result<TropicalMode> {
    Ok(mode.as_deref().unwrap_or("bellman").parse()?)
}

pub fn infer(out: &mut Output, inst: &Instance, args: &InferArgs) -> Result<()> {
    let opts = options(args.all_pairs);
    let pairing = inst.pairing();
    match inst {
        Instance::McDfa(c, d) => {
            let p = product_mc_dfa_with(c, d, opts)?;
            print_report(out, pairing, &p.space, &solve_reach_prob(&p, &prob_mode(&args.mode)?), args.vector)
        }
        Instance::MrmDfa(c, d) => {
            let p = product_mrm_dfa_with(c, d, opts)?;
            let rep = solve_partial_expected_reward(&p, &prob_mode(&args.mode)?);
            print_report(out, pairing, &p.space, &rep, args.vector)
        }
        Instance::NtmcDfa(c, d) => {
            let p = product_ntmc_dfa_with(c, d, opts)?;
            print_report(out, pairing, &p.space, &solve_reach_prob(&p, &prob_mode(&args.mode)?), args.vector)
        }
        Instance::CostDfa { chain, rm, bound } => {
            let p = product_mc_dfa_with(chain, &cost_requirement(rm, *bound)?, opts)?;
            print_report(out, pairing, &p.space, &solve_reach_prob(&p, &prob_mode(&args.mode)?), args.vector)
        }
        Instance::WtsNfa(c, d) => {
            let p = product_wts_nfa_with(c, d, opts)?;
            print_report(out, pairing, &p.space, &solve_tropical(&p, tropical_mode(&args.mode)?), args.vector)
        }
        Instance::WtsWmm(c, d) => {
            let p = product_wts_wmm_with(c, d, opts)?;
            print_report(out, pairing, &p.space, &solve_tropical(&p, tropical_mode(&args.mode)?), args.vector)
        }
    }
}

fn print_value<D: RenderValue>(out: &mut Output, query: &str, depth: usize, v: &D) -> Result<()> {
    if out.json() {
        let doc = json!({ "query": query, "depth": depth, "value": out.to_json(v) });
        return out.value(&doc);
    }
    out.line(out.render(v))
}

fn trace_entries(entries: Vec<(String, Value, String)>, kind: &str, depth: usize) -> Value {
    json!({
        "kind": kind,
        "depth": depth,
        "entries": entries.into_iter().map(|(t, v, _)| json!({ "trace": t, "value": v })).collect::<Vec<_>>(),
    })
}

/// Depth-`k` semantics of a system at its initial state: the trace
/// distribution (MC, MRM), the length-`k` marginal (never-terminating MC)
/// or the weighted trace set (WTS).
pub fn semantics(out: &mut Output, system: &Model, depth: usize) -> Result<()> {
    let a = system.alphabet().clone();
    let render = |w: &Trace| w.render(&a);
    // (trace, JSON value, text value)
    let (kind, entries): (&str, Vec<(String, Value, String)>) = match system {
        Model::Mc(c) => {
            let nu = mc_semantics(c, c.initial, depth);
            let e = nu.sorted().into_iter().map(|(w, p)| (render(w), out.to_json(p), out.render(p))).collect();
            ("trace-distribution", e)
        }
        Model::Mrm(m) => {
            let nu = mrm_semantics(m, m.chain.initial, depth);
            let mut e: Vec<_> = nu.iter().collect();
            e.sort_by(|a, b| (a.0 .0.len(), &a.0 .0, a.0 .1).cmp(&(b.0 .0.len(), &b.0 .0, b.0 .1)));
            let e = e
                .into_iter()
                .map(|((w, n), p)| {
                    (render(w), json!({ "reward": n, "prob": out.to_json(p) }), format!("reward {n} {}", out.render(p)))
                })
                .collect();
            ("trace-reward-distribution", e)
        }
        Model::Ntmc(c) => {
            let nu = ntmc_marginal(c, c.initial, depth);
            let e = nu.sorted().into_iter().map(|(w, p)| (render(w), out.to_json(p), out.render(p))).collect();
            ("prefix-marginal", e)
        }
        Model::Wts(c) => {
            let t = wts_semantics(c, c.initial, depth);
            let e = t.sorted().into_iter().map(|(w, m)| (render(w), json!(m), m.to_string())).collect();
            ("weighted-traces", e)
        }
        other => bail!("`oracle` without a requirement needs a system model, got {}", other.kind()),
    };
    if out.json() {
        let doc = trace_entries(entries, kind, depth);
        return out.value(&doc);
    }
    for (w, _, v) in entries {
        out.line(format!("{w} {v}"))?;
    }
    Ok(())
}

fn cost_bounded_oracle(c: &LabeledMc, bound: u64, depth: usize) -> Result<coprod_core::Rational> {
    if bound == 0 {
        bail!("the cost bound must be at least 1");
    }
    if c.alphabet != coprod_core::models::Alphabet::weights(c.alphabet.len() as u64)? {
        bail!("cost-bounded reachability needs a system over the weights 1..M");
    }
    Ok(query_cost_bounded(&mc_semantics(c, c.initial, depth), bound))
}

/// The query on the depth-`k` semantics of both components at their
/// initial states.
pub fn oracle(out: &mut Output, inst: &Instance, req: &RequirementKind, depth: usize, condition: Option<&Dfa>) -> Result<()> {
    if condition.is_some() && !matches!(inst, Instance::McDfa(..)) {
        bail!("--condition applies to mc-dfa only");
    }
    match inst {
        Instance::McDfa(c, d) => {
            if let RequirementKind::CostBound(n) = req {
                return print_value(out, "cost-bounded", depth, &cost_bounded_oracle(c, *n, depth)?);
            }
            let nu = mc_semantics(c, c.initial, depth);
            let lang = dfa_language(d, d.initial, depth);
            match condition {
                None => print_value(out, "prob", depth, &query_prob(&nu, &lang)),
                Some(cd) => {
                    if cd.alphabet != c.alphabet {
                        bail!("alphabet mismatch between the system and the condition");
                    }
                    let cond = dfa_language(cd, cd.initial, depth);
                    match query_cond(&nu, &lang, &cond) {
                        Some(v) => print_value(out, "cond", depth, &v),
                        None if out.json() => {
                            out.value(&json!({ "query": "cond", "depth": depth, "value": Value::Null }))
                        }
                        None => out.line("undefined (condition has probability 0)"),
                    }
                }
            }
        }
        Instance::MrmDfa(m, d) => {
            let nu = mrm_semantics(m, m.chain.initial, depth);
            print_value(out, "reward", depth, &query_reward(&nu, &dfa_language(d, d.initial, depth)))
        }
        Instance::NtmcDfa(c, d) => print_value(out, "safety", depth, &query_safety(c, c.initial, d, d.initial, depth)),
        Instance::CostDfa { chain, rm, bound } => {
            let nu = mc_semantics(chain, chain.initial, depth);
            let f = rm_semantics(rm, rm.initial, depth);
            print_value(out, "cost-induced", depth, &query_cost_induced(&nu, &f, *bound))
        }
        Instance::WtsNfa(c, d) => {
            let t = wts_semantics(c, c.initial, depth);
            print_value(out, "tropical", depth, &query_tropical(&t, &nfa_language(d, d.initial, depth)))
        }
        Instance::WtsWmm(c, d) => {
            let t = wts_semantics(c, c.initial, depth);
            // The query only reads traces of the system.
            let l = wmm_semantics_on(d, d.initial, t.iter().map(|(w, _)| w));
            print_value(out, "wmm", depth, &query_wmm(&t, &l))
        }
    }
}

/// What the requirement argument was, after the instance consumed it.
pub enum RequirementKind {
    Model,
    CostBound(u64),
}

impl From<&Requirement> for RequirementKind {
    fn from(r: &Requirement) -> Self {
        match r {
            Requirement::Model(_) => RequirementKind::Model,
            Requirement::CostBound(n) => RequirementKind::CostBound(*n),
        }
    }
}
