//! Resolving command-line model arguments: a path to a `.json` model or a
//! `.qtp` program, or the name of an embedded fixture.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use coprod_core::fixtures;
use coprod_core::frontend::program::BExpr;
use coprod_core::frontend::{
    compile_probabilistic, compile_weighted, parse_model, parse_program, CompileOptions, CompileReport, ProbMode,
    ProgramMode,
};
use coprod_core::lawcheck::{Instance, Pairing};
use coprod_core::models::{validate, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CompileMode {
    Terminating,
    Reactive,
    Weighted,
}

/// Source text of `arg` and whether it is a program.
fn source(arg: &str) -> Result<(String, bool)> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read `{arg}`"))?;
        let is_program = path.extension().is_some_and(|e| e == "qtp");
        return Ok((text, is_program));
    }
    match fixtures::source(arg) {
        Some(text) => Ok((text.to_string(), fixtures::PROGRAM_NAMES.contains(&arg))),
        None => bail!("no such file or fixture `{arg}`"),
    }
}

/// Weighted programs compile to a WTS; a loop guard of `true` means a
/// reactive program; anything else terminates.
fn default_mode(mode: ProgramMode, guard: &BExpr) -> CompileMode {
    match (mode, guard) {
        (ProgramMode::Weighted, _) => CompileMode::Weighted,
        (_, BExpr::Const(true)) => CompileMode::Reactive,
        _ => CompileMode::Terminating,
    }
}

pub fn compile(arg: &str, mode: Option<CompileMode>, all_states: bool) -> Result<CompileReport> {
    let (text, _) = source(arg)?;
    let program = parse_program(&text).map_err(|e| anyhow!("{arg}:{e}"))?;
    let opts = CompileOptions { restrict_reachable: !all_states };
    let report = match mode.unwrap_or_else(|| default_mode(program.mode, &program.guard)) {
        CompileMode::Terminating => compile_probabilistic(&program, ProbMode::Terminating, opts),
        CompileMode::Reactive => compile_probabilistic(&program, ProbMode::Reactive, opts),
        CompileMode::Weighted => compile_weighted(&program, opts),
    };
    report.with_context(|| format!("cannot compile `{arg}`"))
}

/// Parses (or compiles) `arg` without validating it.
pub fn parse(arg: &str) -> Result<Model> {
    let (text, is_program) = source(arg)?;
    if is_program {
        return Ok(compile(arg, None, false)?.model);
    }
    parse_model(&text).with_context(|| format!("cannot load model `{arg}`"))
}

pub fn violations_message(arg: &str, violations: &[coprod_core::models::Violation]) -> String {
    let lines: Vec<String> = violations.iter().map(|v| format!("  - {v}")).collect();
    format!("model `{arg}` is invalid:\n{}", lines.join("\n"))
}

/// Parses and validates `arg`.
pub fn load(arg: &str) -> Result<Model> {
    let model = parse(arg)?;
    if let Err(v) = validate(&model) {
        bail!(violations_message(arg, &v));
    }
    Ok(model)
}

/// The requirement argument: a model, or `costdfa:N` for the cost-bound
/// DFA over the system's weight alphabet.
pub enum Requirement {
    Model(Model),
    CostBound(u64),
}

pub fn load_requirement(arg: &str) -> Result<Requirement> {
    if let Some(n) = arg.strip_prefix("costdfa:") {
        let n: u64 = n.parse().map_err(|_| anyhow!("bad cost bound in `{arg}`"))?;
        return Ok(Requirement::CostBound(n));
    }
    load(arg).map(Requirement::Model)
}

/// Pairs a system with a requirement, checking the kinds against the
/// requested pairing if one is given. A DFA against a WTS is read as an
/// NFA; `costdfa:N` against an MC builds the cost-bound DFA.
pub fn instance(system: Model, req: Requirement, pairing: Option<Pairing>, bound: Option<u64>) -> Result<Instance> {
    let kinds = format!(
        "{} × {}",
        system.kind(),
        match &req {
            Requirement::Model(m) => m.kind().to_string(),
            Requirement::CostBound(n) => format!("costdfa:{n}"),
        }
    );
    let inst = match (system, req) {
        (Model::Mc(c), Requirement::Model(Model::Dfa(d))) => Instance::McDfa(c, d),
        (Model::Mc(c), Requirement::CostBound(n)) => {
            let m = c.alphabet.len() as u64;
            Instance::McDfa(c, coprod_core::models::make_cost_bound_dfa(n, m)?)
        }
        (Model::Mrm(c), Requirement::Model(Model::Dfa(d))) => Instance::MrmDfa(c, d),
        (Model::Ntmc(c), Requirement::Model(Model::Dfa(d))) => Instance::NtmcDfa(c, d),
        (Model::Mc(chain), Requirement::Model(Model::Rm(rm))) => {
            let bound = bound.ok_or_else(|| anyhow!("mc × rm needs a cost bound (--bound N)"))?;
            if bound == 0 {
                bail!("the cost bound must be at least 1");
            }
            Instance::CostDfa { chain, rm, bound }
        }
        (Model::Wts(c), Requirement::Model(Model::Nfa(d))) => Instance::WtsNfa(c, d),
        (Model::Wts(c), Requirement::Model(Model::Dfa(d))) => Instance::WtsNfa(c, d.to_nfa()),
        (Model::Wts(c), Requirement::Model(Model::Wmm(d))) => Instance::WtsWmm(c, d),
        _ => bail!("no product construction for {kinds}"),
    };
    if let Some(p) = pairing {
        if p != inst.pairing() {
            bail!("pairing {p} does not apply to {kinds} (expected {})", inst.pairing());
        }
    }
    Ok(inst)
}
