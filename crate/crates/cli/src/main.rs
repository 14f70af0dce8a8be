//! `coprod`: compile, validate, build products, infer and cross-check.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or validation error.

mod infer;
mod input;
mod lawcheck;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use coprod_core::frontend::emit_model_value;
use coprod_core::lawcheck::sweep::SweepConfig;
use coprod_core::lawcheck::{InstanceLimits, Pairing};
use coprod_core::models::{validate, Model};
use coprod_core::products::Mutation;
use serde_json::json;

use input::CompileMode;
use output::{Format, Output};

#[derive(Parser)]
#[command(name = "coprod", version, about = "Inference on products of systems and requirements")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Render rationals as decimals with this many digits.
    #[arg(long, global = true, value_name = "DIGITS")]
    decimal: Option<usize>,
    /// Write the output to a file instead of stdout.
    #[arg(short, long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file (or fixture) against its invariants.
    Validate { model: String },
    /// Compile a `.qtp` program to a model.
    Compile {
        program: String,
        /// Defaults to weighted for weighted programs, reactive for
        /// `while (true)` loops and terminating otherwise.
        #[arg(long, value_enum)]
        mode: Option<CompileMode>,
        /// Keep unreachable valuations.
        #[arg(long)]
        all_states: bool,
    },
    /// Build the product of a system and a requirement.
    Product {
        system: String,
        requirement: String,
        pairing: Option<Pairing>,
        /// Cost bound N for a reward-machine requirement.
        #[arg(long)]
        bound: Option<u64>,
        /// Keep pairs unreachable from the initial pair.
        #[arg(long)]
        all_pairs: bool,
    },
    /// Solve the product at its initial state.
    Infer {
        system: String,
        /// A model, or `costdfa:N` for the cost-bound DFA.
        requirement: String,
        pairing: Option<Pairing>,
        /// exact | iterate:K | epsilon:E, or bellman | iterate:K for
        /// weighted pairings.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long)]
        all_pairs: bool,
        /// Print the value at every product state.
        #[arg(long)]
        vector: bool,
    },
    /// Evaluate the query on the depth-bounded semantics; with no
    /// requirement, print the semantics of the system.
    Oracle {
        system: String,
        requirement: Option<String>,
        pairing: Option<Pairing>,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        bound: Option<u64>,
        /// Condition DFA for the conditional query.
        #[arg(long)]
        condition: Option<String>,
    },
    /// Run the seeded law checks.
    Lawcheck {
        /// A pairing name or `all`.
        target: String,
        #[arg(long, env = "COPROD_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 10)]
        kmax: usize,
        /// Samples for the diagram check.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = lawcheck::CheckKind::All)]
        check: lawcheck::CheckKind,
        /// Evaluate the laws under a single-edit fault (debugging).
        #[arg(long, value_name = "MUTATION")]
        mutate: Option<String>,
        /// Run instances in a worker pool; the report is identical.
        #[arg(long)]
        parallel: bool,
        /// Product-size cap for the tropical sweep.
        #[arg(long, default_value_t = 8)]
        max_product_states: usize,
    },
}

/// Outcome of a subcommand that ran to completion.
enum Status {
    Ok,
    CheckFailed,
}

fn run(cli: Cli) -> Result<Status> {
    let mut out = Output::new(cli.format, cli.decimal, cli.output.as_deref())?;
    let status = match cli.command {
        Command::Validate { model } => {
            let m = input::parse(&model)?;
            if let Err(v) = validate(&m) {
                if out.json() {
                    let list: Vec<String> = v.iter().map(ToString::to_string).collect();
                    out.value(&json!({ "valid": false, "kind": m.kind(), "violations": list }))?;
                    out.finish()?;
                }
                bail!(input::violations_message(&model, &v));
            }
            if out.json() {
                out.value(&json!({ "valid": true, "kind": m.kind(), "states": m.states().len() }))?;
            } else {
                out.line(format!("valid {} with {} states", m.kind(), m.states().len()))?;
            }
            Status::Ok
        }
        Command::Compile { program, mode, all_states } => {
            let report = input::compile(&program, mode, all_states)?;
            let model = emit_model_value(&report.model);
            if out.json() {
                out.value(&json!({
                    "model": model,
                    "report": {
                        "kind": report.model.kind(),
                        "state_count": report.state_count,
                        "reachable_count": report.reachable_count,
                        "warnings": report.warnings,
                    },
                }))?;
            } else {
                out.value(&model)?;
                eprintln!(
                    "compiled {} with {} states ({} declared valuations)",
                    report.model.kind(),
                    report.model.states().len(),
                    report.state_count
                );
                for w in &report.warnings {
                    eprintln!("warning: {w}");
                }
            }
            Status::Ok
        }
        Command::Product { system, requirement, pairing, bound, all_pairs } => {
            let inst = input::instance(input::load(&system)?, input::load_requirement(&requirement)?, pairing, bound)?;
            infer::product(&mut out, &inst, all_pairs)?;
            Status::Ok
        }
        Command::Infer { system, requirement, pairing, mode, bound, all_pairs, vector } => {
            let inst = input::instance(input::load(&system)?, input::load_requirement(&requirement)?, pairing, bound)?;
            infer::infer(&mut out, &inst, &infer::InferArgs { mode, all_pairs, vector })?;
            Status::Ok
        }
        Command::Oracle { system, requirement, pairing, depth, bound, condition } => {
            let sys = input::load(&system)?;
            match requirement {
                None => {
                    if condition.is_some() || pairing.is_some() {
                        bail!("--condition and a pairing need a requirement");
                    }
                    infer::semantics(&mut out, &sys, depth)?;
                }
                Some(r) => {
                    let req = input::load_requirement(&r)?;
                    let kind = infer::RequirementKind::from(&req);
                    let cond = match condition {
                        None => None,
                        Some(c) => match input::load(&c)? {
                            Model::Dfa(d) => Some(d),
                            other => bail!("the condition must be a DFA, got {}", other.kind()),
                        },
                    };
                    let inst = input::instance(sys, req, pairing, bound)?;
                    infer::oracle(&mut out, &inst, &kind, depth, cond.as_ref())?;
                }
            }
            Status::Ok
        }
        Command::Lawcheck { target, seed, instances, kmax, samples, check, mutate, parallel, max_product_states } => {
            let pairing = if target == "all" { None } else { Some(target.parse::<Pairing>().map_err(anyhow::Error::msg)?) };
            let mutation = match mutate {
                None => None,
                Some(name) => Some(Mutation::from_name(&name).ok_or_else(|| {
                    let known: Vec<&str> = Mutation::ALL.iter().map(Mutation::name).collect();
                    anyhow::anyhow!("unknown mutation `{name}` (expected one of {})", known.join(", "))
                })?),
            };
            let args = lawcheck::LawcheckArgs {
                pairing,
                check,
                config: SweepConfig { seed, instances, kmax, limits: InstanceLimits::default(), parallel },
                samples,
                mutation,
                max_product_states,
            };
            let results = lawcheck::run(&args)?;
            lawcheck::print(&mut out, &args, &results)?;
            if results.iter().all(|r| r.passed) {
                Status::Ok
            } else {
                Status::CheckFailed
            }
        }
    };
    out.finish()?;
    Ok(status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::CheckFailed) => ExitCode::from(1),
        // A closed downstream pipe (`| head`) is not a failure of the command.
        Err(e)
            if e.chain().any(|c| {
                c.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            }) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
