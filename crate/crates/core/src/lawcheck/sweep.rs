//! Seeded sweeps of the checks over random instances. Instance `i` of a
//! sweep is generated from its own seed, so any failure is reproducible
//! alone; with `parallel`, instances run in the rayon pool and results are
//! merged in instance order.

use rand::Rng;
use rayon::prelude::*;

use super::{
    check_cost_bounded, check_cost_induced, check_reward_exact, check_step_equality_with, check_translation,
    check_tropical_exact, random, random_instance, CheckResult, Instance, InstanceLimits, Pairing,
};
use crate::models::Alphabet;
use crate::products::{product_wts_nfa_with, product_wts_wmm_with, Mutation, ProdSucc, ProductOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepConfig {
    pub seed: u64,
    pub instances: usize,
    pub kmax: usize,
    pub limits: InstanceLimits,
    pub parallel: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { seed: 0, instances: 100, kmax: 10, limits: InstanceLimits::default(), parallel: false }
    }
}

/// Seed of instance `i` of sweep `tag` started from `seed`.
pub fn instance_seed(seed: u64, tag: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(tag << 32).wrapping_add(i as u64)
}

fn pairing_tag(p: Pairing) -> u64 {
    Pairing::ALL.iter().position(|q| *q == p).expect("listed") as u64
}

// Tags of the composite sweeps, after the six pairings.
const TAG_COST_BOUNDED: u64 = 16;
const TAG_COST_INDUCED: u64 = 17;
const TAG_TRANSLATION: u64 = 18;
const TAG_REWARD: u64 = 19;
const TAG_TROPICAL: u64 = 20;

fn run_sweep(
    name: String,
    cfg: &SweepConfig,
    tag: u64,
    label: &str,
    check: impl Fn(&mut random::Rng8) -> CheckResult + Sync,
) -> CheckResult {
    let run = |i: usize| {
        let mut rng = random::rng(instance_seed(cfg.seed, tag, i));
        let mut r = check(&mut rng);
        if let Some(cx) = &mut r.counterexample {
            cx.models = format!("{label} instance {i} (seed {})", cfg.seed);
        }
        r
    };
    let results: Vec<CheckResult> = if cfg.parallel {
        (0..cfg.instances).into_par_iter().map(run).collect()
    } else {
        (0..cfg.instances).map(run).collect()
    };
    CheckResult::all(name, results)
}

/// [`check_step_equality_with`] on random instances of `pairing`. A
/// mutation only affects the laws it targets; others pass through.
pub fn step_equality_sweep(pairing: Pairing, cfg: &SweepConfig, mutation: Option<Mutation>) -> CheckResult {
    run_sweep(format!("step-equality/{pairing}"), cfg, pairing_tag(pairing), pairing.name(), |rng| {
        let inst = random_instance(pairing, rng, &cfg.limits);
        check_step_equality_with(&inst, cfg.kmax, mutation)
    })
}

/// MCs over `[M]` against cost-bound DFAs, `M ≤ cost_weights`,
/// `N ≤ cost_bound`.
pub fn cost_bounded_sweep(cfg: &SweepConfig) -> CheckResult {
    run_sweep("cost-bounded".into(), cfg, TAG_COST_BOUNDED, "cost-bounded", |rng| {
        let m = rng.gen_range(1..=cfg.limits.cost_weights);
        let n = rng.gen_range(1..=cfg.limits.cost_bound);
        let a = Alphabet::weights(m).expect("non-empty");
        let nx = rng.gen_range(1..=cfg.limits.system_states);
        let c = random::mc(rng, &a, nx);
        check_cost_bounded(&c, n, cfg.kmax)
    })
}

pub fn cost_induced_sweep(cfg: &SweepConfig) -> CheckResult {
    run_sweep("cost-induced".into(), cfg, TAG_COST_INDUCED, "cost-induced", |rng| {
        match random_instance(Pairing::CostDfa, rng, &cfg.limits) {
            Instance::CostDfa { chain, rm, bound } => check_cost_induced(&chain, &rm, bound, cfg.kmax),
            _ => unreachable!("cost pairing yields cost instances"),
        }
    })
}

pub fn translation_sweep(cfg: &SweepConfig) -> CheckResult {
    run_sweep("translation".into(), cfg, TAG_TRANSLATION, "translation", |rng| {
        match random_instance(Pairing::McDfa, rng, &cfg.limits) {
            Instance::McDfa(c, d) => check_translation(&c, &d),
            _ => unreachable!("mc-dfa pairing yields mc-dfa instances"),
        }
    })
}

/// Acyclic MRMs with at most `min(system_states, kmax)` states, so that the
/// oracle at depth `kmax` sees every path; step equality up to `kmax` and
/// exact equality at `kmax`.
pub fn reward_sweep(cfg: &SweepConfig) -> CheckResult {
    run_sweep("reward".into(), cfg, TAG_REWARD, "reward", |rng| {
        let a = random::alphabet(rng.gen_range(1..=cfg.limits.alphabet));
        let n = rng.gen_range(1..=cfg.limits.system_states.min(cfg.kmax.max(1)));
        let chain = random::acyclic_mc(rng, &a, n);
        let m = random::rewards(rng, chain);
        let ny = rng.gen_range(1..=cfg.limits.requirement_states);
        let d = random::dfa(rng, &a, ny);
        let steps = check_step_equality_with(&Instance::MrmDfa(m.clone(), d.clone()), cfg.kmax, None);
        CheckResult::all("reward", [steps, check_reward_exact(&m, &d, cfg.kmax)])
    })
}

/// Weighted instances whose full product has at most `max_states` states,
/// alternating WTS/NFA and WTS/WMM. Draws are repeated (up to 32 times)
/// until some product edge enters the accept sink, so that most instances
/// have finite values to compare.
pub fn tropical_instance<R: Rng>(rng: &mut R, i: usize, limits: &InstanceLimits, max_states: usize) -> Instance {
    let mut inst = draw_tropical(rng, i, limits, max_states);
    for _ in 0..32 {
        if accepts_somewhere(&inst) {
            break;
        }
        inst = draw_tropical(rng, i, limits, max_states);
    }
    inst
}

fn draw_tropical<R: Rng>(rng: &mut R, i: usize, limits: &InstanceLimits, max_states: usize) -> Instance {
    let a = random::alphabet(rng.gen_range(1..=limits.alphabet));
    let nx = rng.gen_range(1..=limits.system_states.min(max_states));
    let ny = rng.gen_range(1..=limits.requirement_states.min(max_states / nx).max(1));
    let c = random::wts(rng, &a, nx);
    if i % 2 == 0 {
        Instance::WtsNfa(c, random::nfa(rng, &a, ny))
    } else {
        Instance::WtsWmm(c, random::wmm(rng, &a, ny))
    }
}

fn accepts_somewhere(inst: &Instance) -> bool {
    let rows = match inst {
        Instance::WtsNfa(c, d) => product_wts_nfa_with(c, d, ProductOptions::full()).map(|p| p.rows),
        Instance::WtsWmm(c, d) => product_wts_wmm_with(c, d, ProductOptions::full()).map(|p| p.rows),
        _ => return true,
    };
    rows.is_ok_and(|rows| rows.iter().flatten().any(|(s, _)| *s == ProdSucc::Accept))
}

pub fn tropical_sweep(cfg: &SweepConfig, max_states: usize) -> CheckResult {
    // Instance numbers drive the alternation, so run the sweep by hand.
    let results: Vec<CheckResult> = (0..cfg.instances)
        .map(|i| {
            let mut rng = random::rng(instance_seed(cfg.seed, TAG_TROPICAL, i));
            let inst = tropical_instance(&mut rng, i, &cfg.limits, max_states);
            let mut r = check_tropical_exact(&inst);
            if let Some(cx) = &mut r.counterexample {
                cx.models = format!("tropical instance {i} (seed {})", cfg.seed);
            }
            r
        })
        .collect();
    CheckResult::all("tropical", results)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SweepConfig {
        SweepConfig { seed: 3, instances: 4, kmax: 5, ..SweepConfig::default() }
    }

    #[test]
    fn sweeps_are_schedule_independent() {
        for p in Pairing::ALL {
            let a = step_equality_sweep(p, &small(), None);
            let b = step_equality_sweep(p, &SweepConfig { parallel: true, ..small() }, None);
            assert_eq!(a, b);
            assert!(a.passed, "{a:?}");
        }
    }

    #[test]
    fn composite_sweeps_pass() {
        let cfg = small();
        for r in [cost_bounded_sweep(&cfg), cost_induced_sweep(&cfg), translation_sweep(&cfg), reward_sweep(&cfg)] {
            assert!(r.passed, "{r:?}");
        }
        assert!(tropical_sweep(&cfg, 8).passed);
    }

    #[test]
    fn mutation_is_caught_on_random_instances() {
        let cfg = SweepConfig { instances: 20, ..small() };
        assert!(!step_equality_sweep(Pairing::McDfa, &cfg, Some(Mutation::McDfaFlipFlag)).passed);
    }
}
