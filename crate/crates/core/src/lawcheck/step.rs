//! Step-indexed equality of product iterates and oracle queries, and the
//! composite pipeline checks.

use std::fmt::Display;

use rustc_hash::FxHashMap;

use super::{CheckResult, Counterexample, Instance};
use crate::domains::{Domain, ExtNat, Rational, ValueVector};
use crate::models::{
    make_cost_bound_dfa, product_rm_costdfa_with, translate_to_nonterminating, Dfa, LabeledMc, MarkovRewardModel, ModelError,
    RewardMachine,
};
use crate::oracle::{
    cost_bounded_by_depth, cost_induced_by_depth, dfa_language_all, mc_semantics, mc_semantics_all, mrm_semantics_all,
    nfa_language, nfa_language_all, ntmc_marginals_all, partition, prob_by_depth, query_cost_bounded,
    query_cost_induced, query_reward, query_tropical, query_wmm, reward_by_depth, rm_semantics_on, safety_by_depth,
    tropical_by_depth, wmm_by_depth, wmm_semantics_on, wts_semantics, wts_semantics_all, TraceDist, WeightMap,
};
use crate::products::{
    product_mc_dfa, product_mc_dfa_with, product_mrm_dfa_with, product_ntmc_dfa, product_ntmc_dfa_with,
    product_wts_nfa_with, product_wts_wmm_with, Mutation, ProductOptions,
    ProductSpace, ProductWts,
};
use crate::solvers::{
    reach_step, reward_step, solve_partial_expected_reward, solve_reach_prob, solve_tropical, tropical_step, Mode,
    TropicalMode,
};

fn construction_failure(name: &str, models: &str, err: ModelError) -> CheckResult {
    CheckResult::fail(
        name,
        0,
        Counterexample {
            models: models.into(),
            state: "-".into(),
            step: None,
            lhs: format!("construction failed: {err}"),
            rhs: "-".into(),
        },
    )
}

/// Compares `Φᵏ(⊥)` with `oracle[pair][k]` for `k = 0..=kmax`.
fn compare_iterates<D: Domain + Display>(
    name: &str,
    space: &ProductSpace,
    oracle: &[Vec<D>],
    kmax: usize,
    step: impl Fn(&ValueVector<D>) -> ValueVector<D>,
) -> CheckResult {
    let mut cur = ValueVector::from_vec(vec![D::bottom(); space.len()]);
    let mut comparisons = 0;
    for k in 0..=kmax {
        if k > 0 {
            cur = step(&cur);
        }
        for (i, expected) in oracle.iter().enumerate() {
            comparisons += 1;
            if cur[i] != expected[k] {
                return CheckResult::fail(
                    name,
                    comparisons,
                    Counterexample {
                        models: String::new(),
                        state: space.names[i].clone(),
                        step: Some(k),
                        lhs: cur[i].to_string(),
                        rhs: expected[k].to_string(),
                    },
                );
            }
        }
    }
    CheckResult::pass(name, comparisons)
}

/// Remaining budget at cost-DFA state index `z`: state `i` (index `i − 1`)
/// accepts sums below `i`; the ⊥ state (index `bound`) accepts nothing.
fn budget(z: usize, bound: u64) -> u64 {
    if (z as u64) < bound {
        z as u64 + 1
    } else {
        0
    }
}

pub fn check_step_equality(inst: &Instance, kmax: usize) -> CheckResult {
    check_step_equality_with(inst, kmax, None)
}

/// As [`check_step_equality`], with the product built under an injected
/// law mutation; the oracle side is unaffected.
pub fn check_step_equality_with(inst: &Instance, kmax: usize, mutation: Option<Mutation>) -> CheckResult {
    let name = format!("step-equality/{}", inst.pairing());
    let opts = ProductOptions { mutation, ..ProductOptions::full() };
    let fail = |e| construction_failure(&name, inst.pairing().name(), e);
    match inst {
        Instance::McDfa(c, d) => {
            let p = match product_mc_dfa_with(c, d, opts) {
                Ok(p) => p,
                Err(e) => return fail(e),
            };
            let sem = mc_semantics_all(c, kmax);
            let lang = dfa_language_all(d, kmax);
            let oracle: Vec<_> = p.space.pairs.iter().map(|&(x, y)| prob_by_depth(&sem[x], &lang[y], kmax)).collect();
            compare_iterates(&name, &p.space, &oracle, kmax, |v| reach_step(&p.rows, v, false))
        }
        Instance::MrmDfa(c, d) => {
            let p = match product_mrm_dfa_with(c, d, opts) {
                Ok(p) => p,
                Err(e) => return fail(e),
            };
            let sem = mrm_semantics_all(c, kmax);
            let lang = dfa_language_all(d, kmax);
            let oracle: Vec<_> = p.space.pairs.iter().map(|&(x, y)| reward_by_depth(&sem[x], &lang[y], kmax)).collect();
            compare_iterates(&name, &p.space, &oracle, kmax, |v| reward_step(&p, v, false))
        }
        Instance::NtmcDfa(c, d) => {
            let p = match product_ntmc_dfa_with(c, d, opts) {
                Ok(p) => p,
                Err(e) => return fail(e),
            };
            let marginals = ntmc_marginals_all(c, kmax);
            let parts: Vec<_> = dfa_language_all(d, kmax).iter().map(|l| partition(l, kmax)).collect();
            let oracle: Vec<_> =
                p.space.pairs.iter().map(|&(x, y)| safety_by_depth(&marginals[x], &parts[y])).collect();
            compare_iterates(&name, &p.space, &oracle, kmax, |v| reach_step(&p.rows, v, false))
        }
        Instance::CostDfa { chain, rm, bound } => {
            let built = make_cost_bound_dfa(*bound, rm.bound)
                .and_then(|cd| product_rm_costdfa_with(rm, &cd, mutation))
                .and_then(|req| product_mc_dfa_with(chain, &req, opts).map(|p| (req, p)));
            let (req, p) = match built {
                Ok(b) => b,
                Err(e) => return fail(e),
            };
            let nz = req.len() / rm.len();
            let sem = mc_semantics_all(chain, kmax);
            let mut weights: FxHashMap<(usize, usize), WeightMap> = FxHashMap::default();
            let oracle: Vec<_> = p
                .space
                .pairs
                .iter()
                .map(|&(x, yz)| {
                    let (r, z) = (yz / nz, yz % nz);
                    let f = weights.entry((x, r)).or_insert_with(|| rm_semantics_on(rm, r, sem[x].iter().map(|(w, _)| w)));
                    cost_induced_by_depth(&sem[x], f, budget(z, *bound), kmax)
                })
                .collect();
            compare_iterates(&name, &p.space, &oracle, kmax, |v| reach_step(&p.rows, v, false))
        }
        Instance::WtsNfa(c, d) => {
            let p = match product_wts_nfa_with(c, d, opts) {
                Ok(p) => p,
                Err(e) => return fail(e),
            };
            let sem = wts_semantics_all(c, kmax);
            let lang = nfa_language_all(d, kmax);
            let oracle: Vec<_> =
                p.space.pairs.iter().map(|&(x, y)| tropical_by_depth(&sem[x], &lang[y], kmax)).collect();
            compare_iterates(&name, &p.space, &oracle, kmax, |v| tropical_step(&p, v, false))
        }
        Instance::WtsWmm(c, d) => {
            let p = match product_wts_wmm_with(c, d, opts) {
                Ok(p) => p,
                Err(e) => return fail(e),
            };
            let sem = wts_semantics_all(c, kmax);
            let oracle: Vec<_> = p
                .space
                .pairs
                .iter()
                .map(|&(x, y)| {
                    // The query only reads penalties of traces the system produces.
                    let l = wmm_semantics_on(d, y, sem[x].iter().map(|(w, _)| w));
                    wmm_by_depth(&sem[x], &l, kmax)
                })
                .collect();
            compare_iterates(&name, &p.space, &oracle, kmax, |v| tropical_step(&p, v, false))
        }
    }
}

/// `c` is an MC over the weight alphabet `[M]`. Checks the iterates of
/// `c ⊗ costdfa(N, M)` against `Σ_{Σw<budget} ν(w)` at every pair and depth
/// `≤ kmax`, and the exact value at `(x, N)` against the oracle at depth `N`
/// (accepted traces are shorter than `N`, since weights are at least 1).
pub fn check_cost_bounded(c: &LabeledMc, bound: u64, kmax: usize) -> CheckResult {
    let name = "cost-bounded";
    let built = make_cost_bound_dfa(bound, c.alphabet.len() as u64)
        .and_then(|cd| product_mc_dfa_with(c, &cd, ProductOptions::full()).map(|p| (cd, p)));
    let (cd, p) = match built {
        Ok(b) => b,
        Err(e) => return construction_failure(name, "mc × costdfa", e),
    };
    let sem = mc_semantics_all(c, kmax);
    let oracle: Vec<_> =
        p.space.pairs.iter().map(|&(x, z)| cost_bounded_by_depth(&sem[x], budget(z, bound), kmax)).collect();
    let iterates = compare_iterates(name, &p.space, &oracle, kmax, |v| reach_step(&p.rows, v, false));
    let exact = solve_reach_prob(&p, &Mode::Exact);
    let exact_check = compare_exact(name, (0..c.len()).map(|x| {
        let i = p.space.index_of(x, cd.initial).expect("full product");
        let direct = query_cost_bounded(&mc_semantics(c, x, bound as usize), bound);
        (p.space.names[i].clone(), exact.values[i].clone(), direct)
    }));
    CheckResult::all(name, [iterates, exact_check])
}

/// Iterates of `c ⊗ (rm ⊗α costdfa(N, M))` against
/// `q_cr(ν_k(x), f_r, budget(z))` at every `(x, (r, z))` and depth
/// `≤ kmax`, plus the exact value at `(x, (r, N))` against the oracle at
/// depth `N`.
pub fn check_cost_induced(c: &LabeledMc, rm: &RewardMachine, bound: u64, kmax: usize) -> CheckResult {
    let name = "cost-induced";
    let inst = Instance::CostDfa { chain: c.clone(), rm: rm.clone(), bound };
    let mut iterates = check_step_equality(&inst, kmax);
    iterates.name = name.into();
    let built = make_cost_bound_dfa(bound, rm.bound)
        .and_then(|cd| product_rm_costdfa_with(rm, &cd, None).map(|req| (cd, req)))
        .and_then(|(cd, req)| product_mc_dfa_with(c, &req, ProductOptions::full()).map(|p| (cd, req, p)));
    let (cd, req, p) = match built {
        Ok(b) => b,
        Err(e) => return construction_failure(name, "mc × (rm ⊗α costdfa)", e),
    };
    let exact = solve_reach_prob(&p, &Mode::Exact);
    let nz = cd.len();
    let exact_check = compare_exact(
        name,
        (0..c.len()).flat_map(|x| (0..rm.len()).map(move |r| (x, r))).map(|(x, r)| {
            let yz = r * nz + cd.initial;
            debug_assert!(yz < req.len());
            let i = p.space.index_of(x, yz).expect("full product");
            let nu: TraceDist = mc_semantics(c, x, bound as usize);
            let f = rm_semantics_on(rm, r, nu.iter().map(|(w, _)| w));
            (p.space.names[i].clone(), exact.values[i].clone(), query_cost_induced(&nu, &f, bound))
        }),
    );
    CheckResult::all(name, [iterates, exact_check])
}

fn compare_exact(name: &str, cases: impl IntoIterator<Item = (String, Rational, Rational)>) -> CheckResult {
    let mut comparisons = 0;
    for (state, lhs, rhs) in cases {
        comparisons += 1;
        if lhs != rhs {
            return CheckResult::fail(
                name,
                comparisons,
                Counterexample { models: String::new(), state, step: None, lhs: lhs.to_string(), rhs: rhs.to_string() },
            );
        }
    }
    CheckResult::pass(name, comparisons)
}

/// Exact value of `c ⊗ d` at every pair `(x, y)` against the exact value of
/// the translated never-terminating product at `(x, (y, 0))`.
pub fn check_translation(c: &LabeledMc, d: &Dfa) -> CheckResult {
    let name = "translation";
    let built = product_mc_dfa_with(c, d, ProductOptions::full()).and_then(|left| {
        let (nc, nd) = translate_to_nonterminating(c, d)?;
        let right = product_ntmc_dfa_with(&nc, &nd, ProductOptions::full())?;
        Ok((left, right))
    });
    let (left, right) = match built {
        Ok(b) => b,
        Err(e) => return construction_failure(name, "mc × dfa", e),
    };
    let lv = solve_reach_prob(&left, &Mode::Exact);
    let rv = solve_reach_prob(&right, &Mode::Exact);
    compare_exact(
        name,
        left.space.pairs.iter().enumerate().map(|(i, &(x, y))| {
            let j = right.space.index_of(x, 2 * y).expect("full product");
            (left.space.names[i].clone(), lv.values[i].clone(), rv.values[j].clone())
        }),
    )
}

/// Exact partial expected reward at every pair against the oracle at
/// depth `depth`. The two agree exactly when no path of `m` is longer than
/// `depth` steps, for example an acyclic model with at most `depth` states.
pub fn check_reward_exact(m: &MarkovRewardModel, d: &Dfa, depth: usize) -> CheckResult {
    let name = "reward-exact";
    let p = match product_mrm_dfa_with(m, d, ProductOptions::full()) {
        Ok(p) => p,
        Err(e) => return construction_failure(name, "mrm × dfa", e),
    };
    let exact = solve_partial_expected_reward(&p, &Mode::Exact);
    let sem = mrm_semantics_all(m, depth);
    let lang = dfa_language_all(d, depth);
    let mut comparisons = 0;
    for (i, &(x, y)) in p.space.pairs.iter().enumerate() {
        comparisons += 1;
        let direct = query_reward(&sem[x], &lang[y]);
        if exact.values[i] != direct {
            return CheckResult::fail(
                name,
                comparisons,
                Counterexample {
                    models: String::new(),
                    state: p.space.names[i].clone(),
                    step: Some(depth),
                    lhs: exact.values[i].to_string(),
                    rhs: direct.to_string(),
                },
            );
        }
    }
    CheckResult::pass(name, comparisons)
}

/// Bellman value of the full tropical product at every pair against
/// the oracle at depth `|product states|`, which bounds the length of a
/// cheapest accepted trace (its path visits no state twice).
pub fn check_tropical_exact(inst: &Instance) -> CheckResult {
    let name = "tropical-exact";
    let (p, oracle): (ProductWts, Box<dyn Fn(usize, usize, usize) -> ExtNat>) = match inst {
        Instance::WtsNfa(c, d) => match product_wts_nfa_with(c, d, ProductOptions::full()) {
            Ok(p) => (p, Box::new(move |x, y, k| query_tropical(&wts_semantics(c, x, k), &nfa_language(d, y, k)))),
            Err(e) => return construction_failure(name, "wts × nfa", e),
        },
        Instance::WtsWmm(c, d) => match product_wts_wmm_with(c, d, ProductOptions::full()) {
            Ok(p) => (
                p,
                Box::new(move |x, y, k| {
                    let t = wts_semantics(c, x, k);
                    let l = wmm_semantics_on(d, y, t.iter().map(|(w, _)| w));
                    query_wmm(&t, &l)
                }),
            ),
            Err(e) => return construction_failure(name, "wts × wmm", e),
        },
        other => panic!("tropical check needs a weighted instance, got {}", other.pairing()),
    };
    let solved = solve_tropical(&p, TropicalMode::Bellman);
    let depth = p.space.len();
    let mut comparisons = 0;
    for (i, &(x, y)) in p.space.pairs.iter().enumerate() {
        comparisons += 1;
        let direct = oracle(x, y, depth);
        if solved.values[i] != direct {
            return CheckResult::fail(
                name,
                comparisons,
                Counterexample {
                    models: String::new(),
                    state: p.space.names[i].clone(),
                    step: Some(depth),
                    lhs: solved.values[i].to_string(),
                    rhs: direct.to_string(),
                },
            );
        }
    }
    CheckResult::pass(name, comparisons)
}

/// Value at the initial pair of the terminating and translated pipelines,
/// each on its reachable product.
pub fn translation_values(c: &LabeledMc, d: &Dfa) -> Result<(Rational, Rational), ModelError> {
    let left = product_mc_dfa(c, d)?;
    let (nc, nd) = translate_to_nonterminating(c, d)?;
    let right = product_ntmc_dfa(&nc, &nd)?;
    let lv = solve_reach_prob(&left, &Mode::Exact).values[left.space.initial].clone();
    let rv = solve_reach_prob(&right, &Mode::Exact).values[right.space.initial].clone();
    Ok((lv, rv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::rat;
    use crate::fixtures;
    use crate::lawcheck::random;
    use crate::models::Alphabet;

    #[test]
    fn fig4_fig2_passes_with_four_twentyfifths_at_depth_four() {
        let inst = Instance::McDfa(fixtures::fig4_mc(), fixtures::fig2_dfa());
        let r = check_step_equality(&inst, 6);
        assert!(r.passed, "{r:?}");
        let p = product_mc_dfa_with(&fixtures::fig4_mc(), &fixtures::fig2_dfa(), ProductOptions::full()).unwrap();
        let mut v = ValueVector::from_vec(vec![rat(0, 1); p.space.len()]);
        for _ in 0..4 {
            v = reach_step(&p.rows, &v, false);
        }
        let i = p.space.index_of(0, 0).unwrap();
        assert_eq!(v[i], rat(4, 25));
    }

    #[test]
    fn all_rejecting_requirement_passes_with_zeros() {
        let mut r = random::rng(4);
        let c = random::mc(&mut r, &random::alphabet(2), 4);
        let d = Dfa::constant(c.alphabet.clone(), false);
        assert!(check_step_equality(&Instance::McDfa(c, d), 8).passed);
    }

    #[test]
    fn flipped_flag_is_caught_on_the_fixture() {
        let inst = Instance::McDfa(fixtures::fig4_mc(), fixtures::fig2_dfa());
        let r = check_step_equality_with(&inst, 4, Some(Mutation::McDfaFlipFlag));
        assert!(!r.passed);
        let cx = r.counterexample.unwrap();
        assert_ne!(cx.lhs, cx.rhs);
    }

    #[test]
    fn cost_bound_one_gives_zero() {
        let mut r = random::rng(5);
        let c = random::mc(&mut r, &Alphabet::weights(2).unwrap(), 3);
        let res = check_cost_bounded(&c, 1, 4);
        assert!(res.passed, "{res:?}");
        let p = product_mc_dfa(&c, &make_cost_bound_dfa(1, 2).unwrap()).unwrap();
        assert_eq!(solve_reach_prob(&p, &Mode::Exact).values[p.space.initial], rat(0, 1));
    }

    #[test]
    fn cost_pipelines_on_fig4() {
        let c = fixtures::fig4_mc();
        let rm = fixtures::fig4_rm();
        for bound in 1..=5 {
            let r = check_cost_induced(&c, &rm, bound, 6);
            assert!(r.passed, "N={bound}: {r:?}");
        }
    }

    #[test]
    fn translation_on_fig4_gives_four_twentyfifths_both_ways() {
        let (l, r) = translation_values(&fixtures::fig4_mc(), &fixtures::fig2_dfa()).unwrap();
        assert_eq!(l, rat(4, 25));
        assert_eq!(r, rat(4, 25));
        assert!(check_translation(&fixtures::fig4_mc(), &fixtures::fig2_dfa()).passed);
        let c = fixtures::fig4_mc();
        let reject = Dfa::constant(c.alphabet.clone(), false);
        assert_eq!(translation_values(&c, &reject).unwrap(), (rat(0, 1), rat(0, 1)));
    }

    #[test]
    fn unit_reward_on_fig4_is_exact_at_depth_four() {
        assert!(check_reward_exact(&fixtures::fig4_mrm(), &fixtures::fig2_dfa(), 4).passed);
    }

    #[test]
    fn travelling_fixtures_match_the_oracle() {
        assert!(check_tropical_exact(&Instance::WtsNfa(fixtures::travel_wts(), fixtures::fig5_nfa())).passed);
        assert!(check_tropical_exact(&Instance::WtsWmm(fixtures::travel_wts(), fixtures::travel_wmm())).passed);
    }
}
