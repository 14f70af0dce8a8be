//! Property tests over seeded random models: order-theoretic facts about
//! the transformers, agreement of independently computed routes, and
//! robustness of the parsers.

use coprod_core::domains::{rat, Rational, ValueVector};
use coprod_core::frontend::{emit_model, parse_model, parse_program};
use coprod_core::lawcheck::random::{self, Rng8};
use coprod_core::lawcheck::sweep::{step_equality_sweep, SweepConfig};
use coprod_core::lawcheck::{InstanceLimits, Pairing};
use coprod_core::models::{dfa_intersect, make_cost_bound_dfa, Alphabet, Dfa, LabeledMc, Model, Nfa, Succ};
use coprod_core::oracle::{
    dfa_language, dfa_language_all, mc_semantics, mc_semantics_all, mrm_semantics_all, nfa_language, ntmc_marginal,
    ntmc_marginals_all, rm_semantics, rm_semantics_on, wmm_semantics, wmm_semantics_on, wts_semantics_all, Trace,
};
use coprod_core::products::{
    product_mc_dfa_with, product_mrm_dfa_with, product_ntmc_dfa_with, product_wts_nfa_with, ProductOptions,
};
use coprod_core::solvers::float::reach_prob_f64;
use coprod_core::solvers::{
    reach_step, solve_partial_expected_reward, solve_reach_prob, solve_tropical, Mode, TropicalMode,
};
use coprod_core::fixtures;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn reachable() -> ProductOptions {
    ProductOptions::default()
}

/// Alphabet of 1..=3 symbols and a system size of 1..=5.
fn shape(rng: &mut Rng8) -> (Alphabet, usize, usize) {
    let a = random::alphabet(rng.gen_range(1..=3));
    let nx = rng.gen_range(1..=5);
    let ny = rng.gen_range(1..=4);
    (a, nx, ny)
}

/// Every word of length `1..=k`.
fn words(alphabet: usize, k: usize) -> Vec<Trace> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..k {
        layer = layer.iter().flat_map(|w| (0..alphabet).map(move |a| [w.clone(), vec![a]].concat())).collect();
        out.extend(layer.iter().map(|w| Trace::new(w.iter().copied()).expect("non-empty")));
    }
    out
}

fn dfa_accepts(d: &Dfa, w: &Trace) -> bool {
    let mut y = d.initial;
    let mut flag = false;
    for a in w.symbols() {
        (y, flag) = d.step(y, a);
    }
    flag
}

fn nfa_accepts(d: &Nfa, w: &Trace) -> bool {
    // States reached so far, each with the flag of the step that reached it.
    let mut front: Vec<(usize, bool)> = vec![(d.initial, false)];
    for a in w.symbols() {
        front = front.iter().flat_map(|&(y, _)| d.delta[y][a].iter().copied()).collect();
        front.sort_unstable();
        front.dedup();
    }
    front.iter().any(|&(_, b)| b)
}

/// The same chain with state `i` moved to index `perm[i]`.
fn permute_mc(c: &LabeledMc, perm: &[usize]) -> LabeledMc {
    let n = c.len();
    let mut states = vec![String::new(); n];
    let mut label = vec![0; n];
    let mut trans = vec![Vec::new(); n];
    for i in 0..n {
        states[perm[i]] = c.states[i].clone();
        label[perm[i]] = c.label[i];
        trans[perm[i]] = c.trans[i]
            .iter()
            .map(|(s, p)| (if let Succ::State(j) = s { Succ::State(perm[*j]) } else { Succ::Target }, p.clone()))
            .collect();
    }
    LabeledMc::new(c.alphabet.clone(), states, label, trans, perm[c.initial])
}

fn permute_dfa(d: &Dfa, perm: &[usize]) -> Dfa {
    let mut delta = vec![Vec::new(); d.len()];
    let mut states = vec![String::new(); d.len()];
    for y in 0..d.len() {
        states[perm[y]] = d.states[y].clone();
        delta[perm[y]] = d.delta[y].iter().map(|e| e.map(|(y2, b)| (perm[y2], b))).collect();
    }
    Dfa { alphabet: d.alphabet.clone(), states, delta, initial: perm[d.initial] }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kleene_iterates_increase_towards_the_solution(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let (a, nx, ny) = shape(&mut rng);
        let c = random::mc(&mut rng, &a, nx);
        let d = random::dfa(&mut rng, &a, ny);
        let p = product_mc_dfa_with(&c, &d, ProductOptions::full()).unwrap();
        let exact = solve_reach_prob(&p, &Mode::Exact).values;
        let mut prev = solve_reach_prob(&p, &Mode::Iterate(0)).values;
        for k in 1..=8 {
            let cur = solve_reach_prob(&p, &Mode::Iterate(k)).values;
            prop_assert!(prev.leq(&cur));
            prop_assert!(cur.leq(&exact));
            prev = cur;
        }

        let m = random::rewards(&mut rng, c.clone());
        let p = product_mrm_dfa_with(&m, &d, ProductOptions::full()).unwrap();
        let exact = solve_partial_expected_reward(&p, &Mode::Exact).values;
        let mut prev = solve_partial_expected_reward(&p, &Mode::Iterate(0)).values;
        for k in 1..=8 {
            let cur = solve_partial_expected_reward(&p, &Mode::Iterate(k)).values;
            prop_assert!(prev.leq(&cur));
            prop_assert!(cur.leq(&exact));
            prev = cur;
        }

        let w = random::wts(&mut rng, &a, nx);
        let n = random::nfa(&mut rng, &a, ny);
        let p = product_wts_nfa_with(&w, &n, ProductOptions::full()).unwrap();
        let best = solve_tropical(&p, TropicalMode::Bellman).values;
        let mut prev = solve_tropical(&p, TropicalMode::Iterate(0)).values;
        for k in 1..=8 {
            let cur = solve_tropical(&p, TropicalMode::Iterate(k)).values;
            prop_assert!(prev.leq(&cur));
            prop_assert!(cur.leq(&best));
            prev = cur;
        }
    }

    #[test]
    fn reach_transformer_is_monotone(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let (a, nx, ny) = shape(&mut rng);
        let p = product_mc_dfa_with(&random::mc(&mut rng, &a, nx), &random::dfa(&mut rng, &a, ny), ProductOptions::full()).unwrap();
        let n = p.rows.len();
        let lo: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=16)).collect();
        let hi: Vec<i64> = lo.iter().map(|&l| rng.gen_range(l..=16)).collect();
        let u = ValueVector::from_vec(lo.iter().map(|&l| rat(l, 16)).collect());
        let v = ValueVector::from_vec(hi.iter().map(|&h| rat(h, 16)).collect());
        prop_assert!(reach_step(&p.rows, &u, false).leq(&reach_step(&p.rows, &v, false)));
    }

    #[test]
    fn truncating_deeper_semantics_gives_shallower_semantics(seed in any::<u64>(), k in 0usize..4) {
        let mut rng = random::rng(seed);
        let (a, nx, ny) = shape(&mut rng);
        let deep = k + 2;
        let c = random::mc(&mut rng, &a, nx);
        let (s_k, s_deep) = (mc_semantics_all(&c, k), mc_semantics_all(&c, deep));
        for x in 0..nx {
            prop_assert_eq!(&s_deep[x].truncate(k), &s_k[x]);
        }
        let m = random::rewards(&mut rng, c);
        let (s_k, s_deep) = (mrm_semantics_all(&m, k), mrm_semantics_all(&m, deep));
        for x in 0..nx {
            prop_assert_eq!(&s_deep[x].truncate(k), &s_k[x]);
        }
        let w = random::wts(&mut rng, &a, nx);
        let (s_k, s_deep) = (wts_semantics_all(&w, k), wts_semantics_all(&w, deep));
        for x in 0..nx {
            prop_assert_eq!(&s_deep[x].truncate(k), &s_k[x]);
        }
        let d = random::dfa(&mut rng, &a, ny);
        let (l_k, l_deep) = (dfa_language_all(&d, k), dfa_language_all(&d, deep));
        for y in 0..ny {
            prop_assert_eq!(&l_deep[y].truncate(k), &l_k[y]);
        }
    }

    #[test]
    fn path_enumeration_agrees_with_kleene_iteration(seed in any::<u64>(), k in 0usize..6) {
        let mut rng = random::rng(seed);
        let (a, nx, _) = shape(&mut rng);
        let c = random::mc(&mut rng, &a, nx);
        let all = mc_semantics_all(&c, k);
        for x in 0..nx {
            prop_assert_eq!(&mc_semantics(&c, x, k), &all[x]);
        }
        let t = random::ntmc(&mut rng, &a, nx);
        if k > 0 {
            let all = ntmc_marginals_all(&t, k);
            for x in 0..nx {
                prop_assert_eq!(&ntmc_marginal(&t, x, k), &all[x][k - 1]);
            }
        }
    }

    #[test]
    fn machine_runs_agree_with_kleene_semantics(seed in any::<u64>(), k in 1usize..4) {
        let mut rng = random::rng(seed);
        let (a, _, ny) = shape(&mut rng);
        let all_words = words(a.len(), k);
        let bound = rng.gen_range(1..=3);
        let rm = random::reward_machine(&mut rng, &a, ny, bound);
        let wmm = random::wmm(&mut rng, &a, ny);
        for y in 0..ny {
            prop_assert_eq!(rm_semantics_on(&rm, y, &all_words), rm_semantics(&rm, y, k));
            prop_assert_eq!(wmm_semantics_on(&wmm, y, &all_words), wmm_semantics(&wmm, y, k));
        }
    }

    #[test]
    fn automaton_languages_agree_with_runs(seed in any::<u64>(), k in 1usize..5) {
        let mut rng = random::rng(seed);
        let (a, _, ny) = shape(&mut rng);
        let d = random::dfa(&mut rng, &a, ny);
        let n = random::nfa(&mut rng, &a, ny);
        let (ld, ln) = (dfa_language(&d, d.initial, k), nfa_language(&n, n.initial, k));
        for w in words(a.len(), k) {
            prop_assert_eq!(ld.contains(&w), dfa_accepts(&d, &w));
            prop_assert_eq!(ln.contains(&w), nfa_accepts(&n, &w));
        }
    }

    #[test]
    fn cost_bound_dfa_accepts_exactly_the_light_words(n in 1u64..=6, m in 1u64..=3) {
        let d = make_cost_bound_dfa(n, m).unwrap();
        // Symbol index j stands for weight j + 1.
        for w in words(m as usize, n as usize + 1) {
            let sum: u64 = w.symbols().map(|j| j as u64 + 1).sum();
            prop_assert_eq!(dfa_accepts(&d, &w), sum < n, "word {:?}", w);
        }
    }

    #[test]
    fn dfa_intersection_intersects_languages(seed in any::<u64>(), k in 1usize..5) {
        let mut rng = random::rng(seed);
        let (a, _, ny) = shape(&mut rng);
        let d1 = random::dfa(&mut rng, &a, ny);
        let n2 = rng.gen_range(1..=3);
        let d2 = random::dfa(&mut rng, &a, n2);
        let both = dfa_intersect(&d1, &d2).unwrap();
        prop_assert_eq!(
            dfa_language(&both, both.initial, k),
            dfa_language(&d1, d1.initial, k).intersection(&dfa_language(&d2, d2.initial, k))
        );
    }

    #[test]
    fn models_round_trip_through_json(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let (a, nx, ny) = shape(&mut rng);
        let mc = random::mc(&mut rng, &a, nx);
        let bound = rng.gen_range(1..=3);
        let models = [
            Model::Mc(mc.clone()),
            Model::Mrm(random::rewards(&mut rng, mc)),
            Model::Ntmc(random::ntmc(&mut rng, &a, nx)),
            Model::Wts(random::wts(&mut rng, &a, nx)),
            Model::Dfa(random::dfa(&mut rng, &a, ny)),
            Model::Nfa(random::nfa(&mut rng, &a, ny)),
            Model::Rm(random::reward_machine(&mut rng, &a, ny, bound)),
            Model::Wmm(random::wmm(&mut rng, &a, ny)),
        ];
        for m in models {
            prop_assert_eq!(parse_model(&emit_model(&m)).unwrap(), m);
        }
    }

    #[test]
    fn parsers_reject_garbage_without_panicking(text in "\\PC{0,200}") {
        let _ = parse_program(&text);
        let _ = parse_model(&text);
    }

    #[test]
    fn parsers_survive_edited_fixtures(cut in 0usize..400, len in 0usize..20, insert in "[a-z0-9(){};<>=\\[\\], ]{0,6}") {
        for name in fixtures::PROGRAM_NAMES.iter().chain(fixtures::MODEL_NAMES.iter()) {
            let src = fixtures::source(name).unwrap();
            let chars: Vec<char> = src.chars().collect();
            let at = cut.min(chars.len());
            let end = (at + len).min(chars.len());
            let edited: String = chars[..at].iter().chain(insert.chars().collect::<Vec<_>>().iter()).chain(&chars[end..]).collect();
            let _ = parse_program(&edited);
            let _ = parse_model(&edited);
        }
    }

    #[test]
    fn restricting_to_reachable_pairs_keeps_the_initial_value(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let (a, nx, ny) = shape(&mut rng);
        let c = random::mc(&mut rng, &a, nx);
        let d = random::dfa(&mut rng, &a, ny);
        let full = product_mc_dfa_with(&c, &d, ProductOptions::full()).unwrap();
        let reach = product_mc_dfa_with(&c, &d, reachable()).unwrap();
        let vf = solve_reach_prob(&full, &Mode::Exact).values;
        let vr = solve_reach_prob(&reach, &Mode::Exact).values;
        for (i, &(x, y)) in reach.space.pairs.iter().enumerate() {
            prop_assert_eq!(&vr[i], &vf[full.space.index_of(x, y).unwrap()]);
        }
        let t = random::ntmc(&mut rng, &a, nx);
        let full = product_ntmc_dfa_with(&t, &d, ProductOptions::full()).unwrap();
        let reach = product_ntmc_dfa_with(&t, &d, reachable()).unwrap();
        let vf = solve_reach_prob(&full, &Mode::Exact).values;
        let vr = solve_reach_prob(&reach, &Mode::Exact).values;
        prop_assert_eq!(&vr[reach.space.initial], &vf[full.space.initial]);
    }

    #[test]
    fn renaming_states_does_not_change_values(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let (a, nx, ny) = shape(&mut rng);
        let c = random::mc(&mut rng, &a, nx);
        let d = random::dfa(&mut rng, &a, ny);
        let mut px: Vec<usize> = (0..nx).collect();
        let mut py: Vec<usize> = (0..ny).collect();
        px.shuffle(&mut rng);
        py.shuffle(&mut rng);
        let p = product_mc_dfa_with(&c, &d, ProductOptions::full()).unwrap();
        let q = product_mc_dfa_with(&permute_mc(&c, &px), &permute_dfa(&d, &py), ProductOptions::full()).unwrap();
        let (vp, vq) = (solve_reach_prob(&p, &Mode::Exact).values, solve_reach_prob(&q, &Mode::Exact).values);
        for (i, &(x, y)) in p.space.pairs.iter().enumerate() {
            prop_assert_eq!(&vp[i], &vq[q.space.index_of(px[x], py[y]).unwrap()]);
        }
    }

    #[test]
    fn float_iteration_approximates_the_exact_value(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let (a, nx, ny) = shape(&mut rng);
        let p = product_mc_dfa_with(&random::mc(&mut rng, &a, nx), &random::dfa(&mut rng, &a, ny), ProductOptions::full()).unwrap();
        let exact = solve_reach_prob(&p, &Mode::Exact).values;
        let (approx, _) = reach_prob_f64(&p.rows, 1e-13, 1_000_000);
        for (e, f) in exact.iter().zip(&approx) {
            let e = e.numer().to_string().parse::<f64>().unwrap() / e.denom().to_string().parse::<f64>().unwrap();
            prop_assert!((e - f).abs() < 1e-6, "{} vs {}", e, f);
        }
    }

    #[test]
    fn epsilon_mode_stays_below_the_least_fixed_point(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let (a, nx, ny) = shape(&mut rng);
        let p = product_mc_dfa_with(&random::mc(&mut rng, &a, nx), &random::dfa(&mut rng, &a, ny), ProductOptions::full()).unwrap();
        let exact = solve_reach_prob(&p, &Mode::Exact).values;
        let approx = solve_reach_prob(&p, &Mode::Epsilon(rat(1, 1000))).values;
        prop_assert!(approx.leq(&exact));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn parallel_sweeps_match_sequential_sweeps(seed in any::<u64>()) {
        let cfg = SweepConfig { seed, instances: 6, kmax: 5, limits: InstanceLimits::default(), parallel: false };
        for p in Pairing::ALL {
            let seq = step_equality_sweep(p, &cfg, None);
            let par = step_equality_sweep(p, &SweepConfig { parallel: true, ..cfg }, None);
            prop_assert!(seq.passed);
            prop_assert_eq!(seq, par);
        }
    }
}

#[test]
fn exact_values_lie_in_the_unit_interval() {
    let p = product_mc_dfa_with(&fixtures::fig4_mc(), &fixtures::fig2_dfa(), ProductOptions::full()).unwrap();
    let v = solve_reach_prob(&p, &Mode::Exact).values;
    let (zero, one): (Rational, Rational) = (rat(0, 1), rat(1, 1));
    assert!(v.iter().all(|x| *x >= zero && *x <= one));
}
