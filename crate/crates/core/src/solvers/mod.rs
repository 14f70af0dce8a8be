//! Evaluation of product coalgebras: the least fixed point of
//! `Φ = τ_{S⊗R} ∘ F(v) ∘ c` on a value vector over the pair states.
//!
//! Probabilistic products are solved exactly by zero-pinning states that
//! cannot reach the accept sink and solving the remaining linear system;
//! tropical products by Bellman iteration to literal stabilization.
//! Kleene iterates `Φᵏ(⊥)` are available for every kind.

pub mod float;
pub mod linear;

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::domains::{
    format_decimal, format_rational, kleene_lfp, parse_rational, rat_int, Domain, ExtNat, ExtRational, ProbReward,
    Rational, ValueVector,
};
use crate::products::modality;
use crate::products::{ProbabilisticProduct, ProdSucc, ProductRewardMc, ProductWts};

/// How to evaluate a probabilistic product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    Exact,
    /// `Φᵏ(⊥)`.
    Iterate(usize),
    /// Kleene iteration until the sup-norm change is below the bound.
    Epsilon(Rational),
}

/// How to evaluate a tropical product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TropicalMode {
    Bellman,
    Iterate(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeError(pub String);

impl fmt::Display for ModeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ModeError {}

fn parse_iterate(s: &str) -> Option<Result<usize, ModeError>> {
    s.strip_prefix("iterate:")
        .map(|k| k.parse().map_err(|_| ModeError(format!("bad iteration count `{k}`"))))
}

impl FromStr for Mode {
    type Err = ModeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "exact" {
            return Ok(Mode::Exact);
        }
        if let Some(k) = parse_iterate(s) {
            return Ok(Mode::Iterate(k?));
        }
        if let Some(e) = s.strip_prefix("epsilon:") {
            let e = parse_rational(e).map_err(|err| ModeError(err.to_string()))?;
            if e <= Rational::zero() {
                return Err(ModeError("epsilon must be positive".into()));
            }
            return Ok(Mode::Epsilon(e));
        }
        Err(ModeError(format!("unknown mode `{s}` (expected exact, iterate:K or epsilon:E)")))
    }
}

impl FromStr for TropicalMode {
    type Err = ModeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "bellman" {
            return Ok(TropicalMode::Bellman);
        }
        if let Some(k) = parse_iterate(s) {
            return Ok(TropicalMode::Iterate(k?));
        }
        Err(ModeError(format!("unknown mode `{s}` (expected bellman or iterate:K)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExactLinear,
    Kleene,
    Bellman,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::ExactLinear => "exact-linear",
            Method::Kleene => "kleene",
            Method::Bellman => "bellman",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Evaluate each sweep of the transformer in parallel; results are
    /// identical to the sequential sweep.
    pub parallel: bool,
    /// Cap for epsilon-mode iteration.
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { parallel: false, max_iter: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<D> {
    pub values: ValueVector<D>,
    pub method: Method,
    pub iterations: usize,
    /// Exact-linear: residual is zero. Bellman and Kleene: the last sweep
    /// changed nothing (or, in epsilon mode, changed less than epsilon).
    pub converged: bool,
}

/// Text and JSON rendering of solver values.
pub trait RenderValue {
    fn render(&self, decimal: Option<usize>) -> String;
    fn to_json(&self, decimal: Option<usize>) -> Value;
}

fn render_rat(r: &Rational, decimal: Option<usize>) -> String {
    match decimal {
        Some(d) => format_decimal(r, d),
        None => format_rational(r),
    }
}

impl RenderValue for Rational {
    fn render(&self, decimal: Option<usize>) -> String {
        render_rat(self, decimal)
    }
    fn to_json(&self, decimal: Option<usize>) -> Value {
        Value::String(render_rat(self, decimal))
    }
}

impl RenderValue for ExtNat {
    fn render(&self, _decimal: Option<usize>) -> String {
        self.to_string()
    }
    fn to_json(&self, _decimal: Option<usize>) -> Value {
        match self {
            ExtNat::Fin(n) => json!(n),
            ExtNat::Inf => json!("inf"),
        }
    }
}

impl RenderValue for ExtRational {
    fn render(&self, decimal: Option<usize>) -> String {
        match self {
            ExtRational::Fin(r) => render_rat(r, decimal),
            ExtRational::Inf => "inf".into(),
        }
    }
    fn to_json(&self, decimal: Option<usize>) -> Value {
        Value::String(self.render(decimal))
    }
}

impl RenderValue for ProbReward {
    fn render(&self, decimal: Option<usize>) -> String {
        format!("({}, {})", self.prob.render(decimal), self.reward.render(decimal))
    }
    fn to_json(&self, decimal: Option<usize>) -> Value {
        json!({ "prob": self.prob.to_json(decimal), "reward": self.reward.to_json(decimal) })
    }
}

impl<D: RenderValue> SolveReport<D> {
    /// `{"method", "iterations", "converged", "values": {name: value}}`.
    pub fn to_json(&self, names: &[String], decimal: Option<usize>) -> Value {
        let values: serde_json::Map<String, Value> =
            names.iter().zip(self.values.iter()).map(|(n, v)| (n.clone(), v.to_json(decimal))).collect();
        json!({
            "method": self.method.name(),
            "iterations": self.iterations,
            "converged": self.converged,
            "values": values,
        })
    }
}

fn sweep<D: Send, F: Fn(usize) -> D + Sync + Send>(n: usize, parallel: bool, f: F) -> ValueVector<D> {
    if parallel {
        ValueVector::from_vec((0..n).into_par_iter().map(f).collect())
    } else {
        ValueVector::from_vec((0..n).map(f).collect())
    }
}

fn value_at<'a, D>(v: &'a ValueVector<D>, s: &ProdSucc) -> ProdSucc<&'a D> {
    match s {
        ProdSucc::State(i) => ProdSucc::State(&v[*i]),
        ProdSucc::Accept => ProdSucc::Accept,
        ProdSucc::Reject => ProdSucc::Reject,
    }
}

/// One application of the reachability transformer.
pub fn reach_step(rows: &[Vec<(ProdSucc, Rational)>], v: &ValueVector<Rational>, parallel: bool) -> ValueVector<Rational> {
    sweep(rows.len(), parallel, |i| modality::reach(rows[i].iter().map(|(s, p)| (value_at(v, s), p))))
}

pub fn reward_step(m: &ProductRewardMc, v: &ValueVector<ProbReward>, parallel: bool) -> ValueVector<ProbReward> {
    sweep(m.rows.len(), parallel, |i| {
        modality::reach_reward(m.rows[i].iter().map(|(s, p)| (value_at(v, s), p)), m.step_reward[i])
    })
}

pub fn tropical_step(m: &ProductWts, v: &ValueVector<ExtNat>, parallel: bool) -> ValueVector<ExtNat> {
    sweep(m.rows.len(), parallel, |i| modality::tropical(m.rows[i].iter().map(|(s, w)| (value_at(v, s), *w))))
}

fn bottom<D: Domain>(n: usize) -> ValueVector<D> {
    ValueVector::from_vec(vec![D::bottom(); n])
}

/// `Φᵏ(⊥)`, reporting whether the last sweep was stationary.
fn iterate<D: Domain>(n: usize, k: usize, step: impl Fn(&ValueVector<D>) -> ValueVector<D>) -> SolveReport<D> {
    let mut cur = bottom::<D>(n);
    let mut stationary = false;
    for _ in 0..k {
        let next = step(&cur);
        stationary = next == cur;
        cur = next;
    }
    SolveReport { values: cur, method: Method::Kleene, iterations: k, converged: stationary }
}

fn epsilon_lfp<D: Domain>(
    n: usize,
    eps: &Rational,
    max_iter: usize,
    step: impl Fn(&ValueVector<D>) -> ValueVector<D>,
) -> SolveReport<D> {
    let out = kleene_lfp(step, bottom::<D>(n), Some(eps), max_iter);
    SolveReport { values: out.value, method: Method::Kleene, iterations: out.iterations, converged: out.converged }
}

/// States from which the accept sink is reachable in the transition graph.
pub fn can_reach_accept(rows: &[Vec<(ProdSucc, Rational)>]) -> Vec<bool> {
    let n = rows.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut good = vec![false; n];
    let mut stack = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        for (s, p) in row {
            if p.is_zero() {
                continue;
            }
            match s {
                ProdSucc::State(j) => preds[*j].push(i),
                ProdSucc::Accept => {
                    if !good[i] {
                        good[i] = true;
                        stack.push(i);
                    }
                }
                ProdSucc::Reject => {}
            }
        }
    }
    while let Some(j) = stack.pop() {
        for &i in &preds[j] {
            if !good[i] {
                good[i] = true;
                stack.push(i);
            }
        }
    }
    good
}

/// Solves `v_i − Σ_{j live} P_ij v_j = rhs_i` over the live states; pinned
/// states get 0.
fn solve_live(rows: &[Vec<(ProdSucc, Rational)>], live: &[bool], rhs: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let idx: Vec<usize> = (0..rows.len()).filter(|&i| live[i]).collect();
    let mut pos = vec![usize::MAX; rows.len()];
    for (k, &i) in idx.iter().enumerate() {
        pos[i] = k;
    }
    let n = idx.len();
    let nr = rhs.first().map_or(0, Vec::len);
    let mut a = vec![vec![Rational::zero(); n]; n];
    let mut b = vec![vec![Rational::zero(); nr]; n];
    for (k, &i) in idx.iter().enumerate() {
        a[k][k] = Rational::one();
        for (s, p) in &rows[i] {
            if let ProdSucc::State(j) = s {
                if live[*j] {
                    a[k][pos[*j]] -= p;
                }
            }
        }
        b[k].clone_from(&rhs[i]);
    }
    let x = linear::solve(&a, &b).expect("reduced system is non-singular after zero-pinning");
    let mut out = vec![vec![Rational::zero(); nr]; rows.len()];
    for (k, &i) in idx.iter().enumerate() {
        out[i].clone_from(&x[k]);
    }
    out
}

fn accept_mass(row: &[(ProdSucc, Rational)]) -> Rational {
    row.iter().filter(|(s, _)| *s == ProdSucc::Accept).fold(Rational::zero(), |acc, (_, p)| acc + p)
}

fn exact_reach(rows: &[Vec<(ProdSucc, Rational)>]) -> Vec<Rational> {
    let live = can_reach_accept(rows);
    let rhs: Vec<Vec<Rational>> = rows.iter().map(|r| vec![accept_mass(r)]).collect();
    solve_live(rows, &live, &rhs).into_iter().map(|mut v| v.pop().expect("one column")).collect()
}

pub fn solve_reach_prob<P: ProbabilisticProduct + ?Sized>(m: &P, mode: &Mode) -> SolveReport<Rational> {
    solve_reach_prob_with(m, mode, &SolveOptions::default())
}

pub fn solve_reach_prob_with<P: ProbabilisticProduct + ?Sized>(
    m: &P,
    mode: &Mode,
    opts: &SolveOptions,
) -> SolveReport<Rational> {
    let rows = m.rows();
    let step = |v: &ValueVector<Rational>| reach_step(rows, v, opts.parallel);
    match mode {
        Mode::Exact => {
            let values = ValueVector::from_vec(exact_reach(rows));
            let residual_zero = step(&values) == values;
            assert!(residual_zero, "exact solution is not a fixed point");
            SolveReport { values, method: Method::ExactLinear, iterations: 0, converged: residual_zero }
        }
        Mode::Iterate(k) => iterate(rows.len(), *k, step),
        Mode::Epsilon(e) => epsilon_lfp(rows.len(), e, opts.max_iter, step),
    }
}

pub fn solve_partial_expected_reward(m: &ProductRewardMc, mode: &Mode) -> SolveReport<ProbReward> {
    solve_partial_expected_reward_with(m, mode, &SolveOptions::default())
}

/// Probability first, then the reward: on live states
/// `r_i − Σ_{j live} P_ij r_j = n_i · p_i`, pinned states get `(0, 0)`.
pub fn solve_partial_expected_reward_with(m: &ProductRewardMc, mode: &Mode, opts: &SolveOptions) -> SolveReport<ProbReward> {
    let step = |v: &ValueVector<ProbReward>| reward_step(m, v, opts.parallel);
    match mode {
        Mode::Exact => {
            let p = exact_reach(&m.rows);
            let live = can_reach_accept(&m.rows);
            let rhs: Vec<Vec<Rational>> =
                p.iter().zip(&m.step_reward).map(|(pi, n)| vec![pi * rat_int(*n)]).collect();
            let r = solve_live(&m.rows, &live, &rhs);
            let values = ValueVector::from_vec(
                p.into_iter().zip(r).map(|(pi, mut ri)| ProbReward::new(pi, ri.pop().expect("one column"))).collect(),
            );
            let residual_zero = step(&values) == values;
            assert!(residual_zero, "exact solution is not a fixed point");
            SolveReport { values, method: Method::ExactLinear, iterations: 0, converged: residual_zero }
        }
        Mode::Iterate(k) => iterate(m.rows.len(), *k, step),
        Mode::Epsilon(e) => epsilon_lfp(m.rows.len(), e, opts.max_iter, step),
    }
}

pub fn solve_tropical(m: &ProductWts, mode: TropicalMode) -> SolveReport<ExtNat> {
    solve_tropical_with(m, mode, &SolveOptions::default())
}

/// Bellman mode stabilizes within `|states| + 1` sweeps: weights are
/// non-negative, so optimal accepted paths never repeat a state.
pub fn solve_tropical_with(m: &ProductWts, mode: TropicalMode, opts: &SolveOptions) -> SolveReport<ExtNat> {
    let step = |v: &ValueVector<ExtNat>| tropical_step(m, v, opts.parallel);
    match mode {
        TropicalMode::Bellman => {
            let out = kleene_lfp(step, bottom::<ExtNat>(m.rows.len()), None, m.rows.len() + 2);
            assert!(out.converged, "Bellman iteration must stabilize within |states| + 2 sweeps");
            SolveReport { values: out.value, method: Method::Bellman, iterations: out.iterations, converged: true }
        }
        TropicalMode::Iterate(k) => iterate(m.rows.len(), k, step),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::rat;
    use crate::fixtures;
    use crate::models::{Alphabet, Dfa, LabeledMc, Succ, WeightedTs, WtsEdge};
    use crate::products::{product_mc_dfa, product_mrm_dfa, product_wts_nfa};

    #[test]
    fn fig6b_exact_value() {
        let p = product_mc_dfa(&fixtures::fig4_mc(), &fixtures::fig2_dfa()).unwrap();
        let r = solve_reach_prob(&p, &Mode::Exact);
        assert_eq!(r.values[p.space.initial], rat(4, 25));
        assert!(r.converged);
        let it = solve_reach_prob(&p, &Mode::Iterate(4));
        assert_eq!(it.values, r.values);
    }

    #[test]
    fn unit_reward_fixture() {
        let p = product_mrm_dfa(&fixtures::fig4_mrm(), &fixtures::fig2_dfa()).unwrap();
        let r = solve_partial_expected_reward(&p, &Mode::Exact);
        assert_eq!(r.values[p.space.initial], ProbReward::new(rat(4, 25), rat(12, 25)));
    }

    fn one_state(row: Vec<(Succ, Rational)>) -> LabeledMc {
        LabeledMc::new(Alphabet::new(["a"]).unwrap(), vec!["x".into()], vec![0], vec![row], 0)
    }

    #[test]
    fn self_loop_without_sinks_is_zero() {
        let a = Alphabet::new(["a"]).unwrap();
        // Half the mass loops, half terminates rejected: value 0, not a free solution.
        let c = one_state(vec![(Succ::State(0), rat(1, 2)), (Succ::Target, rat(1, 2))]);
        let p = product_mc_dfa(&c, &Dfa::constant(a.clone(), false)).unwrap();
        assert_eq!(solve_reach_prob(&p, &Mode::Exact).values[0], rat(0, 1));
        // Almost-sure acceptance.
        let p = product_mc_dfa(&c, &Dfa::constant(a, true)).unwrap();
        assert_eq!(solve_reach_prob(&p, &Mode::Exact).values[0], rat(1, 1));
        let eps = solve_reach_prob(&p, &Mode::Epsilon(rat(1, 1000)));
        assert!(eps.converged && eps.values[0] < rat(1, 1) && eps.values[0] > rat(99, 100));
    }

    #[test]
    fn tropical_single_edge_and_no_path() {
        let nfa = fixtures::fig5_nfa();
        let t = nfa.alphabet.index_of("T").unwrap();
        let c = WeightedTs::new(
            nfa.alphabet.clone(),
            vec!["x".into()],
            vec![vec![WtsEdge { succ: Succ::Target, symbol: t, weight: 3 }]],
            0,
        );
        let p = product_wts_nfa(&c, &nfa).unwrap();
        assert_eq!(solve_tropical(&p, TropicalMode::Bellman).values[p.space.initial], ExtNat::Fin(3));
        let c = WeightedTs::new(nfa.alphabet.clone(), vec!["x".into()], vec![vec![]], 0);
        let p = product_wts_nfa(&c, &nfa).unwrap();
        assert_eq!(solve_tropical(&p, TropicalMode::Bellman).values[p.space.initial], ExtNat::Inf);
    }

    #[test]
    fn travelling_fixture_minimum() {
        let p = product_wts_nfa(&fixtures::travel_wts(), &fixtures::fig5_nfa()).unwrap();
        let r = solve_tropical(&p, TropicalMode::Bellman);
        // Cheapest arrival by train: B (2), B (1), T (3).
        assert_eq!(r.values[p.space.initial], ExtNat::Fin(6));
        let c = fixtures::travel_wts();
        let d = fixtures::fig5_nfa();
        let depth = p.space.len();
        let oracle = crate::oracle::query_tropical(
            &crate::oracle::wts_semantics(&c, c.initial, depth),
            &crate::oracle::nfa_language(&d, d.initial, depth),
        );
        assert_eq!(oracle, ExtNat::Fin(6));
    }

    #[test]
    fn parallel_sweep_is_identical() {
        let p = product_mc_dfa(&fixtures::fig4_mc(), &fixtures::fig2_dfa()).unwrap();
        let opts = SolveOptions { parallel: true, ..SolveOptions::default() };
        for k in 0..6 {
            assert_eq!(solve_reach_prob_with(&p, &Mode::Iterate(k), &opts), solve_reach_prob(&p, &Mode::Iterate(k)));
        }
    }

    #[test]
    fn modes_parse() {
        assert_eq!("exact".parse::<Mode>(), Ok(Mode::Exact));
        assert_eq!("iterate:7".parse::<Mode>(), Ok(Mode::Iterate(7)));
        assert_eq!("epsilon:1/100".parse::<Mode>(), Ok(Mode::Epsilon(rat(1, 100))));
        assert!("epsilon:0".parse::<Mode>().is_err());
        assert_eq!("bellman".parse::<TropicalMode>(), Ok(TropicalMode::Bellman));
        assert!("bellman".parse::<Mode>().is_err());
    }
}
