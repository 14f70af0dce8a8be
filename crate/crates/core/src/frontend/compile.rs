//! Operational semantics of `.qtp` programs as coalgebras.
//!
//! A state is a valuation of the declared variables; one coalgebra step runs
//! the whole loop body atomically. Programs consist of a single loop, so no
//! program counter is needed. In terminating mode, successors violating the
//! loop guard become ★. Weighted transitions are labelled with the label of
//! their successor valuation.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_traits::{One, Zero};
use thiserror::Error;

use super::program::{AExpr, BExpr, Pos, Program, ProgramMode, RelOp, Stmt};
use crate::domains::Rational;
use crate::models::{Alphabet, LabeledMc, Model, ModelError, NonTerminatingMc, Succ, WeightedTs, WtsEdge};

/// Upper bound on the declared state space.
pub const MAX_STATES: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("{0}")]
    Mode(String),
    #[error("{pos}: value {value} of `{var}` outside its range [{lo}, {hi}]")]
    OutOfRange { pos: Pos, var: String, value: i64, lo: i64, hi: i64 },
    #[error("label expression has no case for {0}")]
    LabelNotTotal(String),
    #[error("{0}")]
    Halts(String),
    #[error("declared state space too large ({0} valuations)")]
    TooLarge(u64),
    #[error("arithmetic overflow")]
    Overflow,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbMode {
    /// Guard-false valuations are ★.
    Terminating,
    /// The loop never exits; a reachable guard-false valuation is an error.
    Reactive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileOptions {
    /// Keep only valuations reachable from the initial one.
    pub restrict_reachable: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { restrict_reachable: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompileReport {
    pub model: Model,
    /// Product of the variable range sizes.
    pub state_count: u64,
    pub reachable_count: usize,
    pub warnings: Vec<String>,
}

type Valuation = Vec<i64>;

/// One execution outcome of the loop body: successor valuation plus its
/// probability (probabilistic mode) or accumulated weight (weighted mode).
#[derive(Debug, Clone)]
struct Outcome {
    val: Valuation,
    prob: Rational,
    weight: u64,
}

struct Machine<'p> {
    program: &'p Program,
}

impl<'p> Machine<'p> {
    fn eval(&self, e: &AExpr, v: &Valuation) -> Result<i64, CompileError> {
        let bin = |a: &AExpr, b: &AExpr| -> Result<(i64, i64), CompileError> { Ok((self.eval(a, v)?, self.eval(b, v)?)) };
        Ok(match e {
            AExpr::Int(n) => *n,
            AExpr::Var(i) => v[*i],
            AExpr::Neg(a) => self.eval(a, v)?.checked_neg().ok_or(CompileError::Overflow)?,
            AExpr::Add(a, b) => {
                let (x, y) = bin(a, b)?;
                x.checked_add(y).ok_or(CompileError::Overflow)?
            }
            AExpr::Sub(a, b) => {
                let (x, y) = bin(a, b)?;
                x.checked_sub(y).ok_or(CompileError::Overflow)?
            }
            AExpr::Mul(a, b) => {
                let (x, y) = bin(a, b)?;
                x.checked_mul(y).ok_or(CompileError::Overflow)?
            }
            AExpr::Max(a, b) => {
                let (x, y) = bin(a, b)?;
                x.max(y)
            }
            AExpr::Min(a, b) => {
                let (x, y) = bin(a, b)?;
                x.min(y)
            }
        })
    }

    fn test(&self, b: &BExpr, v: &Valuation) -> Result<bool, CompileError> {
        Ok(match b {
            BExpr::Const(c) => *c,
            BExpr::Cmp(op, l, r) => {
                let (x, y) = (self.eval(l, v)?, self.eval(r, v)?);
                match op {
                    RelOp::Eq => x == y,
                    RelOp::Ne => x != y,
                    RelOp::Lt => x < y,
                    RelOp::Le => x <= y,
                    RelOp::Gt => x > y,
                    RelOp::Ge => x >= y,
                }
            }
            BExpr::Not(a) => !self.test(a, v)?,
            BExpr::And(a, c) => self.test(a, v)? && self.test(c, v)?,
            BExpr::Or(a, c) => self.test(a, v)? || self.test(c, v)?,
        })
    }

    fn exec_seq(&self, stmts: &[Stmt], start: Vec<Outcome>) -> Result<Vec<Outcome>, CompileError> {
        let mut current = start;
        for s in stmts {
            let mut next = Vec::new();
            for o in current {
                next.extend(self.exec(s, o)?);
            }
            current = next;
        }
        Ok(current)
    }

    fn exec(&self, s: &Stmt, o: Outcome) -> Result<Vec<Outcome>, CompileError> {
        match s {
            Stmt::Skip => Ok(vec![o]),
            Stmt::Fail => Ok(Vec::new()),
            Stmt::Block(body) => self.exec_seq(body, vec![o]),
            Stmt::Assign { var, expr, pos } => {
                let value = self.eval(expr, &o.val)?;
                let decl = &self.program.vars[*var];
                if value < decl.lo || value > decl.hi {
                    return Err(CompileError::OutOfRange {
                        pos: *pos,
                        var: decl.name.clone(),
                        value,
                        lo: decl.lo,
                        hi: decl.hi,
                    });
                }
                let mut o = o;
                o.val[*var] = value;
                Ok(vec![o])
            }
            Stmt::Add { weight, body } => {
                let mut o = o;
                o.weight = o.weight.checked_add(*weight).ok_or(CompileError::Overflow)?;
                self.exec_seq(body, vec![o])
            }
            Stmt::If { cond, then, otherwise } => {
                let branch = if self.test(cond, &o.val)? { then } else { otherwise };
                self.exec_seq(branch, vec![o])
            }
            Stmt::Prob { branches, probs } => {
                let rest = Rational::one() - probs.iter().fold(Rational::zero(), |acc, p| acc + p);
                let mut out = Vec::new();
                for (i, body) in branches.iter().enumerate() {
                    let p = probs.get(i).cloned().unwrap_or_else(|| rest.clone());
                    if p.is_zero() {
                        continue;
                    }
                    let branch = Outcome { val: o.val.clone(), prob: &o.prob * p, weight: o.weight };
                    out.extend(self.exec_seq(body, vec![branch])?);
                }
                Ok(out)
            }
            Stmt::Nondet { branches } => {
                let mut out = Vec::new();
                for body in branches {
                    out.extend(self.exec_seq(body, vec![o.clone()])?);
                }
                Ok(out)
            }
        }
    }

    fn step(&self, v: &Valuation) -> Result<Vec<Outcome>, CompileError> {
        self.exec_seq(&self.program.body, vec![Outcome { val: v.clone(), prob: Rational::one(), weight: 0 }])
    }

    fn label(&self, v: &Valuation) -> Result<usize, CompileError> {
        let p = self.program;
        for case in &p.label_cases {
            let hit = case.pattern.iter().zip(&p.label_args).all(|(pat, &arg)| pat.map_or(true, |x| v[arg] == x));
            if hit {
                return Ok(case.symbol);
            }
        }
        Err(CompileError::LabelNotTotal(self.name(v)))
    }

    fn name(&self, v: &Valuation) -> String {
        self.program.vars.iter().zip(v).map(|(d, x)| format!("{}={x}", d.name)).collect::<Vec<_>>().join(",")
    }

    fn all_valuations(&self) -> Vec<Valuation> {
        let mut out = vec![Vec::new()];
        for d in &self.program.vars {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (d.lo..=d.hi).map(move |x| {
                        let mut v = prefix.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
        }
        out
    }
}

struct Explored {
    states: Vec<Valuation>,
    index: HashMap<Valuation, usize>,
    steps: Vec<Vec<Outcome>>,
    reachable: usize,
    state_count: u64,
    warnings: Vec<String>,
}

/// Collects the regular states (guard-true valuations in terminating mode)
/// in lexicographic order, together with their body outcomes.
fn explore(m: &Machine, opts: CompileOptions, guard_is_target: bool) -> Result<Explored, CompileError> {
    let p = m.program;
    let state_count = p.vars.iter().try_fold(1u64, |acc, d| acc.checked_mul(d.size())).unwrap_or(u64::MAX);
    if state_count > MAX_STATES {
        return Err(CompileError::TooLarge(state_count));
    }
    let regular = |v: &Valuation| -> Result<bool, CompileError> { Ok(!guard_is_target || m.test(&p.guard, v)?) };
    if !regular(&p.init)? {
        return Err(CompileError::Halts(format!(
            "initial valuation {} violates the loop guard",
            m.name(&p.init)
        )));
    }
    let mut found: BTreeMap<Valuation, Vec<Outcome>> = BTreeMap::new();
    let mut queue = VecDeque::from([p.init.clone()]);
    found.insert(p.init.clone(), m.step(&p.init)?);
    while let Some(v) = queue.pop_front() {
        let succs: Vec<Valuation> = found[&v].iter().map(|o| o.val.clone()).collect();
        for s in succs {
            if !found.contains_key(&s) && regular(&s)? {
                let out = m.step(&s)?;
                found.insert(s.clone(), out);
                queue.push_back(s);
            }
        }
    }
    let reachable = found.len();
    let mut warnings = Vec::new();
    if !opts.restrict_reachable {
        let mut extra = 0usize;
        for v in m.all_valuations() {
            if !found.contains_key(&v) && regular(&v)? {
                let out = m.step(&v)?;
                found.insert(v, out);
                extra += 1;
            }
        }
        if extra > 0 {
            warnings.push(format!("{extra} valuations unreachable from the initial state are kept"));
        }
    }
    let mut states = Vec::with_capacity(found.len());
    let mut steps = Vec::with_capacity(found.len());
    for (v, out) in found {
        states.push(v);
        steps.push(out);
    }
    let index = states.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
    Ok(Explored { states, index, steps, reachable, state_count, warnings })
}

fn alphabet(p: &Program) -> Result<Alphabet, CompileError> {
    Ok(Alphabet::new(p.labels.clone())?)
}

/// Compiles a probabilistic (or plain) program to a labelled MC
/// (terminating mode) or a never-terminating MC (reactive mode).
pub fn compile_probabilistic(p: &Program, mode: ProbMode, opts: CompileOptions) -> Result<CompileReport, CompileError> {
    if p.mode == ProgramMode::Weighted {
        return Err(CompileError::Mode("weighted program cannot be compiled to a Markov chain".into()));
    }
    let m = Machine { program: p };
    if mode == ProbMode::Terminating && p.guard == BExpr::Const(true) {
        return Err(CompileError::Mode("terminating mode requires a loop guard other than `true`".into()));
    }
    let ex = explore(&m, opts, mode == ProbMode::Terminating)?;
    let names: Vec<String> = ex.states.iter().map(|v| m.name(v)).collect();
    let label = ex.states.iter().map(|v| m.label(v)).collect::<Result<Vec<_>, _>>()?;
    let initial = ex.index[&p.init];
    let model = match mode {
        ProbMode::Terminating => {
            let trans = ex
                .steps
                .iter()
                .map(|out| {
                    out.iter()
                        .map(|o| {
                            let succ = ex.index.get(&o.val).map_or(Succ::Target, |&i| Succ::State(i));
                            (succ, o.prob.clone())
                        })
                        .collect()
                })
                .collect();
            Model::Mc(LabeledMc::new(alphabet(p)?, names, label, trans, initial))
        }
        ProbMode::Reactive => {
            let mut trans = Vec::with_capacity(ex.steps.len());
            for (v, out) in ex.states.iter().zip(&ex.steps) {
                let mut row = Vec::with_capacity(out.len());
                for o in out {
                    match ex.index.get(&o.val) {
                        Some(&i) => row.push((i, o.prob.clone())),
                        None => {
                            return Err(CompileError::Halts(format!(
                                "reactive program halts: successor {} of {} violates the loop guard",
                                m.name(&o.val),
                                m.name(v)
                            )))
                        }
                    }
                }
                trans.push(row);
            }
            let reached_exit = ex.states.iter().any(|v| !m.test(&p.guard, v).unwrap_or(true));
            if reached_exit {
                return Err(CompileError::Halts("reactive program has a reachable guard-false state".into()));
            }
            Model::Ntmc(NonTerminatingMc::new(alphabet(p)?, names, label, trans, initial))
        }
    };
    Ok(CompileReport { model, state_count: ex.state_count, reachable_count: ex.reachable, warnings: ex.warnings })
}

/// Compiles a weighted (or plain) program to a weighted transition system.
pub fn compile_weighted(p: &Program, opts: CompileOptions) -> Result<CompileReport, CompileError> {
    if p.mode == ProgramMode::Probabilistic {
        return Err(CompileError::Mode("probabilistic program cannot be compiled to a weighted system".into()));
    }
    if p.guard == BExpr::Const(true) {
        return Err(CompileError::Mode("weighted programs require a loop guard other than `true`".into()));
    }
    let m = Machine { program: p };
    let ex = explore(&m, opts, true)?;
    let names: Vec<String> = ex.states.iter().map(|v| m.name(v)).collect();
    let mut trans = Vec::with_capacity(ex.steps.len());
    for out in &ex.steps {
        let mut row = Vec::with_capacity(out.len());
        for o in out {
            let succ = ex.index.get(&o.val).map_or(Succ::Target, |&i| Succ::State(i));
            row.push(WtsEdge { succ, symbol: m.label(&o.val)?, weight: o.weight });
        }
        trans.push(row);
    }
    let model = Model::Wts(WeightedTs::new(alphabet(p)?, names, trans, ex.index[&p.init]));
    Ok(CompileReport { model, state_count: ex.state_count, reachable_count: ex.reachable, warnings: ex.warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::frontend::program::parse_program;
    use crate::models::Validate;

    fn compile_src(name: &str, mode: ProbMode) -> CompileReport {
        let p = parse_program(fixtures::source(name).unwrap()).unwrap();
        compile_probabilistic(&p, mode, CompileOptions::default()).unwrap()
    }

    #[test]
    fn fig2_program_has_fourteen_states() {
        let r = compile_src("fig2-grid", ProbMode::Terminating);
        let Model::Mc(c) = &r.model else { panic!("expected an MC") };
        assert_eq!(c.len(), 14);
        assert_eq!(r.state_count, 15);
        assert_eq!(r.reachable_count, 14);
        assert!(c.violations().is_empty());
        assert_eq!(c.states[c.initial], "i=5,j=3");
        assert!(c.states.iter().all(|s| s != "i=1,j=1"));
    }

    #[test]
    fn fig3_program_is_never_terminating() {
        let r = compile_src("fig3-reactive", ProbMode::Reactive);
        let Model::Ntmc(c) = &r.model else { panic!("expected a never-terminating MC") };
        assert_eq!(c.len(), 24);
        assert!(c.violations().is_empty());
    }

    #[test]
    fn travelling_program_matches_the_fixture() {
        let p = parse_program(fixtures::source("travel").unwrap()).unwrap();
        let r = compile_weighted(&p, CompileOptions::default()).unwrap();
        assert_eq!(r.model, Model::Wts(fixtures::travel_wts()));
    }

    #[test]
    fn single_move_program() {
        let text = "var t in [0, 1]; labels go; label (t) { _ => go }; init t = 0;
            while (t != 1) { add(3) { t <- 1; } }";
        let p = parse_program(text).unwrap();
        let Model::Wts(w) = compile_weighted(&p, CompileOptions::default()).unwrap().model else { panic!() };
        assert_eq!(w.trans, vec![vec![WtsEdge { succ: Succ::Target, symbol: 0, weight: 3 }]]);
    }

    #[test]
    fn zero_choices_give_an_empty_transition_set() {
        let text = "var t in [0, 2]; labels a; label (t) { _ => a }; init t = 0;
            while (t != 2) { if (t == 0) { add(1) { t <- 1; } } else { fail; } }";
        let p = parse_program(text).unwrap();
        let Model::Wts(w) = compile_weighted(&p, CompileOptions::default()).unwrap().model else { panic!() };
        assert_eq!(w.len(), 2);
        assert!(w.trans[1].is_empty());
    }

    #[test]
    fn out_of_range_assignment_is_an_error() {
        let text = "var i in [0, 2]; labels a; label (i) { _ => a }; init i = 2;
            while (i > 0) { i <- i + 1; }";
        let p = parse_program(text).unwrap();
        let e = compile_probabilistic(&p, ProbMode::Terminating, CompileOptions::default()).unwrap_err();
        assert!(matches!(e, CompileError::OutOfRange { value: 3, .. }), "{e}");
    }

    #[test]
    fn reactive_mode_rejects_halting_programs() {
        let text = "var i in [0, 2]; labels a; label (i) { _ => a }; init i = 2;
            while (i > 0) { i <- max(i - 1, 0); }";
        let p = parse_program(text).unwrap();
        let e = compile_probabilistic(&p, ProbMode::Reactive, CompileOptions::default()).unwrap_err();
        assert!(matches!(e, CompileError::Halts(_)));
    }

    #[test]
    fn missing_label_case_is_an_error() {
        let text = "var i in [0, 2]; labels a; label (i) { (2) => a }; init i = 2;
            while (i > 0) { i <- i - 1; }";
        let p = parse_program(text).unwrap();
        let e = compile_probabilistic(&p, ProbMode::Terminating, CompileOptions::default()).unwrap_err();
        assert_eq!(e, CompileError::LabelNotTotal("i=1".into()));
    }
}
