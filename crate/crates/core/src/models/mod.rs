//! System coalgebras (MCs, reward models, never-terminating MCs, weighted
//! transition systems) and requirement coalgebras (DFAs, NFAs, reward
//! machines, weighted Mealy machines).
//!
//! States and symbols are stored by index; names are kept alongside for
//! serialization. Every transition row is kept sorted and duplicate-free so
//! that structural equality is semantic equality.

mod construct;
mod validate;

use std::collections::HashMap;

use num_traits::Zero;
use thiserror::Error;

use crate::domains::Rational;

pub use construct::{
    dfa_intersect, make_cost_bound_dfa, product_rm_costdfa, product_rm_costdfa_with,
    translate_to_nonterminating, BOTTOM_STATE, END_SYMBOL, FLAG_OFF, FLAG_ON,
};
pub use validate::{validate, Validate, Violation};

/// Name of the target ★ in serialized successor positions.
pub const TARGET: &str = "*";
/// Separator used in the canonical names of tuple states.
pub const SEPARATOR: char = '|';

pub fn pair_name(left: &str, right: &str) -> String {
    format!("{left}{SEPARATOR}{right}")
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("model is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("reserved symbol `{0}` already present in the alphabet")]
    ReservedSymbol(String),
}

/// Ordered, duplicate-free, non-empty set of label names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self, ModelError> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(ModelError::InvalidParameter("alphabet must be non-empty".into()));
        }
        let mut index = HashMap::new();
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(ModelError::InvalidParameter(format!("duplicate symbol `{s}`")));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    /// `[M] = {1, …, M}` with symbol `j` named by its decimal value.
    pub fn weights(bound: u64) -> Result<Self, ModelError> {
        Alphabet::new((1..=bound).map(|j| j.to_string()))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, i: usize) -> &str {
        &self.symbols[i]
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn render(&self, word: &[usize]) -> String {
        word.iter().map(|&a| self.symbol(a)).collect::<Vec<_>>().join("·")
    }
}

/// Successor in `X ⊎ {★}`; `Target` orders after every state. Generic so
/// that laws and modalities can run on semantic values as well as indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Succ<X = usize> {
    State(X),
    Target,
}

/// Sorts by successor, merges duplicates by adding mass, drops zero mass.
pub fn normalize_dist<K: Ord + Copy>(row: Vec<(K, Rational)>) -> Vec<(K, Rational)> {
    let mut row = row;
    row.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(K, Rational)> = Vec::with_capacity(row.len());
    for (k, p) in row {
        match out.last_mut() {
            Some((last, acc)) if *last == k => *acc += p,
            _ => out.push((k, p)),
        }
    }
    out.retain(|(_, p)| !p.is_zero());
    out
}

pub fn normalize_set<T: Ord>(mut row: Vec<T>) -> Vec<T> {
    row.sort();
    row.dedup();
    row
}

/// Markov chain with a target: `X → D(X + {★}) × A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledMc {
    pub alphabet: Alphabet,
    pub states: Vec<String>,
    pub label: Vec<usize>,
    pub trans: Vec<Vec<(Succ, Rational)>>,
    pub initial: usize,
}

impl LabeledMc {
    pub fn new(
        alphabet: Alphabet,
        states: Vec<String>,
        label: Vec<usize>,
        trans: Vec<Vec<(Succ, Rational)>>,
        initial: usize,
    ) -> Self {
        let trans = trans.into_iter().map(normalize_dist).collect();
        LabeledMc { alphabet, states, label, trans, initial }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }
}

/// Markov reward model: a labelled MC plus a natural reward per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovRewardModel {
    pub chain: LabeledMc,
    pub reward: Vec<u64>,
}

impl MarkovRewardModel {
    pub fn new(chain: LabeledMc, reward: Vec<u64>) -> Self {
        MarkovRewardModel { chain, reward }
    }
}

/// Markov chain without target: `X → D(X) × A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonTerminatingMc {
    pub alphabet: Alphabet,
    pub states: Vec<String>,
    pub label: Vec<usize>,
    pub trans: Vec<Vec<(usize, Rational)>>,
    pub initial: usize,
}

impl NonTerminatingMc {
    pub fn new(
        alphabet: Alphabet,
        states: Vec<String>,
        label: Vec<usize>,
        trans: Vec<Vec<(usize, Rational)>>,
        initial: usize,
    ) -> Self {
        let trans = trans.into_iter().map(normalize_dist).collect();
        NonTerminatingMc { alphabet, states, label, trans, initial }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// One element `(x', a, m)` of a weighted transition set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WtsEdge {
    pub succ: Succ,
    pub symbol: usize,
    pub weight: u64,
}

/// Weighted transition system: `X → P_f((X + {★}) × A × ℕ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedTs {
    pub alphabet: Alphabet,
    pub states: Vec<String>,
    pub trans: Vec<Vec<WtsEdge>>,
    pub initial: usize,
}

impl WeightedTs {
    pub fn new(alphabet: Alphabet, states: Vec<String>, trans: Vec<Vec<WtsEdge>>, initial: usize) -> Self {
        let trans = trans.into_iter().map(normalize_set).collect();
        WeightedTs { alphabet, states, trans, initial }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Deterministic automaton with acceptance on transitions:
/// `Y → (Y × 2)^A`. A `None` entry is a totality violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    pub alphabet: Alphabet,
    pub states: Vec<String>,
    pub delta: Vec<Vec<Option<(usize, bool)>>>,
    pub initial: usize,
}

impl Dfa {
    /// Panics if `delta(y, a)` is undefined; callers validate first.
    pub fn step(&self, y: usize, a: usize) -> (usize, bool) {
        self.delta[y][a].expect("DFA transition function is not total")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Single-state DFA that accepts (`accept = true`) or rejects every word.
    pub fn constant(alphabet: Alphabet, accept: bool) -> Dfa {
        let row = vec![Some((0, accept)); alphabet.len()];
        Dfa { alphabet, states: vec!["y".into()], delta: vec![row], initial: 0 }
    }

    /// Fills undefined transitions with a fresh rejecting sink state.
    pub fn complete_with_sink(&self, sink_name: &str) -> Result<Dfa, ModelError> {
        if self.delta.iter().all(|row| row.iter().all(Option::is_some)) {
            return Ok(self.clone());
        }
        if self.states.iter().any(|s| s == sink_name) {
            return Err(ModelError::InvalidParameter(format!("sink name `{sink_name}` is taken")));
        }
        let sink = self.states.len();
        let mut states = self.states.clone();
        states.push(sink_name.to_string());
        let mut delta: Vec<Vec<Option<(usize, bool)>>> = self
            .delta
            .iter()
            .map(|row| row.iter().map(|e| Some(e.unwrap_or((sink, false)))).collect())
            .collect();
        delta.push(vec![Some((sink, false)); self.alphabet.len()]);
        Ok(Dfa { alphabet: self.alphabet.clone(), states, delta, initial: self.initial })
    }

    /// The same automaton viewed as an NFA with singleton transition sets.
    pub fn to_nfa(&self) -> Nfa {
        let delta = self
            .delta
            .iter()
            .map(|row| row.iter().map(|e| e.iter().copied().collect()).collect())
            .collect();
        Nfa { alphabet: self.alphabet.clone(), states: self.states.clone(), delta, initial: self.initial }
    }
}

/// Nondeterministic automaton: `Y → P_f(Y × 2)^A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    pub alphabet: Alphabet,
    pub states: Vec<String>,
    pub delta: Vec<Vec<Vec<(usize, bool)>>>,
    pub initial: usize,
}

impl Nfa {
    pub fn new(alphabet: Alphabet, states: Vec<String>, delta: Vec<Vec<Vec<(usize, bool)>>>, initial: usize) -> Self {
        let delta = delta.into_iter().map(|row| row.into_iter().map(normalize_set).collect()).collect();
        Nfa { alphabet, states, delta, initial }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Deterministic transducer emitting a weight in `[M]`: `Y → (Y × [M])^A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewardMachine {
    pub alphabet: Alphabet,
    pub states: Vec<String>,
    pub bound: u64,
    pub delta: Vec<Vec<Option<(usize, u64)>>>,
    pub initial: usize,
}

impl RewardMachine {
    pub fn step(&self, y: usize, a: usize) -> (usize, u64) {
        self.delta[y][a].expect("reward machine transition function is not total")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// One element `(y', b, n)` of a weighted Mealy transition set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WmmEdge {
    pub target: usize,
    pub accept: bool,
    pub weight: u64,
}

/// Weighted Mealy machine: `Y → P_f(Y × 2 × ℕ)^A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedMealy {
    pub alphabet: Alphabet,
    pub states: Vec<String>,
    pub delta: Vec<Vec<Vec<WmmEdge>>>,
    pub initial: usize,
}

impl WeightedMealy {
    pub fn new(alphabet: Alphabet, states: Vec<String>, delta: Vec<Vec<Vec<WmmEdge>>>, initial: usize) -> Self {
        let delta = delta.into_iter().map(|row| row.into_iter().map(normalize_set).collect()).collect();
        WeightedMealy { alphabet, states, delta, initial }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Forgets the weights.
    pub fn flag_projection(&self) -> Nfa {
        let delta = self
            .delta
            .iter()
            .map(|row| row.iter().map(|set| set.iter().map(|e| (e.target, e.accept)).collect()).collect())
            .collect();
        Nfa::new(self.alphabet.clone(), self.states.clone(), delta, self.initial)
    }
}

/// Any model that can appear in a JSON document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Model {
    Mc(LabeledMc),
    Mrm(MarkovRewardModel),
    Ntmc(NonTerminatingMc),
    Wts(WeightedTs),
    Dfa(Dfa),
    Nfa(Nfa),
    Rm(RewardMachine),
    Wmm(WeightedMealy),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Mc(_) => "mc",
            Model::Mrm(_) => "mrm",
            Model::Ntmc(_) => "ntmc",
            Model::Wts(_) => "wts",
            Model::Dfa(_) => "dfa",
            Model::Nfa(_) => "nfa",
            Model::Rm(_) => "rm",
            Model::Wmm(_) => "wmm",
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        match self {
            Model::Mc(m) => &m.alphabet,
            Model::Mrm(m) => &m.chain.alphabet,
            Model::Ntmc(m) => &m.alphabet,
            Model::Wts(m) => &m.alphabet,
            Model::Dfa(m) => &m.alphabet,
            Model::Nfa(m) => &m.alphabet,
            Model::Rm(m) => &m.alphabet,
            Model::Wmm(m) => &m.alphabet,
        }
    }

    pub fn states(&self) -> &[String] {
        match self {
            Model::Mc(m) => &m.states,
            Model::Mrm(m) => &m.chain.states,
            Model::Ntmc(m) => &m.states,
            Model::Wts(m) => &m.states,
            Model::Dfa(m) => &m.states,
            Model::Nfa(m) => &m.states,
            Model::Rm(m) => &m.states,
            Model::Wmm(m) => &m.states,
        }
    }

    pub fn initial(&self) -> usize {
        match self {
            Model::Mc(m) => m.initial,
            Model::Mrm(m) => m.chain.initial,
            Model::Ntmc(m) => m.initial,
            Model::Wts(m) => m.initial,
            Model::Dfa(m) => m.initial,
            Model::Nfa(m) => m.initial,
            Model::Rm(m) => m.initial,
            Model::Wmm(m) => m.initial,
        }
    }
}

/// Fails with `AlphabetMismatch` unless both alphabets list the same
/// symbols in the same order.
pub fn same_alphabet(left: &Alphabet, right: &Alphabet) -> Result<(), ModelError> {
    if left.symbols() == right.symbols() {
        Ok(())
    } else {
        Err(ModelError::AlphabetMismatch(format!(
            "[{}] vs [{}]",
            left.symbols().join(", "),
            right.symbols().join(", ")
        )))
    }
}

/// Fails with `Invalid` if the model has violations.
pub fn ensure_valid<M: Validate + ?Sized>(model: &M) -> Result<(), ModelError> {
    let violations = model.violations();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ModelError::Invalid(violations))
    }
}
