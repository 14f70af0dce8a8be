use std::collections::HashSet;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use super::{
    Dfa, LabeledMc, MarkovRewardModel, Model, Nfa, NonTerminatingMc, RewardMachine, Succ, WeightedMealy,
    WeightedTs, TARGET,
};
use crate::domains::{rat_sum, Rational};

/// One invariant violation with its state/symbol coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbol: Option<String>,
}

impl Violation {
    fn global(message: impl Into<String>) -> Self {
        Violation { message: message.into(), state: None, symbol: None }
    }

    fn at(message: impl Into<String>, state: &str) -> Self {
        Violation { message: message.into(), state: Some(state.to_string()), symbol: None }
    }

    fn at_symbol(message: impl Into<String>, state: &str, symbol: &str) -> Self {
        Violation { message: message.into(), state: Some(state.to_string()), symbol: Some(symbol.to_string()) }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.state, &self.symbol) {
            (Some(s), Some(a)) => write!(f, "{} at state {s}, symbol {a}", self.message),
            (Some(s), None) => write!(f, "{} at state {s}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

pub trait Validate {
    /// All invariant violations; empty means valid.
    fn violations(&self) -> Vec<Violation>;
}

pub fn validate(model: &Model) -> Result<(), Vec<Violation>> {
    let v = match model {
        Model::Mc(m) => m.violations(),
        Model::Mrm(m) => m.violations(),
        Model::Ntmc(m) => m.violations(),
        Model::Wts(m) => m.violations(),
        Model::Dfa(m) => m.violations(),
        Model::Nfa(m) => m.violations(),
        Model::Rm(m) => m.violations(),
        Model::Wmm(m) => m.violations(),
    };
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

fn check_states(states: &[String], initial: usize, rows: usize, out: &mut Vec<Violation>) {
    if states.is_empty() {
        out.push(Violation::global("state set is empty"));
    }
    let mut seen = HashSet::new();
    for s in states {
        if s.is_empty() || s == TARGET {
            out.push(Violation::global(format!("reserved or empty state name `{s}`")));
        }
        if !seen.insert(s.as_str()) {
            out.push(Violation::at("duplicate state", s));
        }
    }
    if initial >= states.len() && !states.is_empty() {
        out.push(Violation::global("initial state out of range"));
    }
    if rows != states.len() {
        out.push(Violation::global(format!("{rows} transition rows for {} states", states.len())));
    }
}

fn check_distribution<K>(
    row: &[(K, Rational)],
    state: &str,
    in_range: impl Fn(&K) -> bool,
    out: &mut Vec<Violation>,
) {
    for (k, p) in row {
        if !in_range(k) {
            out.push(Violation::at("successor out of range", state));
        }
        if *p <= Rational::zero() || *p > Rational::one() {
            out.push(Violation::at(format!("probability {p} outside (0,1]"), state));
        }
    }
    let total = rat_sum(row.iter().map(|(_, p)| p));
    if !total.is_one() {
        out.push(Violation::at(format!("row sum ≠ 1 (is {total})"), state));
    }
}

fn check_labels(label: &[usize], states: &[String], alphabet_len: usize, out: &mut Vec<Violation>) {
    if label.len() != states.len() {
        out.push(Violation::global("label map is not total"));
    }
    for (s, &a) in states.iter().zip(label) {
        if a >= alphabet_len {
            out.push(Violation::at("label out of alphabet", s));
        }
    }
}

impl Validate for LabeledMc {
    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_states(&self.states, self.initial, self.trans.len(), &mut out);
        check_labels(&self.label, &self.states, self.alphabet.len(), &mut out);
        let n = self.states.len();
        for (s, row) in self.states.iter().zip(&self.trans) {
            check_distribution(row, s, |k| matches!(k, Succ::Target) || matches!(k, Succ::State(i) if *i < n), &mut out);
        }
        out
    }
}

impl Validate for MarkovRewardModel {
    fn violations(&self) -> Vec<Violation> {
        let mut out = self.chain.violations();
        if self.reward.len() != self.chain.states.len() {
            out.push(Violation::global("reward map is not total"));
        }
        out
    }
}

impl Validate for NonTerminatingMc {
    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_states(&self.states, self.initial, self.trans.len(), &mut out);
        check_labels(&self.label, &self.states, self.alphabet.len(), &mut out);
        let n = self.states.len();
        for (s, row) in self.states.iter().zip(&self.trans) {
            check_distribution(row, s, |k| *k < n, &mut out);
        }
        out
    }
}

impl Validate for WeightedTs {
    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_states(&self.states, self.initial, self.trans.len(), &mut out);
        let n = self.states.len();
        for (s, row) in self.states.iter().zip(&self.trans) {
            for e in row {
                if matches!(e.succ, Succ::State(i) if i >= n) {
                    out.push(Violation::at("successor out of range", s));
                }
                if e.symbol >= self.alphabet.len() {
                    out.push(Violation::at("symbol out of alphabet", s));
                }
            }
        }
        out
    }
}

impl Validate for Dfa {
    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_states(&self.states, self.initial, self.delta.len(), &mut out);
        let n = self.states.len();
        for (s, row) in self.states.iter().zip(&self.delta) {
            if row.len() != self.alphabet.len() {
                out.push(Violation::at("delta row does not cover the alphabet", s));
            }
            for (a, entry) in row.iter().enumerate() {
                let sym = self.alphabet.symbols().get(a).map(String::as_str).unwrap_or("?");
                match entry {
                    None => out.push(Violation::at_symbol("delta not total", s, sym)),
                    Some((t, _)) if *t >= n => out.push(Violation::at_symbol("successor out of range", s, sym)),
                    Some(_) => {}
                }
            }
        }
        out
    }
}

impl Validate for Nfa {
    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_states(&self.states, self.initial, self.delta.len(), &mut out);
        let n = self.states.len();
        for (s, row) in self.states.iter().zip(&self.delta) {
            if row.len() != self.alphabet.len() {
                out.push(Violation::at("delta row does not cover the alphabet", s));
            }
            for (a, set) in row.iter().enumerate() {
                if set.iter().any(|(t, _)| *t >= n) {
                    out.push(Violation::at_symbol("successor out of range", s, self.alphabet.symbol(a)));
                }
            }
        }
        out
    }
}

impl Validate for RewardMachine {
    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_states(&self.states, self.initial, self.delta.len(), &mut out);
        if self.bound == 0 {
            out.push(Violation::global("weight bound M must be at least 1"));
        }
        let n = self.states.len();
        for (s, row) in self.states.iter().zip(&self.delta) {
            if row.len() != self.alphabet.len() {
                out.push(Violation::at("delta row does not cover the alphabet", s));
            }
            for (a, entry) in row.iter().enumerate() {
                let sym = self.alphabet.symbols().get(a).map(String::as_str).unwrap_or("?");
                match entry {
                    None => out.push(Violation::at_symbol("delta not total", s, sym)),
                    Some((t, j)) => {
                        if *t >= n {
                            out.push(Violation::at_symbol("successor out of range", s, sym));
                        }
                        if *j == 0 || *j > self.bound {
                            out.push(Violation::at_symbol(format!("weight {j} outside 1..{}", self.bound), s, sym));
                        }
                    }
                }
            }
        }
        out
    }
}

impl Validate for WeightedMealy {
    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_states(&self.states, self.initial, self.delta.len(), &mut out);
        let n = self.states.len();
        for (s, row) in self.states.iter().zip(&self.delta) {
            if row.len() != self.alphabet.len() {
                out.push(Violation::at("delta row does not cover the alphabet", s));
            }
            for (a, set) in row.iter().enumerate() {
                if set.iter().any(|e| e.target >= n) {
                    out.push(Violation::at_symbol("successor out of range", s, self.alphabet.symbol(a)));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::rat;
    use crate::models::Alphabet;

    fn tiny_mc(p: Rational) -> LabeledMc {
        LabeledMc::new(
            Alphabet::new(["a"]).unwrap(),
            vec!["x".into()],
            vec![0],
            vec![vec![(Succ::Target, p)]],
            0,
        )
    }

    #[test]
    fn row_sum_violation_names_the_state() {
        let v = tiny_mc(rat(9, 10)).violations();
        assert_eq!(v.len(), 1);
        assert!(v[0].message.starts_with("row sum ≠ 1"));
        assert_eq!(v[0].state.as_deref(), Some("x"));
        assert!(tiny_mc(rat(1, 1)).violations().is_empty());
    }

    #[test]
    fn missing_delta_entry_is_reported() {
        let d = Dfa {
            alphabet: Alphabet::new(["a", "b"]).unwrap(),
            states: vec!["y".into()],
            delta: vec![vec![Some((0, true)), None]],
            initial: 0,
        };
        let v = d.violations();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].message, "delta not total");
        assert_eq!(v[0].symbol.as_deref(), Some("b"));
        let completed = d.complete_with_sink("sink").unwrap();
        assert!(completed.violations().is_empty());
        assert_eq!(completed.step(0, 1), (1, false));
    }

    #[test]
    fn reward_machine_weight_range() {
        let rm = RewardMachine {
            alphabet: Alphabet::new(["a"]).unwrap(),
            states: vec!["y".into()],
            bound: 2,
            delta: vec![vec![Some((0, 3))]],
            initial: 0,
        };
        assert_eq!(rm.violations().len(), 1);
    }
}
