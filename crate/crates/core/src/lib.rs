//! Compositional quantitative verification via coalgebraic products.
//!
//! A system coalgebra and a requirement automaton are combined by a
//! distributive law into a product coalgebra; its least fixed point under a
//! modality gives the quantitative answer (reachability probability,
//! expected reward, minimal weight).

pub mod domains;
pub mod fixtures;
pub mod frontend;
pub mod lawcheck;
pub mod models;
pub mod oracle;
pub mod products;
pub mod solvers;

pub use domains::{ExtNat, ExtRational, ProbReward, Rational};
pub use models::{
    Alphabet, Dfa, LabeledMc, MarkovRewardModel, Model, ModelError, Nfa, NonTerminatingMc, RewardMachine, Succ,
    WeightedMealy, WeightedTs,
};
