//! Worked examples embedded in the library: the rover chain, its
//! requirements, the rover grid programs and the travelling example.

use crate::frontend::json::parse_model;
use crate::frontend::{compile_probabilistic, parse_program, CompileOptions, ProbMode};
use crate::models::{
    Dfa, LabeledMc, MarkovRewardModel, Model, Nfa, NonTerminatingMc, RewardMachine, WeightedMealy, WeightedTs,
};

/// JSON model fixtures, by name.
pub const MODEL_NAMES: [&str; 8] = [
    "fig4-mc",
    "fig4-mrm",
    "fig4-rm",
    "fig2-dfa",
    "fig3-dfa",
    "fig5-nfa",
    "travel-wts",
    "travel-wmm",
];

/// `.qtp` program fixtures, by name.
pub const PROGRAM_NAMES: [&str; 3] = ["fig2-grid", "fig3-reactive", "travel"];

/// Source text of a fixture, either a JSON model or a `.qtp` program.
pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig4-mc" => include_str!("../fixtures/fig4-mc.json"),
        "fig4-mrm" => include_str!("../fixtures/fig4-mrm.json"),
        "fig4-rm" => include_str!("../fixtures/fig4-rm.json"),
        "fig2-dfa" => include_str!("../fixtures/fig2-dfa.json"),
        "fig3-dfa" => include_str!("../fixtures/fig3-dfa.json"),
        "fig5-nfa" => include_str!("../fixtures/fig5-nfa.json"),
        "travel-wts" => include_str!("../fixtures/travel-wts.json"),
        "travel-wmm" => include_str!("../fixtures/travel-wmm.json"),
        "fig2-grid" => include_str!("../fixtures/fig2-grid.qtp"),
        "fig3-reactive" => include_str!("../fixtures/fig3-reactive.qtp"),
        "travel" => include_str!("../fixtures/travel.qtp"),
        _ => return None,
    })
}

/// Parses a JSON model fixture; panics on unknown names, which are a
/// programming error.
pub fn model(name: &str) -> Model {
    let text = source(name).unwrap_or_else(|| panic!("unknown fixture `{name}`"));
    parse_model(text).unwrap_or_else(|e| panic!("fixture `{name}` is malformed: {e}"))
}

macro_rules! getter {
    ($fn:ident, $name:literal, $variant:ident, $ty:ty) => {
        pub fn $fn() -> $ty {
            match model($name) {
                Model::$variant(m) => m,
                other => panic!("fixture `{}` has kind {}", $name, other.kind()),
            }
        }
    };
}

getter!(fig4_mc, "fig4-mc", Mc, LabeledMc);
getter!(fig4_mrm, "fig4-mrm", Mrm, MarkovRewardModel);
getter!(fig4_rm, "fig4-rm", Rm, RewardMachine);
getter!(fig2_dfa, "fig2-dfa", Dfa, Dfa);
getter!(fig3_dfa, "fig3-dfa", Dfa, Dfa);
getter!(fig5_nfa, "fig5-nfa", Nfa, Nfa);
getter!(travel_wts, "travel-wts", Wts, WeightedTs);
getter!(travel_wmm, "travel-wmm", Wmm, WeightedMealy);

/// The rover grid program compiled to a terminating MC.
pub fn fig2_grid_mc() -> LabeledMc {
    match compile_fixture("fig2-grid", ProbMode::Terminating) {
        Model::Mc(m) => m,
        other => panic!("fig2-grid compiled to {}", other.kind()),
    }
}

/// The reactive rover program compiled to a never-terminating MC.
pub fn fig3_ntmc() -> NonTerminatingMc {
    match compile_fixture("fig3-reactive", ProbMode::Reactive) {
        Model::Ntmc(m) => m,
        other => panic!("fig3-reactive compiled to {}", other.kind()),
    }
}

fn compile_fixture(name: &str, mode: ProbMode) -> Model {
    let text = source(name).unwrap_or_else(|| panic!("unknown fixture `{name}`"));
    let program = parse_program(text).unwrap_or_else(|e| panic!("fixture `{name}` does not parse: {e}"));
    compile_probabilistic(&program, mode, CompileOptions::default())
        .unwrap_or_else(|e| panic!("fixture `{name}` does not compile: {e}"))
        .model
}
