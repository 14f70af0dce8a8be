//! Inputs for the solver benchmarks in `benches/`.

use coprod_core::fixtures;
use coprod_core::lawcheck::random;
use coprod_core::products::{product_mc_dfa, product_wts_nfa, ProductMc, ProductWts};

/// Random MC on `n` states against a random 4-state DFA over 3 symbols,
/// reachable pairs only.
pub fn random_reach_product(n: usize, seed: u64) -> ProductMc {
    let mut rng = random::rng(seed);
    let a = random::alphabet(3);
    let c = random::mc(&mut rng, &a, n);
    let d = random::dfa(&mut rng, &a, 4);
    product_mc_dfa(&c, &d).expect("same alphabet")
}

pub fn random_tropical_product(n: usize, seed: u64) -> ProductWts {
    let mut rng = random::rng(seed);
    let a = random::alphabet(3);
    let c = random::wts(&mut rng, &a, n);
    let d = random::nfa(&mut rng, &a, 4);
    product_wts_nfa(&c, &d).expect("same alphabet")
}

/// The compiled rover grid against its requirement.
pub fn grid_product() -> ProductMc {
    product_mc_dfa(&fixtures::fig2_grid_mc(), &fixtures::fig2_dfa()).expect("fixtures agree")
}
