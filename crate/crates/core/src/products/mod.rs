//! Product coalgebras for the six system/requirement pairings, built by
//! applying the distributive laws of [`laws`] at every state pair.

pub mod laws;
pub mod modality;

use std::collections::VecDeque;

use crate::domains::Rational;
use crate::models::{
    ensure_valid, normalize_dist, normalize_set, pair_name, same_alphabet, Dfa, LabeledMc, MarkovRewardModel,
    ModelError, Nfa, NonTerminatingMc, Succ, WeightedMealy, WeightedTs,
};
pub use laws::{Mutation, ProdSucc};

/// Serialized names of the two flag sinks.
pub const ACCEPT_SINK: &str = "#accept";
pub const REJECT_SINK: &str = "#reject";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductOptions {
    /// Keep only pairs reachable from (initial, initial).
    pub reachable_only: bool,
    pub mutation: Option<Mutation>,
}

impl Default for ProductOptions {
    fn default() -> Self {
        ProductOptions { reachable_only: true, mutation: None }
    }
}

impl ProductOptions {
    /// All pairs, no mutation: the configuration used by the law checks.
    pub fn full() -> Self {
        ProductOptions { reachable_only: false, mutation: None }
    }
}

/// The pair states of a product, in cartesian order (x major), possibly
/// filtered to the reachable ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSpace {
    pub pairs: Vec<(usize, usize)>,
    pub names: Vec<String>,
    pub initial: usize,
    ny: usize,
    slot: Vec<Option<usize>>,
}

impl ProductSpace {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn index_of(&self, x: usize, y: usize) -> Option<usize> {
        self.slot.get(x * self.ny + y).copied().flatten()
    }
}

/// Full distribution over pair states and both flag sinks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductMc {
    pub space: ProductSpace,
    pub rows: Vec<Vec<(ProdSucc, Rational)>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductRewardMc {
    pub space: ProductSpace,
    pub rows: Vec<Vec<(ProdSucc, Rational)>>,
    pub step_reward: Vec<u64>,
}

/// Rows never mention `ProdSucc::Reject`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsorbingProductMc {
    pub space: ProductSpace,
    pub rows: Vec<Vec<(ProdSucc, Rational)>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductWts {
    pub space: ProductSpace,
    pub rows: Vec<Vec<(ProdSucc, u64)>>,
}

/// Products whose rows are probability distributions.
pub trait ProbabilisticProduct {
    fn space(&self) -> &ProductSpace;
    fn rows(&self) -> &[Vec<(ProdSucc, Rational)>];
}

impl ProbabilisticProduct for ProductMc {
    fn space(&self) -> &ProductSpace {
        &self.space
    }
    fn rows(&self) -> &[Vec<(ProdSucc, Rational)>] {
        &self.rows
    }
}

impl ProbabilisticProduct for ProductRewardMc {
    fn space(&self) -> &ProductSpace {
        &self.space
    }
    fn rows(&self) -> &[Vec<(ProdSucc, Rational)>] {
        &self.rows
    }
}

impl ProbabilisticProduct for AbsorbingProductMc {
    fn space(&self) -> &ProductSpace {
        &self.space
    }
    fn rows(&self) -> &[Vec<(ProdSucc, Rational)>] {
        &self.rows
    }
}

type PairRow<W> = Vec<(ProdSucc<(usize, usize)>, W)>;

/// Explores pairs (all, or reachable from `init`), then re-indexes rows.
fn build<W, F>(
    xs: &[String],
    ys: &[String],
    init: (usize, usize),
    reachable_only: bool,
    step: F,
) -> (ProductSpace, Vec<Vec<(ProdSucc, W)>>)
where
    F: Fn(usize, usize) -> PairRow<W>,
{
    let (nx, ny) = (xs.len(), ys.len());
    let mut raw: Vec<Option<PairRow<W>>> = (0..nx * ny).map(|_| None).collect();
    if reachable_only {
        let mut queue = VecDeque::from([init]);
        raw[init.0 * ny + init.1] = Some(step(init.0, init.1));
        while let Some((x, y)) = queue.pop_front() {
            let succs: Vec<(usize, usize)> = raw[x * ny + y]
                .as_ref()
                .expect("explored")
                .iter()
                .filter_map(|(s, _)| if let ProdSucc::State(p) = s { Some(*p) } else { None })
                .collect();
            for (x2, y2) in succs {
                let k = x2 * ny + y2;
                if raw[k].is_none() {
                    raw[k] = Some(step(x2, y2));
                    queue.push_back((x2, y2));
                }
            }
        }
    } else {
        for x in 0..nx {
            for y in 0..ny {
                raw[x * ny + y] = Some(step(x, y));
            }
        }
    }
    let mut slot = vec![None; nx * ny];
    let mut pairs = Vec::new();
    for (k, r) in raw.iter().enumerate() {
        if r.is_some() {
            slot[k] = Some(pairs.len());
            pairs.push((k / ny, k % ny));
        }
    }
    let names = pairs.iter().map(|&(x, y)| pair_name(&xs[x], &ys[y])).collect();
    let rows = raw
        .into_iter()
        .flatten()
        .map(|row| {
            row.into_iter()
                .map(|(s, w)| (s.map(|(x, y)| slot[x * ny + y].expect("successor explored")), w))
                .collect()
        })
        .collect();
    let initial = slot[init.0 * ny + init.1].expect("initial pair present");
    (ProductSpace { pairs, names, initial, ny, slot }, rows)
}

fn dfa_rows(d: &Dfa) -> Vec<Vec<(usize, bool)>> {
    (0..d.len()).map(|y| (0..d.alphabet.len()).map(|a| d.step(y, a)).collect()).collect()
}

pub fn product_mc_dfa(c: &LabeledMc, d: &Dfa) -> Result<ProductMc, ModelError> {
    product_mc_dfa_with(c, d, ProductOptions::default())
}

pub fn product_mc_dfa_with(c: &LabeledMc, d: &Dfa, opts: ProductOptions) -> Result<ProductMc, ModelError> {
    same_alphabet(&c.alphabet, &d.alphabet)?;
    ensure_valid(c)?;
    ensure_valid(d)?;
    let drows = dfa_rows(d);
    let (space, rows) = build(&c.states, &d.states, (c.initial, d.initial), opts.reachable_only, |x, y| {
        laws::mc_dfa(&c.trans[x], c.label[x], &drows[y], opts.mutation)
    });
    let rows = rows.into_iter().map(normalize_dist).collect();
    Ok(ProductMc { space, rows })
}

pub fn product_mrm_dfa(c: &MarkovRewardModel, d: &Dfa) -> Result<ProductRewardMc, ModelError> {
    product_mrm_dfa_with(c, d, ProductOptions::default())
}

pub fn product_mrm_dfa_with(
    c: &MarkovRewardModel,
    d: &Dfa,
    opts: ProductOptions,
) -> Result<ProductRewardMc, ModelError> {
    let chain = &c.chain;
    same_alphabet(&chain.alphabet, &d.alphabet)?;
    ensure_valid(c)?;
    ensure_valid(d)?;
    let drows = dfa_rows(d);
    let (space, rows) = build(&chain.states, &d.states, (chain.initial, d.initial), opts.reachable_only, |x, y| {
        laws::mrm_dfa(&chain.trans[x], c.reward[x], chain.label[x], &drows[y], opts.mutation).0
    });
    let rows = rows.into_iter().map(normalize_dist).collect();
    let step_reward = space
        .pairs
        .iter()
        .map(|&(x, y)| laws::mrm_dfa(&chain.trans[x], c.reward[x], chain.label[x], &drows[y], opts.mutation).1)
        .collect();
    Ok(ProductRewardMc { space, rows, step_reward })
}

pub fn product_ntmc_dfa(c: &NonTerminatingMc, d: &Dfa) -> Result<AbsorbingProductMc, ModelError> {
    product_ntmc_dfa_with(c, d, ProductOptions::default())
}

pub fn product_ntmc_dfa_with(
    c: &NonTerminatingMc,
    d: &Dfa,
    opts: ProductOptions,
) -> Result<AbsorbingProductMc, ModelError> {
    same_alphabet(&c.alphabet, &d.alphabet)?;
    ensure_valid(c)?;
    ensure_valid(d)?;
    let drows = dfa_rows(d);
    let (space, rows) = build(&c.states, &d.states, (c.initial, d.initial), opts.reachable_only, |x, y| {
        laws::ntmc_dfa(&c.trans[x], c.label[x], &drows[y], opts.mutation)
    });
    let rows = rows.into_iter().map(normalize_dist).collect();
    Ok(AbsorbingProductMc { space, rows })
}

fn wts_rows(c: &WeightedTs) -> Vec<Vec<(Succ, usize, u64)>> {
    c.trans.iter().map(|row| row.iter().map(|e| (e.succ, e.symbol, e.weight)).collect()).collect()
}

pub fn product_wts_nfa(c: &WeightedTs, d: &Nfa) -> Result<ProductWts, ModelError> {
    product_wts_nfa_with(c, d, ProductOptions::default())
}

pub fn product_wts_nfa_with(c: &WeightedTs, d: &Nfa, opts: ProductOptions) -> Result<ProductWts, ModelError> {
    same_alphabet(&c.alphabet, &d.alphabet)?;
    ensure_valid(c)?;
    ensure_valid(d)?;
    let crows = wts_rows(c);
    let (space, rows) = build(&c.states, &d.states, (c.initial, d.initial), opts.reachable_only, |x, y| {
        laws::wts_nfa(&crows[x], &d.delta[y], opts.mutation)
    });
    let rows = rows.into_iter().map(normalize_set).collect();
    Ok(ProductWts { space, rows })
}

pub fn product_wts_wmm(c: &WeightedTs, d: &WeightedMealy) -> Result<ProductWts, ModelError> {
    product_wts_wmm_with(c, d, ProductOptions::default())
}

pub fn product_wts_wmm_with(
    c: &WeightedTs,
    d: &WeightedMealy,
    opts: ProductOptions,
) -> Result<ProductWts, ModelError> {
    same_alphabet(&c.alphabet, &d.alphabet)?;
    ensure_valid(c)?;
    ensure_valid(d)?;
    let crows = wts_rows(c);
    let drows: Vec<Vec<Vec<(usize, bool, u64)>>> = d
        .delta
        .iter()
        .map(|row| row.iter().map(|set| set.iter().map(|e| (e.target, e.accept, e.weight)).collect()).collect())
        .collect();
    let (space, rows) = build(&c.states, &d.states, (c.initial, d.initial), opts.reachable_only, |x, y| {
        laws::wts_wmm(&crows[x], &drows[y], opts.mutation)
    });
    let rows = rows.into_iter().map(normalize_set).collect();
    Ok(ProductWts { space, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::rat;
    use crate::fixtures;

    fn edge(p: &ProductMc, from: &str, to: ProdSucc<&str>) -> Option<Rational> {
        let i = p.space.names.iter().position(|n| n == from)?;
        let target = to.map(|name| p.space.names.iter().position(|n| n == name).unwrap());
        p.rows[i].iter().find(|(s, _)| *s == target).map(|(_, q)| q.clone())
    }

    #[test]
    fn fig6b_edges() {
        let p = product_mc_dfa(&fixtures::fig4_mc(), &fixtures::fig2_dfa()).unwrap();
        assert_eq!(edge(&p, "x0|y0", ProdSucc::State("x1|y0")), Some(rat(4, 5)));
        assert_eq!(edge(&p, "x0|y0", ProdSucc::State("x2|y0")), Some(rat(1, 5)));
        assert_eq!(edge(&p, "x1|y0", ProdSucc::State("x3|y2")), Some(rat(1, 1)));
        assert_eq!(edge(&p, "x2|y0", ProdSucc::State("x3|y0")), Some(rat(4, 5)));
        assert_eq!(edge(&p, "x3|y2", ProdSucc::Reject), Some(rat(1, 1)));
        assert_eq!(edge(&p, "x3|y0", ProdSucc::Accept), Some(rat(1, 1)));
    }

    #[test]
    fn rows_sum_to_one() {
        let p = product_mc_dfa_with(&fixtures::fig4_mc(), &fixtures::fig2_dfa(), ProductOptions::full()).unwrap();
        assert_eq!(p.space.len(), 5 * 4);
        for row in &p.rows {
            assert_eq!(crate::domains::rat_sum(row.iter().map(|(_, q)| q)), rat(1, 1));
        }
    }

    #[test]
    fn all_rejecting_dfa_sends_target_mass_to_reject() {
        let c = fixtures::fig4_mc();
        let d = Dfa::constant(c.alphabet.clone(), false);
        let p = product_mc_dfa(&c, &d).unwrap();
        assert!(p.rows.iter().flatten().all(|(s, _)| *s != ProdSucc::Accept));
    }

    #[test]
    fn single_target_edge_times_fig5_nfa() {
        let nfa = fixtures::fig5_nfa();
        let t = nfa.alphabet.index_of("T").unwrap();
        let c = WeightedTs::new(
            nfa.alphabet.clone(),
            vec!["x".into()],
            vec![vec![crate::models::WtsEdge { succ: Succ::Target, symbol: t, weight: 3 }]],
            0,
        );
        let p = product_wts_nfa(&c, &nfa).unwrap();
        assert_eq!(p.rows[p.space.initial], vec![(ProdSucc::Accept, 3), (ProdSucc::Reject, 3)]);
    }

    #[test]
    fn alphabet_mismatch_is_an_error() {
        let c = fixtures::fig4_mc();
        let d = Dfa::constant(crate::models::Alphabet::new(["a"]).unwrap(), true);
        assert!(matches!(product_mc_dfa(&c, &d), Err(ModelError::AlphabetMismatch(_))));
    }
}
