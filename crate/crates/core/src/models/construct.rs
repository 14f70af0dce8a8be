//! Requirement constructors: cost-bound DFAs, DFA intersection, reward
//! machine ⊗α cost DFA, and the terminating-to-never-terminating translation.

use num_traits::One;

use super::{
    ensure_valid, pair_name, same_alphabet, Alphabet, Dfa, LabeledMc, ModelError, NonTerminatingMc,
    RewardMachine, Succ,
};
use crate::products::laws::{alpha, Mutation};

/// Name of the materialized ⊥ state of a cost-bound DFA.
pub const BOTTOM_STATE: &str = "bot";
/// Reserved end-of-trace symbol (and absorbing state) added by
/// [`translate_to_nonterminating`].
pub const END_SYMBOL: &str = "*end";
/// Flag components of translated DFA states.
pub const FLAG_OFF: &str = "0";
pub const FLAG_ON: &str = "1";

/// DFA over `[M]` with states `1..=N` and `bot`, accepting exactly the words
/// whose sum is below `N`. State `i` sits at index `i − 1`; `bot` at `N`.
pub fn make_cost_bound_dfa(n: u64, m: u64) -> Result<Dfa, ModelError> {
    if n == 0 || m == 0 {
        return Err(ModelError::InvalidParameter(format!("cost bound needs N ≥ 1 and M ≥ 1 (got N={n}, M={m})")));
    }
    let alphabet = Alphabet::weights(m)?;
    let bot = n as usize;
    let mut states: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    states.push(BOTTOM_STATE.to_string());
    let mut delta = Vec::with_capacity(bot + 1);
    for i in 1..=n {
        let row = (1..=m)
            .map(|j| if i > j { Some(((i - j - 1) as usize, true)) } else { Some((bot, false)) })
            .collect();
        delta.push(row);
    }
    delta.push(vec![Some((bot, false)); m as usize]);
    Ok(Dfa { alphabet, states, delta, initial: (n - 1) as usize })
}

/// Synchronous product; a transition accepts iff both components accept.
pub fn dfa_intersect(d1: &Dfa, d2: &Dfa) -> Result<Dfa, ModelError> {
    same_alphabet(&d1.alphabet, &d2.alphabet)?;
    ensure_valid(d1)?;
    ensure_valid(d2)?;
    let n2 = d2.len();
    let mut states = Vec::with_capacity(d1.len() * n2);
    let mut delta = Vec::with_capacity(d1.len() * n2);
    for (y1, s1) in d1.states.iter().enumerate() {
        for (y2, s2) in d2.states.iter().enumerate() {
            states.push(pair_name(s1, s2));
            let row = (0..d1.alphabet.len())
                .map(|a| {
                    let (t1, b1) = d1.step(y1, a);
                    let (t2, b2) = d2.step(y2, a);
                    Some((t1 * n2 + t2, b1 && b2))
                })
                .collect();
            delta.push(row);
        }
    }
    Ok(Dfa { alphabet: d1.alphabet.clone(), states, delta, initial: d1.initial * n2 + d2.initial })
}

pub fn product_rm_costdfa(rm: &RewardMachine, cd: &Dfa) -> Result<Dfa, ModelError> {
    product_rm_costdfa_with(rm, cd, None)
}

/// `rm ⊗α cd` over the alphabet of `rm`, on states `Y × Z`.
pub fn product_rm_costdfa_with(rm: &RewardMachine, cd: &Dfa, mutation: Option<Mutation>) -> Result<Dfa, ModelError> {
    ensure_valid(rm)?;
    ensure_valid(cd)?;
    let expected = Alphabet::weights(rm.bound)?;
    if cd.alphabet.symbols() != expected.symbols() {
        return Err(ModelError::AlphabetMismatch(format!(
            "cost DFA alphabet must be [{}] = 1..{}",
            rm.bound, rm.bound
        )));
    }
    let nz = cd.len();
    let cd_rows: Vec<Vec<(usize, bool)>> =
        (0..nz).map(|z| (0..cd.alphabet.len()).map(|b| cd.step(z, b)).collect()).collect();
    let mut states = Vec::with_capacity(rm.len() * nz);
    let mut delta = Vec::with_capacity(rm.len() * nz);
    for (y, ys) in rm.states.iter().enumerate() {
        let rm_row: Vec<(usize, u64)> = (0..rm.alphabet.len()).map(|a| rm.step(y, a)).collect();
        for (z, zs) in cd.states.iter().enumerate() {
            states.push(pair_name(ys, zs));
            let row = alpha(&rm_row, &cd_rows[z], mutation)
                .into_iter()
                .map(|((y2, z2), t)| Some((y2 * nz + z2, t)))
                .collect();
            delta.push(row);
        }
    }
    Ok(Dfa { alphabet: rm.alphabet.clone(), states, delta, initial: rm.initial * nz + cd.initial })
}

/// Adds an absorbing end state labelled with a fresh end symbol to `c`, and
/// defers the acceptance flags of `d` to that symbol: states of the new DFA
/// are `(y, b)` at index `2y + b`, initial `(y₀, 0)`.
pub fn translate_to_nonterminating(c: &LabeledMc, d: &Dfa) -> Result<(NonTerminatingMc, Dfa), ModelError> {
    same_alphabet(&c.alphabet, &d.alphabet)?;
    ensure_valid(c)?;
    ensure_valid(d)?;
    if c.alphabet.index_of(END_SYMBOL).is_some() {
        return Err(ModelError::ReservedSymbol(END_SYMBOL.to_string()));
    }
    if c.states.iter().any(|s| s == END_SYMBOL) {
        return Err(ModelError::InvalidParameter(format!("state name `{END_SYMBOL}` is reserved")));
    }
    let mut symbols = c.alphabet.symbols().to_vec();
    symbols.push(END_SYMBOL.to_string());
    let alphabet = Alphabet::new(symbols)?;
    let end_sym = c.alphabet.len();
    let end = c.len();

    let mut states = c.states.clone();
    states.push(END_SYMBOL.to_string());
    let mut label = c.label.clone();
    label.push(end_sym);
    let mut trans: Vec<Vec<(usize, _)>> = c
        .trans
        .iter()
        .map(|row| {
            row.iter()
                .map(|(s, p)| match s {
                    Succ::State(x) => (*x, p.clone()),
                    Succ::Target => (end, p.clone()),
                })
                .collect()
        })
        .collect();
    trans.push(vec![(end, num_rational::BigRational::one())]);
    let mc = NonTerminatingMc::new(alphabet.clone(), states, label, trans, c.initial);

    let mut dstates = Vec::with_capacity(2 * d.len());
    let mut delta = Vec::with_capacity(2 * d.len());
    for (y, name) in d.states.iter().enumerate() {
        for b in [false, true] {
            dstates.push(pair_name(name, if b { FLAG_ON } else { FLAG_OFF }));
            let mut row: Vec<Option<(usize, bool)>> = (0..d.alphabet.len())
                .map(|a| {
                    let (y2, b2) = d.step(y, a);
                    Some((2 * y2 + b2 as usize, false))
                })
                .collect();
            row.push(Some((2 * y + b as usize, b)));
            delta.push(row);
        }
    }
    let dfa = Dfa { alphabet, states: dstates, delta, initial: 2 * d.initial };
    Ok((mc, dfa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Validate;

    #[test]
    fn cost_bound_dfa_formula() {
        let d = make_cost_bound_dfa(5, 3).unwrap();
        assert!(d.violations().is_empty());
        assert_eq!(d.states[d.initial], "5");
        let idx = |name: &str| d.state_index(name).unwrap();
        let sym = |j: &str| d.alphabet.index_of(j).unwrap();
        assert_eq!(d.step(idx("5"), sym("3")), (idx("2"), true));
        assert_eq!(d.step(idx("2"), sym("3")), (idx(BOTTOM_STATE), false));
        assert_eq!(d.step(idx(BOTTOM_STATE), sym("1")), (idx(BOTTOM_STATE), false));

        let d = make_cost_bound_dfa(1, 1).unwrap();
        assert_eq!(d.step(0, 0), (1, false));
        assert!(make_cost_bound_dfa(0, 2).is_err());
        assert!(make_cost_bound_dfa(2, 0).is_err());
    }

    #[test]
    fn translated_models_validate() {
        let c = crate::fixtures::fig4_mc();
        let d = crate::fixtures::fig2_dfa();
        let (mc, dfa) = translate_to_nonterminating(&c, &d).unwrap();
        assert!(mc.violations().is_empty());
        assert!(dfa.violations().is_empty());
        assert_eq!(mc.len(), c.len() + 1);
        assert_eq!(dfa.len(), 2 * d.len());

        let mut symbols = c.alphabet.symbols().to_vec();
        symbols.push(END_SYMBOL.into());
        let mut clash = c.clone();
        clash.alphabet = Alphabet::new(symbols).unwrap();
        let mut dclash = d.clone();
        dclash.alphabet = clash.alphabet.clone();
        for row in &mut dclash.delta {
            row.push(Some((0, false)));
        }
        assert_eq!(
            translate_to_nonterminating(&clash, &dclash).unwrap_err(),
            ModelError::ReservedSymbol(END_SYMBOL.into())
        );
    }
}
