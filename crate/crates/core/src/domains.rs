//! Semantic domains (unit interval, extended naturals, probability/reward
//! pairs), value vectors over a state space, and a generic Kleene
//! fixed-point engine.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Index};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact fraction; always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DomainError {
    #[error("unknown domain tag `{0}` (expected prob, prob-reward or tropical)")]
    UnknownTag(String),
    #[error("state space must be non-empty")]
    EmptyStateSpace,
    #[error("malformed rational `{0}`")]
    BadRational(String),
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `num/den`, an integer, or a finite decimal such as `0.25`.
pub fn parse_rational(text: &str) -> Result<Rational, DomainError> {
    let bad = || DomainError::BadRational(text.to_string());
    let s = text.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = BigInt::from_str(frac).map_err(|_| bad())?;
        let magnitude = int_part.abs() * &scale + frac_part;
        let num = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(num, scale));
    }
    let n = BigInt::from_str(s).map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// `num/den`, or just `num` when the denominator is 1.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Decimal rendering rounded half away from zero to `digits` places.
pub fn format_decimal(r: &Rational, digits: usize) -> String {
    let negative = r.is_negative();
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = r.abs() * Rational::from_integer(scale.clone());
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let rounded = if rem * 2 >= *scaled.denom() { q + 1 } else { q };
    let (int, frac) = rounded.div_rem(&scale);
    let sign = if negative && !rounded_is_zero(&int, &frac) { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits)
    }
}

fn rounded_is_zero(int: &BigInt, frac: &BigInt) -> bool {
    int.is_zero() && frac.is_zero()
}

/// Element of ℕ ∪ {∞}. `Ord` is the numeric order (∞ largest); the
/// domain order used for fixed points is the reverse, so ∞ is bottom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtNat {
    Fin(u64),
    Inf,
}

impl ExtNat {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtNat::Fin(_))
    }

    pub fn checked_add(self, other: ExtNat) -> Option<ExtNat> {
        match (self, other) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => a.checked_add(b).map(ExtNat::Fin),
            _ => Some(ExtNat::Inf),
        }
    }
}

impl Add for ExtNat {
    type Output = ExtNat;

    /// Panics on u64 overflow of two finite summands.
    fn add(self, other: ExtNat) -> ExtNat {
        self.checked_add(other).expect("weight overflow in extended naturals")
    }
}

impl PartialOrd for ExtNat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtNat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => a.cmp(b),
            (ExtNat::Fin(_), ExtNat::Inf) => Ordering::Less,
            (ExtNat::Inf, ExtNat::Fin(_)) => Ordering::Greater,
            (ExtNat::Inf, ExtNat::Inf) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(n) => write!(f, "{n}"),
            ExtNat::Inf => write!(f, "inf"),
        }
    }
}

/// Non-negative rational or ∞; ∞ absorbs addition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtRational {
    Fin(Rational),
    Inf,
}

impl ExtRational {
    pub fn zero() -> Self {
        ExtRational::Fin(Rational::zero())
    }
}

impl Add for &ExtRational {
    type Output = ExtRational;
    fn add(self, other: &ExtRational) -> ExtRational {
        match (self, other) {
            (ExtRational::Fin(a), ExtRational::Fin(b)) => ExtRational::Fin(a + b),
            _ => ExtRational::Inf,
        }
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(match (self, other) {
            (ExtRational::Fin(a), ExtRational::Fin(b)) => a.cmp(b),
            (ExtRational::Fin(_), ExtRational::Inf) => Ordering::Less,
            (ExtRational::Inf, ExtRational::Fin(_)) => Ordering::Greater,
            (ExtRational::Inf, ExtRational::Inf) => Ordering::Equal,
        })
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Fin(r) => write!(f, "{r}"),
            ExtRational::Inf => write!(f, "inf"),
        }
    }
}

/// Acceptance probability paired with the partial expected reward.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProbReward {
    pub prob: Rational,
    pub reward: ExtRational,
}

impl ProbReward {
    pub fn new(prob: Rational, reward: Rational) -> Self {
        ProbReward { prob, reward: ExtRational::Fin(reward) }
    }

    pub fn zero() -> Self {
        ProbReward::new(Rational::zero(), Rational::zero())
    }
}

impl fmt::Display for ProbReward {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.prob, self.reward)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainTag {
    Prob,
    ProbReward,
    Tropical,
}

impl FromStr for DomainTag {
    type Err = DomainError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prob" => Ok(DomainTag::Prob),
            "prob-reward" => Ok(DomainTag::ProbReward),
            "tropical" => Ok(DomainTag::Tropical),
            other => Err(DomainError::UnknownTag(other.to_string())),
        }
    }
}

/// An ω-cpo with a bottom element and a distance used by approximate
/// iteration.
pub trait Domain: Clone + PartialEq + fmt::Debug + Send + Sync {
    const TAG: DomainTag;
    fn bottom() -> Self;
    /// The domain order (not necessarily the numeric one).
    fn leq(&self, other: &Self) -> bool;
    /// `None` stands for an infinite distance.
    fn distance(&self, other: &Self) -> Option<Rational>;
}

impl Domain for Rational {
    const TAG: DomainTag = DomainTag::Prob;
    fn bottom() -> Self {
        Rational::zero()
    }
    fn leq(&self, other: &Self) -> bool {
        self <= other
    }
    fn distance(&self, other: &Self) -> Option<Rational> {
        Some((self - other).abs())
    }
}

impl Domain for ExtNat {
    const TAG: DomainTag = DomainTag::Tropical;
    fn bottom() -> Self {
        ExtNat::Inf
    }
    fn leq(&self, other: &Self) -> bool {
        self >= other
    }
    fn distance(&self, other: &Self) -> Option<Rational> {
        match (self, other) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => Some(rat_int(a.abs_diff(*b))),
            (ExtNat::Inf, ExtNat::Inf) => Some(Rational::zero()),
            _ => None,
        }
    }
}

impl Domain for ProbReward {
    const TAG: DomainTag = DomainTag::ProbReward;
    fn bottom() -> Self {
        ProbReward::zero()
    }
    fn leq(&self, other: &Self) -> bool {
        self.prob <= other.prob && self.reward <= other.reward
    }
    fn distance(&self, other: &Self) -> Option<Rational> {
        let dp = (&self.prob - &other.prob).abs();
        let dr = match (&self.reward, &other.reward) {
            (ExtRational::Fin(a), ExtRational::Fin(b)) => (a - b).abs(),
            (ExtRational::Inf, ExtRational::Inf) => Rational::zero(),
            _ => return None,
        };
        Some(dp.max(dr))
    }
}

/// Values indexed by state position in some declared state space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueVector<D> {
    entries: Vec<D>,
}

impl<D> ValueVector<D> {
    pub fn from_vec(entries: Vec<D>) -> Self {
        ValueVector { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, D> {
        self.entries.iter()
    }

    pub fn as_slice(&self) -> &[D] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<D> {
        self.entries
    }
}

impl<D: Domain> ValueVector<D> {
    pub fn leq(&self, other: &Self) -> bool {
        self.entries.len() == other.entries.len()
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a.leq(b))
    }

    /// Largest pointwise distance; `None` if some entry is infinitely far.
    pub fn max_distance(&self, other: &Self) -> Option<Rational> {
        let mut best = Rational::zero();
        for (a, b) in self.entries.iter().zip(&other.entries) {
            let d = a.distance(b)?;
            if d > best {
                best = d;
            }
        }
        Some(best)
    }
}

impl<D> Index<usize> for ValueVector<D> {
    type Output = D;
    fn index(&self, i: usize) -> &D {
        &self.entries[i]
    }
}

pub fn bottom_vector<D: Domain>(states: usize) -> Result<ValueVector<D>, DomainError> {
    if states == 0 {
        return Err(DomainError::EmptyStateSpace);
    }
    Ok(ValueVector::from_vec(vec![D::bottom(); states]))
}

/// Bottom vector selected by a runtime domain tag.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyValueVector {
    Prob(ValueVector<Rational>),
    ProbReward(ValueVector<ProbReward>),
    Tropical(ValueVector<ExtNat>),
}

pub fn bottom_vector_tagged(states: usize, tag: &str) -> Result<AnyValueVector, DomainError> {
    Ok(match tag.parse::<DomainTag>()? {
        DomainTag::Prob => AnyValueVector::Prob(bottom_vector(states)?),
        DomainTag::ProbReward => AnyValueVector::ProbReward(bottom_vector(states)?),
        DomainTag::Tropical => AnyValueVector::Tropical(bottom_vector(states)?),
    })
}

pub fn kleene_iterate<D, F>(transformer: F, start: ValueVector<D>, steps: usize) -> ValueVector<D>
where
    F: Fn(&ValueVector<D>) -> ValueVector<D>,
{
    let mut current = start;
    for _ in 0..steps {
        current = transformer(&current);
    }
    current
}

#[derive(Debug, Clone, PartialEq)]
pub struct LfpOutcome<D> {
    pub value: ValueVector<D>,
    pub iterations: usize,
    /// False means `max_iter` was reached first.
    pub converged: bool,
}

/// Iterates until the vector is literally unchanged (`epsilon = None`) or
/// the sup-norm change drops below `epsilon`, or `max_iter` is reached.
pub fn kleene_lfp<D, F>(
    transformer: F,
    start: ValueVector<D>,
    epsilon: Option<&Rational>,
    max_iter: usize,
) -> LfpOutcome<D>
where
    D: Domain,
    F: Fn(&ValueVector<D>) -> ValueVector<D>,
{
    let mut current = start;
    for i in 1..=max_iter {
        let next = transformer(&current);
        let done = match epsilon {
            None => next == current,
            Some(eps) => matches!(next.max_distance(&current), Some(d) if &d < eps),
        };
        current = next;
        if done {
            return LfpOutcome { value: current, iterations: i, converged: true };
        }
    }
    LfpOutcome { value: current, iterations: max_iter, converged: false }
}

/// Sum of rationals; avoids cloning the accumulator.
pub fn rat_sum<'a>(items: impl IntoIterator<Item = &'a Rational>) -> Rational {
    let mut acc = Rational::zero();
    for r in items {
        acc += r;
    }
    acc
}

pub fn is_unit(r: &Rational) -> bool {
    r.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_rationals() {
        assert_eq!(parse_rational("4/5").unwrap(), rat(4, 5));
        assert_eq!(parse_rational("2/4").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("1").unwrap(), rat(1, 1));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1.").is_err());
        assert_eq!(format_rational(&rat(0, 7)), "0");
        assert_eq!(format_rational(&rat(8, 10)), "4/5");
        assert_eq!(format_decimal(&rat(4, 25), 3), "0.160");
        assert_eq!(format_decimal(&rat(2, 3), 2), "0.67");
        assert_eq!(format_decimal(&rat(-1, 3), 0), "0");
        assert_eq!(format_decimal(&rat(5, 2), 0), "3");
    }

    #[test]
    fn bottoms() {
        let v: ValueVector<Rational> = bottom_vector(2).unwrap();
        assert_eq!(v.as_slice(), &[rat(0, 1), rat(0, 1)]);
        let t: ValueVector<ExtNat> = bottom_vector(1).unwrap();
        assert_eq!(t[0], ExtNat::Inf);
        let p: ValueVector<ProbReward> = bottom_vector(1).unwrap();
        assert_eq!(p[0], ProbReward::zero());
        assert_eq!(bottom_vector::<Rational>(0), Err(DomainError::EmptyStateSpace));
        assert!(matches!(bottom_vector_tagged(1, "tropical"), Ok(AnyValueVector::Tropical(_))));
        assert_eq!(
            bottom_vector_tagged(1, "boolean"),
            Err(DomainError::UnknownTag("boolean".into()))
        );
    }

    #[test]
    fn extnat_order_is_reversed_for_the_domain() {
        assert!(ExtNat::Inf.leq(&ExtNat::Fin(3)));
        assert!(ExtNat::Fin(5).leq(&ExtNat::Fin(3)));
        assert!(!ExtNat::Fin(3).leq(&ExtNat::Fin(5)));
        assert_eq!(ExtNat::Fin(2) + ExtNat::Fin(3), ExtNat::Fin(5));
        assert_eq!(ExtNat::Fin(2) + ExtNat::Inf, ExtNat::Inf);
        assert_eq!(ExtNat::Fin(u64::MAX).checked_add(ExtNat::Fin(1)), None);
    }

    #[test]
    fn identity_transformer_is_fixed() {
        let v = ValueVector::from_vec(vec![rat(1, 3), rat(2, 3)]);
        assert_eq!(kleene_iterate(|u| u.clone(), v.clone(), 7), v);
    }

    #[test]
    fn lfp_reports_max_iter_on_probability_one_self_loop() {
        let halfway = |u: &ValueVector<Rational>| {
            ValueVector::from_vec(vec![(&u[0] + rat(1, 1)) / rat(2, 1)])
        };
        let out = kleene_lfp(halfway, bottom_vector(1).unwrap(), None, 20);
        assert!(!out.converged);
        assert_eq!(out.iterations, 20);
        let out = kleene_lfp(halfway, bottom_vector(1).unwrap(), Some(&rat(1, 1000)), 100);
        assert!(out.converged);
        assert!(out.value[0] < rat(1, 1));

        // A probability-1 self loop without sinks: ⊥ is already the fixed point.
        let self_loop = |u: &ValueVector<Rational>| u.clone();
        let out = kleene_lfp(self_loop, bottom_vector(1).unwrap(), None, 5);
        assert!(out.converged);
        assert_eq!(out.value[0], rat(0, 1));
    }
}
