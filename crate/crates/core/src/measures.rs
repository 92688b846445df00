//! Entropy and leakage measures over finite uncertain variables.
//!
//! The quantities here are all logs of cardinality ratios read off a
//! relation: Hartley entropy `H0`, worst-case conditional entropy
//! `H0(X|Y)`, their difference `I0`, brute-force guessing leakage
//! `L(U->Y) = log2(|[[U]]| / min_y |[[U|y]]|)`, its supremum over
//! attributes `L*(X->Y) = log2(|[[X]]| - min_y |[[X|y]]| + 1)`, the
//! attribute construction achieving that supremum, and the
//! epsilon-identifiability audit with its leakage ceiling.
//!
//! Target and observed sides are variable groups: a tuple of uncertain
//! variables is itself an uncertain variable, which is what the
//! additivity checks over product relations need.

use std::collections::BTreeSet;

use num::bigint::{BigInt, BigUint};
use num::{BigRational, One, Signed};

use crate::error::{Error, Result};
use crate::uv::{AttributeMap, Relation, Symbol};
use crate::value::LeakageValue;

/// Hartley entropy `log2(|range|)` of a non-empty finite range.
pub fn h0<T: Ord>(range: &BTreeSet<T>) -> Result<LeakageValue> {
    if range.is_empty() {
        return Err(Error::input("entropy of an empty range is undefined"));
    }
    LeakageValue::from_count(range.len())
}

/// Conditional Hartley entropy: `max_y log2(|[[target|given=y]]|)` over
/// realizable values of the given group.
pub fn h0_cond(rel: &Relation, target: &[&str], given: &[&str]) -> Result<LeakageValue> {
    let scan = conditional_scan(rel, target, given)?;
    LeakageValue::from_count(scan.max_conditional)
}

/// `I0 = H0(a) - H0(a|b)`, exactly `log2(|[[a]]| / max_b |[[a|b]]|)`.
pub fn i0(rel: &Relation, a: &[&str], b: &[&str]) -> Result<LeakageValue> {
    let scan = conditional_scan(rel, a, b)?;
    LeakageValue::from_cardinalities(scan.prior, scan.max_conditional)
}

/// Brute-force guessing leakage with its argmin witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Leakage {
    pub value: LeakageValue,
    /// `|[[target]]|`: guesses needed with no observation.
    pub prior: usize,
    /// `min_y |[[target|y]]|`: guesses needed at the most revealing output.
    pub min_conditional: usize,
    /// The argmin observation, smallest cardinality first and then
    /// lexicographically smallest.
    pub witness: Vec<Symbol>,
}

/// Leakage from the target group to the observed group:
/// `log2(|[[target]]| / min_y |[[target|y]]|)`.
pub fn leakage(rel: &Relation, target: &[&str], observed: &[&str]) -> Result<Leakage> {
    let scan = conditional_scan(rel, target, observed)?;
    Ok(Leakage {
        value: LeakageValue::from_cardinalities(scan.prior, scan.min_conditional)?,
        prior: scan.prior,
        min_conditional: scan.min_conditional,
        witness: scan.argmin,
    })
}

/// Maximal leakage over all attributes of the target group:
/// `log2(|[[x]]| - min_y |[[x|y]]| + 1)`.
pub fn maximal_leakage(rel: &Relation, x: &[&str], y: &[&str]) -> Result<LeakageValue> {
    let scan = conditional_scan(rel, x, y)?;
    LeakageValue::from_count(scan.prior - scan.min_conditional + 1)
}

/// The attribute achieving maximal leakage, with its evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorstAttribute {
    pub attribute: AttributeMap,
    /// The most revealing observation the construction collapses against.
    pub y_star: Symbol,
    /// The fresh symbol the collapsed block maps to.
    pub fresh_symbol: Symbol,
    /// Leakage of the induced attribute, evaluated from its definition.
    pub achieved: LeakageValue,
}

/// Builds the most vulnerable attribute of `x` under observations of `y`:
/// the conditional range at the argmin observation collapses to one fresh
/// symbol and every other symbol maps to itself. Its leakage always
/// equals `maximal_leakage(rel, x, y)`.
pub fn worst_attribute(rel: &Relation, x: &str, y: &str) -> Result<WorstAttribute> {
    let scan = conditional_scan(rel, &[x], &[y])?;
    let y_star = scan.argmin[0].clone();
    let collapsed: BTreeSet<Symbol> = rel.conditional_set(x, y, &y_star)?;
    let domain = rel.marginal_set(x)?;
    let kept: BTreeSet<Symbol> = domain.difference(&collapsed).cloned().collect();
    let fresh = fresh_symbol(&kept);

    let map = domain
        .iter()
        .map(|s| {
            let image = if collapsed.contains(s) {
                fresh.clone()
            } else {
                s.clone()
            };
            (s.clone(), image)
        })
        .collect();
    let attribute = AttributeMap::new(map)?;

    let u_var = fresh_variable(rel);
    let extended = rel.apply_attribute(&attribute, x, &u_var)?;
    let achieved = leakage(&extended, &[&u_var], &[y])?.value;

    Ok(WorstAttribute {
        attribute,
        y_star,
        fresh_symbol: fresh,
        achieved,
    })
}

fn fresh_symbol(taken: &BTreeSet<Symbol>) -> Symbol {
    let base = Symbol::new("__ustar").unwrap();
    if !taken.contains(&base) {
        return base;
    }
    for i in 1usize.. {
        let candidate = Symbol::new(format!("__ustar{i}")).unwrap();
        if !taken.contains(&candidate) {
            return candidate;
        }
    }
    unreachable!()
}

fn fresh_variable(rel: &Relation) -> String {
    let mut name = "__U".to_string();
    while rel.variables().iter().any(|v| v == &name) {
        name.push('_');
    }
    name
}

/// A positive privacy budget, in one of two exact forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrivacyBudget {
    /// `epsilon = log2(r)` for a rational `r > 1`; the exponential
    /// `2^epsilon = r` is rational, so audits reduce to integer products.
    Log2(BigRational),
    /// `epsilon = r` for a rational `r > 0`; audits raise both sides of
    /// the comparison to the denominator's power, which stays exact.
    Plain(BigRational),
}

/// Plain-form budgets are capped so the exact power comparisons stay at
/// desk scale. The cap applies to the reduced numerator and denominator.
const PLAIN_BUDGET_LIMIT: u32 = 1 << 20;

impl PrivacyBudget {
    pub fn log2(ratio: BigRational) -> Result<Self> {
        if ratio <= BigRational::one() {
            return Err(Error::input(format!(
                "privacy budget log2({ratio}) is not positive"
            )));
        }
        Ok(PrivacyBudget::Log2(ratio))
    }

    pub fn plain(epsilon: BigRational) -> Result<Self> {
        if !epsilon.is_positive() {
            return Err(Error::input(format!(
                "privacy budget {epsilon} is not positive"
            )));
        }
        let limit = BigInt::from(PLAIN_BUDGET_LIMIT);
        if epsilon.numer() > &limit || epsilon.denom() > &limit {
            return Err(Error::input(format!(
                "plain budget {epsilon} exceeds the supported magnitude ({PLAIN_BUDGET_LIMIT})"
            )));
        }
        Ok(PrivacyBudget::Plain(epsilon))
    }

    /// Parses `"log2(p/q)"`, `"p/q"`, an integer, or a decimal string.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("log2(").and_then(|r| r.strip_suffix(')')) {
            return PrivacyBudget::log2(crate::value::parse_rational(inner)?);
        }
        PrivacyBudget::plain(crate::value::parse_rational(s)?)
    }
}

impl std::fmt::Display for PrivacyBudget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PrivacyBudget::Log2(r) => write!(f, "log2({})", crate::value::rational_string(r)),
            PrivacyBudget::Plain(r) => write!(f, "{}", crate::value::rational_string(r)),
        }
    }
}

/// `x * 2^shift >= y` for positive big integers, without materializing
/// `2^shift` when it is already decisive.
fn shifted_ge(x: &BigUint, shift: &BigUint, y: &BigUint) -> bool {
    if x >= y {
        return true;
    }
    let bits_needed = BigUint::from(y.bits());
    if shift >= &bits_needed {
        // x * 2^shift >= 2^shift >= 2^bits(y) > y
        return true;
    }
    let s = u64::try_from(shift.clone()).expect("shift below bits(y) fits u64");
    (x << s) >= *y
}

/// `m * 2^epsilon >= n` decided exactly for either budget form.
fn scaled_min_dominates(m: usize, budget: &PrivacyBudget, n: usize) -> bool {
    let m = BigUint::from(m);
    let n = BigUint::from(n);
    match budget {
        PrivacyBudget::Log2(r) => {
            let p = r.numer().magnitude();
            let q = r.denom().magnitude();
            &m * p >= &n * q
        }
        PrivacyBudget::Plain(r) => {
            let a = r.numer().magnitude().clone();
            let b = u32::try_from(r.denom().magnitude()).expect("denominator under cap");
            shifted_ge(&m.pow(b), &a, &n.pow(b))
        }
    }
}

/// True iff the mapping from `x` to `y` is `epsilon`-identifiable: every
/// conditional range keeps at least a `2^(-epsilon)` fraction of the
/// prior range, i.e. `min_y |[[x|y]]| >= |[[x]]| * 2^(-epsilon)`.
pub fn is_identifiable(
    rel: &Relation,
    x: &[&str],
    y: &[&str],
    budget: &PrivacyBudget,
) -> Result<bool> {
    let scan = conditional_scan(rel, x, y)?;
    Ok(scaled_min_dominates(
        scan.min_conditional,
        budget,
        scan.prior,
    ))
}

/// The tightest budget for which the mapping stays identifiable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinEpsilon {
    /// `log2(|[[x]]| / min_y |[[x|y]]|)`.
    pub value: LeakageValue,
    /// True when the infimum is not attained: unrelated variables are
    /// identifiable for every positive budget but budgets must be
    /// strictly positive, so 0 is an open bound.
    pub open_bound: bool,
}

impl MinEpsilon {
    /// The infimum as a budget, when it is attainable.
    pub fn as_budget(&self) -> Option<PrivacyBudget> {
        if self.open_bound {
            None
        } else {
            Some(PrivacyBudget::Log2(self.value.ratio().clone()))
        }
    }
}

/// Infimum budget such that [`is_identifiable`] holds; coincides with the
/// guessing leakage of `x` itself.
pub fn min_epsilon(rel: &Relation, x: &[&str], y: &[&str]) -> Result<MinEpsilon> {
    let scan = conditional_scan(rel, x, y)?;
    Ok(MinEpsilon {
        value: LeakageValue::from_cardinalities(scan.prior, scan.min_conditional)?,
        open_bound: scan.min_conditional == scan.prior,
    })
}

/// The maximal-leakage ceiling for identifiable mappings:
/// `log2(|[[x]]| * (1 - 2^(-epsilon)) + 1)`.
///
/// For `log2`-form budgets (and integral plain budgets) the ceiling is an
/// exact log-rational. Otherwise the log2 argument is irrational and the
/// ceiling is returned as a certified enclosure tight enough for display;
/// comparisons against it should use [`ceiling_dominates`], which stays
/// exact in every case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundValue {
    Exact(LeakageValue),
    Enclosure { lo: LeakageValue, hi: LeakageValue },
}

impl BoundValue {
    pub fn approx(&self) -> f64 {
        match self {
            BoundValue::Exact(v) => v.approx(),
            BoundValue::Enclosure { lo, hi } => (lo.approx() + hi.approx()) / 2.0,
        }
    }

    pub fn decimal(&self) -> String {
        format!("{:.6}", self.approx())
    }

    /// Exact string form: a single value, or `"lo..hi"` for enclosures.
    pub fn exact_string(&self) -> String {
        match self {
            BoundValue::Exact(v) => v.to_string(),
            BoundValue::Enclosure { lo, hi } => format!("{lo}..{hi}"),
        }
    }
}

impl std::fmt::Display for BoundValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.exact_string())
    }
}

pub fn identifiability_bound(size_x: usize, budget: &PrivacyBudget) -> Result<BoundValue> {
    if size_x == 0 {
        return Err(Error::input("the prior range size must be at least 1"));
    }
    let n = BigInt::from(size_x);
    match budget {
        PrivacyBudget::Log2(r) => {
            // argument = (n (p - q) + p) / p
            let p = r.numer();
            let q = r.denom();
            let numer = &n * (p - q) + p;
            Ok(BoundValue::Exact(LeakageValue::from_ratio(
                BigRational::new(numer, p.clone()),
            )?))
        }
        PrivacyBudget::Plain(r) if r.denom().is_one() => {
            // 2^(-a) is exactly 1/2^a
            let a = u32::try_from(r.numer().magnitude()).expect("numerator under cap");
            let pow = BigInt::from(2u8).pow(a);
            let numer = &n * (&pow - BigInt::one()) + &pow;
            Ok(BoundValue::Exact(LeakageValue::from_ratio(
                BigRational::new(numer, pow),
            )?))
        }
        PrivacyBudget::Plain(r) => {
            let (lo, hi) = enclose_bound_argument(&n, r)?;
            Ok(BoundValue::Enclosure {
                lo: LeakageValue::from_ratio(lo)?,
                hi: LeakageValue::from_ratio(hi)?,
            })
        }
    }
}

/// Certified rational enclosure of `n (1 - 2^(-a/b)) + 1` for a positive
/// non-integral rational exponent, refined until the two ends agree to
/// well under display precision.
fn enclose_bound_argument(n: &BigInt, r: &BigRational) -> Result<(BigRational, BigRational)> {
    let a = u64::try_from(r.numer().magnitude()).expect("numerator under cap");
    let b = u32::try_from(r.denom().magnitude()).expect("denominator under cap");
    for precision_bits in [32u64, 64, 128, 256] {
        // root^b <= 2^(a + b*s) < (root+1)^b, so root/2^s <= 2^(a/b) < (root+1)/2^s
        let s = precision_bits;
        let shifted = BigUint::one() << (a + u64::from(b) * s);
        let root = shifted.nth_root(b);
        let scale = BigInt::from(BigUint::one() << s);
        let two_eps_lo = BigRational::new(BigInt::from(root.clone()), scale.clone());
        let two_eps_hi = BigRational::new(BigInt::from(root + BigUint::one()), scale);
        // argument is decreasing in 2^(-eps), i.e. increasing in 2^(eps)
        let n_rat = BigRational::from(n.clone());
        let lo = &n_rat * (BigRational::one() - two_eps_lo.recip()) + BigRational::one();
        let hi = &n_rat * (BigRational::one() - two_eps_hi.recip()) + BigRational::one();
        debug_assert!(lo <= hi);
        if lo.is_positive() {
            let lo_v = LeakageValue::from_ratio(lo.clone())?;
            let hi_v = LeakageValue::from_ratio(hi.clone())?;
            if hi_v.approx() - lo_v.approx() < 1e-9 {
                return Ok((lo, hi));
            }
        }
    }
    Err(Error::input(
        "could not certify the bound enclosure at the configured precision",
    ))
}

/// Exact test of `maximal_leakage <= identifiability ceiling` without
/// going through the (possibly irrational) ceiling value: decides
/// `n + 1 - v >= n * 2^(-epsilon)` where `v` is the leakage argument.
pub fn ceiling_dominates(
    size_x: usize,
    budget: &PrivacyBudget,
    lstar: &LeakageValue,
) -> Result<bool> {
    if size_x == 0 {
        return Err(Error::input("the prior range size must be at least 1"));
    }
    let n = BigInt::from(size_x);
    let v = lstar.ratio();
    // slack = (n + 1) - v, as a rational pv/qv
    let slack = BigRational::from(&n + BigInt::one()) - v;
    if !slack.is_positive() {
        return Ok(false);
    }
    let sn = slack.numer().magnitude();
    let sd = slack.denom().magnitude();
    let n_mag = n.magnitude();
    match budget {
        PrivacyBudget::Log2(r) => {
            // sn/sd >= n q/p  <=>  sn p >= n q sd
            let p = r.numer().magnitude();
            let q = r.denom().magnitude();
            Ok(sn * p >= n_mag * q * sd)
        }
        PrivacyBudget::Plain(r) => {
            // (sn/sd)^b >= n^b 2^(-a)  <=>  sn^b 2^a >= (n sd)^b
            let a = r.numer().magnitude().clone();
            let b = u32::try_from(r.denom().magnitude()).expect("denominator under cap");
            Ok(shifted_ge(&sn.pow(b), &a, &(n_mag * sd).pow(b)))
        }
    }
}

struct ConditionalScan {
    prior: usize,
    min_conditional: usize,
    max_conditional: usize,
    argmin: Vec<Symbol>,
}

/// One pass over the realizable observations: cardinality of the target
/// marginal, the extreme conditional cardinalities, and the argmin
/// witness under the (cardinality, lexicographic) tie-break.
fn conditional_scan(rel: &Relation, target: &[&str], observed: &[&str]) -> Result<ConditionalScan> {
    if target.iter().any(|v| observed.contains(v)) {
        return Err(Error::input(
            "target and observed variable groups must be disjoint",
        ));
    }
    let prior = rel.marginal(target)?.len();
    let mut min_conditional = usize::MAX;
    let mut max_conditional = 0usize;
    let mut argmin: Option<Vec<Symbol>> = None;
    for y in rel.marginal(observed)? {
        let assignment: Vec<(&str, &Symbol)> = observed.iter().copied().zip(y.iter()).collect();
        let card = rel.conditional(target, &assignment)?.len();
        if card < min_conditional {
            min_conditional = card;
            argmin = Some(y.clone());
        }
        max_conditional = max_conditional.max(card);
    }
    Ok(ConditionalScan {
        prior,
        min_conditional,
        max_conditional,
        argmin: argmin.expect("marginal ranges are non-empty"),
    })
}
