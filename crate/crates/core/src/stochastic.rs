//! Stochastic comparison quantities over exact rational distributions.
//!
//! Endowing a relation with a probability measure recovers the stochastic
//! guessing framework: guessing entropy (the minimum expected number of
//! sequential trials), its conditional version, the stochastic
//! brute-force guessing leakage, and the maximal stochastic leakage
//! `log2 sum_y max_x P(y|x)`, the order-infinity Sibson mutual
//! information. All weights, entropies and expectations are exact
//! rationals; only display is approximate.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::measures::{h0, h0_cond, maximal_leakage};
use crate::uv::{Relation, Symbol};
use crate::value::LeakageValue;

/// An exact rational probability assignment over the tuples of a
/// relation. Zero-weight tuples are allowed in the input and dropped; the
/// stored support is strictly positive and sums to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalDist {
    rel: Relation,
    weights: BTreeMap<Vec<Symbol>, BigRational>,
}

impl RationalDist {
    pub fn new(rel: Relation, weights: BTreeMap<Vec<Symbol>, BigRational>) -> Result<Self> {
        let mut support = BTreeMap::new();
        let mut total = BigRational::zero();
        for (t, w) in weights {
            if w.is_negative() {
                return Err(Error::input(format!("negative weight {w} on tuple {t:?}")));
            }
            if !rel.tuples().contains(&t) {
                return Err(Error::input(format!(
                    "weighted tuple {t:?} is not in the relation"
                )));
            }
            if w.is_positive() {
                total += &w;
                support.insert(t, w);
            }
        }
        if !total.is_one() {
            return Err(Error::input(format!(
                "weights must sum to 1 exactly, got {total}"
            )));
        }
        Ok(RationalDist {
            rel,
            weights: support,
        })
    }

    /// Uniform distribution over every tuple of the relation.
    pub fn uniform(rel: Relation) -> Self {
        let n = rel.tuples().len();
        let w = BigRational::new(1.into(), (n as i64).into());
        let weights = rel
            .tuples()
            .iter()
            .map(|t| (t.clone(), w.clone()))
            .collect();
        RationalDist { rel, weights }
    }

    pub fn relation(&self) -> &Relation {
        &self.rel
    }

    pub fn weights(&self) -> &BTreeMap<Vec<Symbol>, BigRational> {
        &self.weights
    }

    /// Marginal distribution over a variable group.
    pub fn marginal(&self, vars: &[&str]) -> Result<BTreeMap<Vec<Symbol>, BigRational>> {
        let idx: Vec<usize> = vars
            .iter()
            .map(|v| {
                self.rel
                    .variables()
                    .iter()
                    .position(|n| n == v)
                    .ok_or_else(|| Error::input(format!("unknown variable {v:?}")))
            })
            .collect::<Result<_>>()?;
        let mut out: BTreeMap<Vec<Symbol>, BigRational> = BTreeMap::new();
        for (t, w) in &self.weights {
            let key: Vec<Symbol> = idx.iter().map(|&i| t[i].clone()).collect();
            *out.entry(key).or_insert_with(BigRational::zero) += w;
        }
        Ok(out)
    }

    /// Exact conditional distribution of `target` given a positive-mass
    /// assignment of other variables.
    pub fn conditional(
        &self,
        target: &[&str],
        given: &[(&str, &Symbol)],
    ) -> Result<BTreeMap<Vec<Symbol>, BigRational>> {
        let vars = self.rel.variables();
        let target_idx: Vec<usize> = target
            .iter()
            .map(|v| {
                vars.iter()
                    .position(|n| n == v)
                    .ok_or_else(|| Error::input(format!("unknown variable {v:?}")))
            })
            .collect::<Result<_>>()?;
        let given_idx: Vec<(usize, &Symbol)> = given
            .iter()
            .map(|(v, s)| {
                vars.iter()
                    .position(|n| n == v)
                    .map(|i| (i, *s))
                    .ok_or_else(|| Error::input(format!("unknown variable {v:?}")))
            })
            .collect::<Result<_>>()?;

        let mut mass = BigRational::zero();
        let mut restricted: BTreeMap<Vec<Symbol>, BigRational> = BTreeMap::new();
        for (t, w) in &self.weights {
            if given_idx.iter().all(|&(i, s)| &t[i] == s) {
                mass += w;
                let key: Vec<Symbol> = target_idx.iter().map(|&i| t[i].clone()).collect();
                *restricted.entry(key).or_insert_with(BigRational::zero) += w;
            }
        }
        if mass.is_zero() {
            let desc: Vec<String> = given.iter().map(|(v, s)| format!("{v}={s}")).collect();
            return Err(Error::input(format!(
                "conditioning event {} has probability zero",
                desc.join(", ")
            )));
        }
        for w in restricted.values_mut() {
            *w /= mass.clone();
        }
        Ok(restricted)
    }
}

/// Guessing entropy: the minimum expected number of sequential trials to
/// hit the realized value, achieved by guessing in descending probability
/// order. The tie order among equal probabilities is fixed
/// lexicographically; it cannot change the sum.
pub fn guessing_entropy(dist: &BTreeMap<Vec<Symbol>, BigRational>) -> Result<BigRational> {
    if dist.is_empty() {
        return Err(Error::input("guessing entropy of an empty distribution"));
    }
    let mut entries: Vec<(&Vec<Symbol>, &BigRational)> = dist.iter().collect();
    entries.sort_by(|(ka, wa), (kb, wb)| wb.cmp(wa).then_with(|| ka.cmp(kb)));
    let mut sum = BigRational::zero();
    for (i, (_, w)) in entries.iter().enumerate() {
        sum += BigRational::from(num::BigInt::from(i + 1)) * *w;
    }
    Ok(sum)
}

/// Guessing entropy of `target` after observing the assignment `given`.
pub fn cond_guessing_entropy(
    dist: &RationalDist,
    target: &[&str],
    given: &[(&str, &Symbol)],
) -> Result<BigRational> {
    guessing_entropy(&dist.conditional(target, given)?)
}

/// Stochastic brute-force guessing leakage: the expected drop in guessing
/// cost, `H_G(target) - E_observed[H_G(target | observation)]`.
pub fn stochastic_bf_leakage(
    dist: &RationalDist,
    target: &[&str],
    observed: &[&str],
) -> Result<BigRational> {
    let prior = guessing_entropy(&dist.marginal(target)?)?;
    let mut posterior = BigRational::zero();
    for (y, py) in dist.marginal(observed)? {
        let assignment: Vec<(&str, &Symbol)> = observed.iter().copied().zip(y.iter()).collect();
        posterior += py * cond_guessing_entropy(dist, target, &assignment)?;
    }
    Ok(prior - posterior)
}

/// A channel with exact rational rows, each summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticChannel {
    source_var: String,
    target_var: String,
    rows: BTreeMap<Symbol, BTreeMap<Symbol, BigRational>>,
}

impl StochasticChannel {
    pub fn new(
        source_var: impl Into<String>,
        target_var: impl Into<String>,
        rows: BTreeMap<Symbol, BTreeMap<Symbol, BigRational>>,
    ) -> Result<Self> {
        let source_var = source_var.into();
        let target_var = target_var.into();
        if source_var == target_var {
            return Err(Error::input("channel endpoints must be distinct variables"));
        }
        if rows.is_empty() {
            return Err(Error::input("stochastic channel needs at least one row"));
        }
        for (x, row) in &rows {
            let mut total = BigRational::zero();
            for (y, p) in row {
                if p.is_negative() {
                    return Err(Error::input(format!(
                        "negative probability {p} at ({x}, {y})"
                    )));
                }
                total += p;
            }
            if !total.is_one() {
                return Err(Error::input(format!(
                    "row of source symbol {x} sums to {total}, expected 1"
                )));
            }
        }
        Ok(StochasticChannel {
            source_var,
            target_var,
            rows,
        })
    }

    /// The conditional channel `P(target=y | source=x)` induced by a joint
    /// distribution, defined on every positive-mass source symbol.
    pub fn from_dist(dist: &RationalDist, source: &str, target: &str) -> Result<Self> {
        let mut rows = BTreeMap::new();
        for (x, px) in dist.marginal(&[source])? {
            debug_assert!(px.is_positive());
            let row = dist
                .conditional(&[target], &[(source, &x[0])])?
                .into_iter()
                .map(|(mut y, p)| (y.pop().unwrap(), p))
                .collect();
            rows.insert(x.into_iter().next().unwrap(), row);
        }
        StochasticChannel::new(source, target, rows)
    }

    pub fn source_var(&self) -> &str {
        &self.source_var
    }

    pub fn target_var(&self) -> &str {
        &self.target_var
    }

    pub fn rows(&self) -> &BTreeMap<Symbol, BTreeMap<Symbol, BigRational>> {
        &self.rows
    }

    pub fn source_alphabet(&self) -> BTreeSet<Symbol> {
        self.rows.keys().cloned().collect()
    }

    pub fn target_alphabet(&self) -> BTreeSet<Symbol> {
        self.rows.values().flat_map(|r| r.keys().cloned()).collect()
    }
}

/// Maximal stochastic leakage `log2 sum_y max_x P(y|x)`, the Sibson
/// mutual information of order infinity. The prior enters only through
/// its support, so a support set is what the function takes.
pub fn maximal_stochastic_leakage(
    channel: &StochasticChannel,
    support: &BTreeSet<Symbol>,
) -> Result<LeakageValue> {
    if support.is_empty() {
        return Err(Error::input("the source support must be non-empty"));
    }
    for x in support {
        if !channel.rows().contains_key(x) {
            return Err(Error::input(format!(
                "support symbol {x} has no row in the channel"
            )));
        }
    }
    let mut sum = BigRational::zero();
    for y in channel.target_alphabet() {
        let mut best = BigRational::zero();
        for x in support {
            if let Some(p) = channel.rows()[x].get(&y) {
                if p > &best {
                    best = p.clone();
                }
            }
        }
        sum += best;
    }
    LeakageValue::from_ratio(sum)
}

/// Bound check relating the two maximal leakages: the non-stochastic
/// maximal leakage is at most the worst-case maximal stochastic leakage
/// plus the conditional entropy, `L*(X->Y) <= H0(Y) + H0(X|Y)`. The first
/// right-hand term is the supremum of the stochastic leakage over all
/// channels, which equals the output entropy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntropySumBound {
    pub lhs: LeakageValue,
    pub rhs: LeakageValue,
    pub holds: bool,
}

pub fn entropy_sum_bound(rel: &Relation, x: &str, y: &str) -> Result<EntropySumBound> {
    let lhs = maximal_leakage(rel, &[x], &[y])?;
    let rhs = &h0(&rel.marginal_set(y)?)? + &h0_cond(rel, &[x], &[y])?;
    Ok(EntropySumBound {
        holds: lhs <= rhs,
        lhs,
        rhs,
    })
}
