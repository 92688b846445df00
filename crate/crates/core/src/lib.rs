//! Exact computation of non-stochastic information-leakage measures over
//! finite uncertain variables.
//!
//! A finite uncertain variable is characterized entirely by its range:
//! the set of values it can realize jointly with the other variables in
//! play. This crate represents such joint ranges as [`uv::Relation`]s and
//! computes, with exact integer/rational arithmetic throughout:
//!
//! - Hartley entropy, worst-case conditional entropy, and their gap
//!   ([`measures::h0`], [`measures::h0_cond`], [`measures::i0`]);
//! - brute-force guessing leakage and its supremum over derived
//!   attributes, with the attribute construction that attains it
//!   ([`measures::leakage`], [`measures::maximal_leakage`],
//!   [`measures::worst_attribute`]);
//! - identifiability audits against a privacy budget
//!   ([`measures::is_identifiable`], [`measures::min_epsilon`],
//!   [`measures::identifiability_bound`]);
//! - overlap partitions, maximin information, the common variable, and a
//!   zero-error capacity bound ([`maximin`]);
//! - stochastic comparison quantities over exact rational distributions:
//!   guessing entropy, stochastic guessing leakage, and maximal stochastic
//!   leakage ([`stochastic`]);
//! - independent brute-force oracles and randomized property campaigns
//!   that re-derive every closed form from definitions ([`oracle`]).
//!
//! Values are exposed as [`value::LeakageValue`], an exact
//! `log2(num/den)`; comparisons never touch floating point.

pub mod error;
pub mod fileio;
pub mod maximin;
pub mod measures;
pub mod oracle;
pub mod stochastic;
pub mod uv;
pub mod value;

pub use error::{Error, Result};
pub use value::LeakageValue;
