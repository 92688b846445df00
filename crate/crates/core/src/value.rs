//! Exact log-scale values.
//!
//! Every entropy and leakage quantity here is the base-2 logarithm of a
//! ratio of positive integer cardinalities. [`LeakageValue`] keeps that
//! ratio exactly and compares by integer cross-products, so equality and
//! ordering are never subject to floating-point rounding. Floats appear
//! only in the display layer.

use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use num::bigint::{BigInt, BigUint};
use num::{BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact value `log2(num/den)` for positive integers `num`, `den`.
///
/// The ratio is stored reduced; ordering and equality are the ordering and
/// equality of the ratio. Addition of log values multiplies the ratios,
/// subtraction divides them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LeakageValue {
    ratio: BigRational,
}

impl LeakageValue {
    /// `log2(1) = 0`.
    pub fn zero() -> Self {
        LeakageValue {
            ratio: BigRational::one(),
        }
    }

    /// `log2(n)` for a cardinality `n >= 1`.
    pub fn from_count(n: usize) -> Result<Self> {
        Self::from_cardinalities(n, 1)
    }

    /// `log2(num/den)` for cardinalities `num, den >= 1`.
    pub fn from_cardinalities(num: usize, den: usize) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::input("cardinalities must be positive"));
        }
        Ok(LeakageValue {
            ratio: BigRational::new(BigInt::from(num), BigInt::from(den)),
        })
    }

    /// `log2(r)` for an exact rational `r > 0`.
    pub fn from_ratio(r: BigRational) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::input(format!(
                "log2 argument must be positive, got {r}"
            )));
        }
        Ok(LeakageValue { ratio: r })
    }

    /// The reduced log2 argument.
    pub fn ratio(&self) -> &BigRational {
        &self.ratio
    }

    /// Numerator of the reduced argument (always positive).
    pub fn num(&self) -> BigUint {
        self.ratio.numer().magnitude().clone()
    }

    /// Denominator of the reduced argument (always positive).
    pub fn den(&self) -> BigUint {
        self.ratio.denom().magnitude().clone()
    }

    /// True iff the value is exactly zero, i.e. the argument is 1.
    pub fn is_zero(&self) -> bool {
        self.ratio.is_one()
    }

    /// Approximate magnitude, for display only.
    pub fn approx(&self) -> f64 {
        log2_biguint(&self.num()) - log2_biguint(&self.den())
    }

    /// Six-decimal rendering used in human-readable reports.
    pub fn decimal(&self) -> String {
        format!("{:.6}", self.approx())
    }
}

impl fmt::Display for LeakageValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ratio.denom().is_one() {
            write!(f, "log2({})", self.ratio.numer())
        } else {
            write!(f, "log2({}/{})", self.ratio.numer(), self.ratio.denom())
        }
    }
}

impl FromStr for LeakageValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .strip_prefix("log2(")
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| Error::input(format!("expected log2(p/q), got {s:?}")))?;
        let ratio = parse_rational(inner)?;
        LeakageValue::from_ratio(ratio)
    }
}

impl Add for LeakageValue {
    type Output = LeakageValue;

    // log-domain: adding values multiplies the underlying ratios
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: LeakageValue) -> LeakageValue {
        LeakageValue {
            ratio: self.ratio * rhs.ratio,
        }
    }
}

impl Add for &LeakageValue {
    type Output = LeakageValue;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: &LeakageValue) -> LeakageValue {
        LeakageValue {
            ratio: &self.ratio * &rhs.ratio,
        }
    }
}

impl Sub for &LeakageValue {
    type Output = LeakageValue;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: &LeakageValue) -> LeakageValue {
        LeakageValue {
            ratio: &self.ratio / &rhs.ratio,
        }
    }
}

impl Serialize for LeakageValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LeakageValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses an exact rational from `"p/q"`, an integer string, or a decimal
/// string such as `"0.25"` (interpreted exactly).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::input("empty rational"));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if whole.contains('/') || frac.contains('/') {
            return Err(Error::input(format!("malformed rational {s:?}")));
        }
        let digits = format!("{whole}{frac}");
        let numer = BigInt::from_str(&digits)
            .map_err(|e| Error::input(format!("malformed rational {s:?}: {e}")))?;
        let denom = BigInt::from(10u8).pow(frac.len() as u32);
        if denom.is_zero() {
            return Err(Error::input(format!("malformed rational {s:?}")));
        }
        return Ok(BigRational::new(numer, denom));
    }
    BigRational::from_str(s).map_err(|e| Error::input(format!("malformed rational {s:?}: {e}")))
}

/// Renders a rational as `"p/q"` (or `"p"` when the denominator is 1).
pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Base-2 logarithm of a positive big integer with enough precision for
/// six-decimal display. Values beyond f64 range are handled by scaling
/// down to the top 53 bits.
fn log2_biguint(n: &BigUint) -> f64 {
    debug_assert!(!n.is_zero());
    let bits = n.bits();
    if bits <= 53 {
        return n.to_f64().expect("fits in f64").log2();
    }
    let shift = bits - 53;
    let top = n >> shift;
    top.to_f64().expect("53 bits fit in f64").log2() + shift as f64
}
