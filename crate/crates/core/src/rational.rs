//! Exact rationals and the coefficient trait shared by the symbolic modules.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Decimal string `"n"` or `"n/d"`.
pub fn q_to_string(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

/// Reads a rational from a JSON value (string or integer).
pub fn q_from_json(v: &serde_json::Value, path: &str) -> Result<Q> {
    match v {
        serde_json::Value::String(s) => {
            parse_q(s).ok_or_else(|| Error::parse(path, format!("not a rational: {s:?}")))
        }
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(q)
            .ok_or_else(|| Error::parse(path, "rational numbers must be integers or strings")),
        _ => Err(Error::parse(path, "expected a rational")),
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Small integer view of a rational, when it is one.
pub fn q_as_i64(x: &Q) -> Option<i64> {
    if x.is_integer() {
        x.numer().to_i64()
    } else {
        None
    }
}

pub fn q_abs(x: &Q) -> Q {
    x.abs()
}

/// Coefficient ring for sparse symbolic functions.
///
/// There is no `zero()`/`one()` constructor: p-adic coefficients need their
/// context, so constants are always derived from an existing value.
pub trait Coeff:
    Clone
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn is_zero_coeff(&self) -> bool;
    /// The multiplicative identity of the ring `self` lives in.
    fn one_like(&self) -> Self;
    fn scale_int(&self, k: i64) -> Self;
    /// Exact division by an integer; `None` if the integer is zero.
    fn div_int(&self, k: i64) -> Option<Self>;
    /// Equality at the coefficient's own notion of precision.
    fn coeff_eq(&self, other: &Self) -> bool;
}

impl Coeff for Q {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn one_like(&self) -> Self {
        Q::one()
    }
    fn scale_int(&self, k: i64) -> Self {
        self * BigInt::from(k)
    }
    fn div_int(&self, k: i64) -> Option<Self> {
        if k == 0 {
            None
        } else {
            Some(self / BigInt::from(k))
        }
    }
    fn coeff_eq(&self, other: &Self) -> bool {
        self == other
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        assert_eq!(parse_q("3/6"), Some(qf(1, 2)));
        assert_eq!(parse_q("-7"), Some(q(-7)));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(q_to_string(&qf(-4, 6)), "-2/3");
        assert_eq!(q_to_string(&q(5)), "5");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 2), BigInt::from(15));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(factorial(5), BigInt::from(120));
    }
}
