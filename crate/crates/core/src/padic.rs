//! Truncated arithmetic in Q_p and its unramified quadratic extension
//! Q_{p^2} = Q_p(s), s^2 = d.
//!
//! A nonzero [`PadicScalar`] is `p^v (a + b s)` where `(a, b)` are integers
//! reduced modulo `p^(prec - v)` and not both divisible by `p`. `prec` is the
//! absolute precision: the value is known modulo `p^prec`. Sums keep the
//! smaller absolute precision, products the smaller relative precision, so
//! cancellation loses digits and never invents them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{Coeff, Q};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Legendre symbol (a/p) for an odd prime p, as -1, 0 or 1.
pub fn legendre(a: &BigInt, p: u64) -> i8 {
    let pb = BigInt::from(p);
    let r = a.mod_floor(&pb);
    if r.is_zero() {
        return 0;
    }
    let e = BigInt::from((p - 1) / 2);
    if r.modpow(&e, &pb).is_one() {
        1
    } else {
        -1
    }
}

pub fn least_non_residue(p: u64) -> i64 {
    (2..p as i64)
        .find(|&d| legendre(&BigInt::from(d), p) == -1)
        .expect("every odd prime has a non-residue")
}

/// p-adic valuation of a nonzero integer together with its p-free part.
pub(crate) fn split_p(x: &BigInt, p: u64) -> (i64, BigInt) {
    debug_assert!(!x.is_zero());
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut x = x.clone();
    loop {
        let (q, r) = x.div_rem(&pb);
        if !r.is_zero() {
            return (v, x);
        }
        x = q;
        v += 1;
    }
}

fn vp_or_max(x: &BigInt, p: u64) -> i64 {
    if x.is_zero() {
        i64::MAX
    } else {
        split_p(x, p).0
    }
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Global data of the arithmetic: the prime, the absolute precision cap and
/// the non-residue defining the quadratic extension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadicContext {
    pub p: u64,
    #[serde(rename = "N")]
    pub prec: i64,
    pub d: i64,
}

impl PadicContext {
    /// Context with `d` the least positive quadratic non-residue mod `p`.
    pub fn new(p: u64, prec: i64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidContext(format!("p = {p} must be an odd prime")));
        }
        Self::with_d(p, prec, least_non_residue(p))
    }

    pub fn with_d(p: u64, prec: i64, d: i64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidContext(format!("p = {p} must be an odd prime")));
        }
        if prec < 1 {
            return Err(Error::InvalidContext(format!("precision {prec} must be >= 1")));
        }
        if legendre(&BigInt::from(d), p) != -1 {
            return Err(Error::InvalidContext(format!(
                "d = {d} is not a quadratic non-residue mod {p}"
            )));
        }
        Ok(PadicContext { p, prec, d })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |k: &str| {
            v.get(k)
                .and_then(Value::as_i64)
                .ok_or_else(|| Error::parse(format!("context.{k}"), "expected an integer"))
        };
        let p = field("p")?;
        let n = field("N")?;
        if p < 0 {
            return Err(Error::parse("context.p", "negative prime"));
        }
        match v.get("d") {
            Some(_) => Self::with_d(p as u64, n, field("d")?),
            None => Self::new(p as u64, n),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"p": self.p, "N": self.prec, "d": self.d})
    }

    pub(crate) fn pb(&self) -> BigInt {
        BigInt::from(self.p)
    }

    pub(crate) fn p_pow(&self, e: i64) -> BigInt {
        debug_assert!(e >= 0);
        num_traits::pow(self.pb(), e as usize)
    }

    pub fn zero(&self) -> PadicScalar {
        PadicScalar::zero_with_prec(*self, self.prec)
    }

    pub fn one(&self) -> PadicScalar {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> PadicScalar {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> PadicScalar {
        PadicScalar::normalize(*self, 0, n.clone(), BigInt::zero(), self.prec)
    }

    /// Embeds a rational. The result carries absolute precision `N`.
    pub fn from_q(&self, x: &Q) -> PadicScalar {
        if x.is_zero() {
            return self.zero();
        }
        let (vn, un) = split_p(x.numer(), self.p);
        let (vd, ud) = split_p(x.denom(), self.p);
        let v = vn - vd;
        if v >= self.prec {
            return self.zero();
        }
        let m = self.p_pow(self.prec - v);
        let inv = mod_inverse(&ud, &m).expect("p-free denominator is a unit");
        PadicScalar::normalize(*self, v, un * inv, BigInt::zero(), self.prec)
    }

    /// The generator s with s^2 = d.
    pub fn s(&self) -> PadicScalar {
        PadicScalar::normalize(*self, 0, BigInt::zero(), BigInt::one(), self.prec)
    }

    /// `p^v (a + b s)` at the context precision.
    pub fn from_parts(&self, v: i64, a: BigInt, b: BigInt) -> PadicScalar {
        PadicScalar::normalize(*self, v, a, b, self.prec.max(v + 1))
    }

    /// `a + b s` for rationals a, b.
    pub fn from_q_pair(&self, a: &Q, b: &Q) -> PadicScalar {
        self.from_q(a) + self.from_q(b) * self.s()
    }
}

/// Element of Q_{p^2} at capped absolute precision.
#[derive(Clone)]
pub struct PadicScalar {
    ctx: PadicContext,
    /// `None` for an element that is zero at its precision.
    val: Option<i64>,
    a: BigInt,
    b: BigInt,
    prec: i64,
}

impl PadicScalar {
    fn zero_with_prec(ctx: PadicContext, prec: i64) -> Self {
        PadicScalar {
            ctx,
            val: None,
            a: BigInt::zero(),
            b: BigInt::zero(),
            prec,
        }
    }

    fn normalize(ctx: PadicContext, v0: i64, a: BigInt, b: BigInt, prec: i64) -> Self {
        let k = vp_or_max(&a, ctx.p).min(vp_or_max(&b, ctx.p));
        if k == i64::MAX || v0.saturating_add(k) >= prec {
            return Self::zero_with_prec(ctx, prec);
        }
        let pk = ctx.p_pow(k);
        let v = v0 + k;
        let m = ctx.p_pow(prec - v);
        PadicScalar {
            ctx,
            val: Some(v),
            a: (a / &pk).mod_floor(&m),
            b: (b / &pk).mod_floor(&m),
            prec,
        }
    }

    pub fn context(&self) -> PadicContext {
        self.ctx
    }

    pub fn valuation(&self) -> Option<i64> {
        self.val
    }

    /// Lower bound on the valuation (the precision, for zero).
    pub fn valuation_lb(&self) -> i64 {
        self.val.unwrap_or(self.prec)
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn relative_precision(&self) -> i64 {
        self.prec - self.valuation_lb()
    }

    pub fn is_zero(&self) -> bool {
        self.val.is_none()
    }

    /// Unit part `(a, b)`.
    pub fn unit_parts(&self) -> (&BigInt, &BigInt) {
        (&self.a, &self.b)
    }

    /// Reduces the absolute precision to at most `prec`.
    pub fn truncate(&self, prec: i64) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        Self::normalize(self.ctx, self.valuation_lb(), self.a.clone(), self.b.clone(), prec)
    }

    /// The nontrivial automorphism `a + b s -> a - b s`.
    pub fn frobenius(&self) -> Self {
        match self.val {
            None => self.clone(),
            Some(v) => Self::normalize(self.ctx, v, self.a.clone(), -&self.b, self.prec),
        }
    }

    /// Component along 1, as an element of Q_p.
    pub fn rational_part(&self) -> Self {
        Self::normalize(self.ctx, self.valuation_lb(), self.a.clone(), BigInt::zero(), self.prec)
    }

    /// Component along s, as an element of Q_p.
    pub fn s_part(&self) -> Self {
        Self::normalize(self.ctx, self.valuation_lb(), self.b.clone(), BigInt::zero(), self.prec)
    }

    /// True when the element lies in Q_p at working precision.
    pub fn is_in_qp(&self) -> bool {
        self.s_part().is_zero()
    }

    /// Multiplication by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        match self.val {
            None => Self::zero_with_prec(self.ctx, self.prec + k),
            Some(v) => PadicScalar {
                ctx: self.ctx,
                val: Some(v + k),
                a: self.a.clone(),
                b: self.b.clone(),
                prec: self.prec + k,
            },
        }
    }

    pub fn inv(&self) -> Result<Self> {
        let v = self.val.ok_or(Error::InversionOfZero)?;
        let r = self.prec - v;
        let m = self.ctx.p_pow(r);
        let d = BigInt::from(self.ctx.d);
        let norm = (&self.a * &self.a - &d * &self.b * &self.b).mod_floor(&m);
        let inv_norm = mod_inverse(&norm, &m).ok_or_else(|| {
            Error::PrecisionExhausted("unit part has non-invertible norm".into())
        })?;
        Ok(Self::normalize(
            self.ctx,
            -v,
            &self.a * &inv_norm,
            -(&self.b * &inv_norm),
            -v + r,
        ))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut base = self.clone();
        let mut acc = self.ctx.one();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    /// A square root, when one exists in Q_{p^2}. The other root is its negative.
    pub fn sqrt(&self) -> Result<Self> {
        let v = match self.val {
            None => return Ok(Self::zero_with_prec(self.ctx, self.prec.div_euclid(2))),
            Some(v) => v,
        };
        if v.rem_euclid(2) != 0 {
            return Err(Error::NotASquare(format!("odd valuation {v}")));
        }
        let p = self.ctx.p;
        let r = self.prec - v;
        let pb = self.ctx.pb();
        let d = BigInt::from(self.ctx.d);
        let (ua, ub) = (self.a.mod_floor(&pb), self.b.mod_floor(&pb));
        // residue field square root by enumeration
        let mut root = None;
        'outer: for x in 0..p {
            for y in 0..p {
                let (x, y) = (BigInt::from(x), BigInt::from(y));
                let sa = (&x * &x + &d * &y * &y).mod_floor(&pb);
                let sb = (BigInt::from(2) * &x * &y).mod_floor(&pb);
                if sa == ua && sb == ub {
                    root = Some((x, y));
                    break 'outer;
                }
            }
        }
        let (x0, y0) = root.ok_or_else(|| Error::NotASquare("unit part is not a square mod p".into()))?;
        let unit = Self::normalize(self.ctx, 0, self.a.clone(), self.b.clone(), r);
        let mut approx = Self::normalize(self.ctx, 0, x0, y0, r);
        let half = self.ctx.from_int(2).inv()?;
        let mut digits = 1;
        while digits < r {
            approx = &(&approx + &unit.div(&approx)?) * &half;
            approx = approx.truncate(r);
            digits *= 2;
        }
        let out = approx.shift(v / 2);
        debug_assert!(&out * &out == *self);
        Ok(out)
    }

    /// Representative in Z[1/p] of an element of Q_p modulo `p^m`.
    pub fn to_rational_mod(&self, m: i64) -> Result<Q> {
        if !self.is_in_qp() {
            return Err(Error::PrecisionExhausted("element is not in Q_p".into()));
        }
        if self.prec < m {
            return Err(Error::PrecisionExhausted(format!(
                "need precision {m}, have {}",
                self.prec
            )));
        }
        let v = match self.val {
            None => return Ok(Q::zero()),
            Some(v) if v >= m => return Ok(Q::zero()),
            Some(v) => v,
        };
        let digits = self.a.mod_floor(&self.ctx.p_pow(m - v));
        Ok(if v >= 0 {
            Q::from_integer(digits * self.ctx.p_pow(v))
        } else {
            Q::new(digits, self.ctx.p_pow(-v))
        })
    }

    /// Sign convention for the s-component: `+1` when the leading digit of
    /// the s-part lies in `[1, (p-1)/2]`, `-1` otherwise, `0` if it vanishes.
    pub fn s_sign(&self) -> i8 {
        let sp = self.s_part();
        match sp.val {
            None => 0,
            Some(_) => {
                let digit = sp.a.mod_floor(&self.ctx.pb()).to_u64().unwrap_or(0);
                if digit <= (self.ctx.p - 1) / 2 {
                    1
                } else {
                    -1
                }
            }
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "v": self.val,
            "a": self.a.to_string(),
            "b": self.b.to_string(),
        })
    }

    pub fn from_json(ctx: &PadicContext, v: &Value, path: &str) -> Result<Self> {
        let big = |k: &str| -> Result<BigInt> {
            match v.get(k) {
                Some(Value::String(s)) => s
                    .parse()
                    .map_err(|_| Error::parse(format!("{path}.{k}"), "not a decimal integer")),
                Some(Value::Number(n)) => n
                    .as_i64()
                    .map(BigInt::from)
                    .ok_or_else(|| Error::parse(format!("{path}.{k}"), "not an integer")),
                _ => Err(Error::parse(format!("{path}.{k}"), "missing")),
            }
        };
        match v.get("v") {
            Some(Value::Null) => Ok(ctx.zero()),
            Some(Value::Number(n)) => {
                let val = n
                    .as_i64()
                    .ok_or_else(|| Error::parse(format!("{path}.v"), "not an integer"))?;
                Ok(ctx.from_parts(val, big("a")?, big("b")?))
            }
            _ => Err(Error::parse(format!("{path}.v"), "expected integer or null")),
        }
    }

    fn check_ctx(&self, other: &Self) {
        assert_eq!(
            (self.ctx.p, self.ctx.d),
            (other.ctx.p, other.ctx.d),
            "p-adic scalars from different contexts"
        );
    }
}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.val {
            None => write!(f, "O({}^{})", self.ctx.p, self.prec),
            Some(v) => write!(
                f,
                "{}^{}*({} + {}*s) + O({}^{})",
                self.ctx.p, v, self.a, self.b, self.ctx.p, self.prec
            ),
        }
    }
}

impl<'a> Add<&'a PadicScalar> for &'a PadicScalar {
    type Output = PadicScalar;
    fn add(self, rhs: &PadicScalar) -> PadicScalar {
        self.check_ctx(rhs);
        let prec = self.prec.min(rhs.prec);
        match (self.val, rhs.val) {
            (None, None) => PadicScalar::zero_with_prec(self.ctx, prec),
            (Some(_), None) => self.truncate(prec),
            (None, Some(_)) => rhs.truncate(prec),
            (Some(vx), Some(vy)) => {
                let v0 = vx.min(vy);
                let sx = self.ctx.p_pow(vx - v0);
                let sy = self.ctx.p_pow(vy - v0);
                PadicScalar::normalize(
                    self.ctx,
                    v0,
                    &self.a * &sx + &rhs.a * &sy,
                    &self.b * &sx + &rhs.b * &sy,
                    prec,
                )
            }
        }
    }
}

impl<'a> Mul<&'a PadicScalar> for &'a PadicScalar {
    type Output = PadicScalar;
    fn mul(self, rhs: &PadicScalar) -> PadicScalar {
        self.check_ctx(rhs);
        let prec = (self.prec + rhs.valuation_lb()).min(rhs.prec + self.valuation_lb());
        match (self.val, rhs.val) {
            (Some(vx), Some(vy)) => {
                let d = BigInt::from(self.ctx.d);
                let a = &self.a * &rhs.a + &d * &self.b * &rhs.b;
                let b = &self.a * &rhs.b + &self.b * &rhs.a;
                PadicScalar::normalize(self.ctx, vx + vy, a, b, prec)
            }
            _ => PadicScalar::zero_with_prec(self.ctx, prec),
        }
    }
}

impl Neg for &PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        match self.val {
            None => self.clone(),
            Some(v) => PadicScalar::normalize(self.ctx, v, -&self.a, -&self.b, self.prec),
        }
    }
}

impl<'a> Sub<&'a PadicScalar> for &'a PadicScalar {
    type Output = PadicScalar;
    fn sub(self, rhs: &PadicScalar) -> PadicScalar {
        self + &(-rhs)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<PadicScalar> for PadicScalar {
            type Output = PadicScalar;
            fn $m(self, rhs: PadicScalar) -> PadicScalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        -&self
    }
}

impl PartialEq for PadicScalar {
    /// Congruence at the smaller of the two precisions.
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl Coeff for PadicScalar {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn one_like(&self) -> Self {
        self.ctx.one()
    }
    fn scale_int(&self, k: i64) -> Self {
        self * &self.ctx.from_int(k)
    }
    fn div_int(&self, k: i64) -> Option<Self> {
        self.ctx.from_int(k).inv().ok().map(|inv| self * &inv)
    }
    fn coeff_eq(&self, other: &Self) -> bool {
        self == other
    }
}

/// A point of the p-adic upper half plane with coordinates in Q_{p^2}.
#[derive(Clone, Debug, PartialEq)]
pub struct UpperHalfPoint(PadicScalar);

impl UpperHalfPoint {
    pub fn new(z: PadicScalar) -> Result<Self> {
        if z.is_in_qp() {
            return Err(Error::PointOnBoundary);
        }
        Ok(UpperHalfPoint(z))
    }

    pub fn z(&self) -> &PadicScalar {
        &self.0
    }

    /// `z* = sigma(z)`.
    pub fn conj(&self) -> PadicScalar {
        self.0.frobenius()
    }

    /// `z - sigma(z)`, always invertible.
    pub fn diff(&self) -> PadicScalar {
        &self.0 - &self.conj()
    }

    pub fn context(&self) -> PadicContext {
        self.0.ctx
    }
}

/// Extended-Euclid style sanity helper used by tests: true when `x*y == 1`.
#[doc(hidden)]
pub fn is_inverse_pair(x: &PadicScalar, y: &PadicScalar) -> bool {
    (x * y) == x.ctx.one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    fn ctx5() -> PadicContext {
        PadicContext::new(5, 4).unwrap()
    }

    #[test]
    fn inverse_of_two_mod_625() {
        // extended Euclid: 2 * 313 = 626 = 1 + 625
        let c = ctx5();
        let inv = c.from_int(2).inv().unwrap();
        assert_eq!(inv.unit_parts().0, &BigInt::from(313));
        assert_eq!(inv.valuation(), Some(0));
        assert!(is_inverse_pair(&c.from_int(2), &inv));
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert_eq!(ctx5().zero().inv().unwrap_err(), Error::InversionOfZero);
    }

    #[test]
    fn least_non_residue_is_d() {
        assert_eq!(PadicContext::new(5, 3).unwrap().d, 2);
        assert_eq!(PadicContext::new(7, 3).unwrap().d, 3);
        assert_eq!(PadicContext::new(3, 3).unwrap().d, 2);
        assert!(PadicContext::new(2, 3).is_err());
        assert!(PadicContext::with_d(5, 3, 4).is_err());
    }

    #[test]
    fn frobenius_basics() {
        let c = ctx5();
        let s = c.s();
        assert_eq!(s.frobenius(), -&s);
        let a = c.from_int(17);
        assert_eq!(a.frobenius(), a);
    }

    #[test]
    fn square_roots() {
        let c = PadicContext::new(5, 8).unwrap();
        let r = c.from_int(4).sqrt().unwrap();
        assert!(r == c.from_int(2) || r == c.from_int(-2));
        let r = c.from_int(2).sqrt().unwrap();
        assert!(r == c.s() || r == -c.s());
        // Hensel lift of sqrt(6): 1 + 3*5 + ...
        let r = c.from_int(6).sqrt().unwrap();
        assert_eq!(&r * &r, c.from_int(6));
        let digit1 = |x: &PadicScalar| x.unit_parts().0.mod_floor(&BigInt::from(25));
        let d = digit1(&r);
        assert!(d == BigInt::from(16) || d == BigInt::from(25 - 16));
        assert!(matches!(c.from_int(5).sqrt(), Err(Error::NotASquare(_))));
        // every unit of Q_p is a square in Q_{p^2}
        assert!(c.from_int(3).sqrt().is_ok());
    }

    #[test]
    fn precision_loss_on_cancellation() {
        let c = PadicContext::new(5, 6).unwrap();
        let x = c.from_int(1 + 5 * 5 * 5);
        let y = c.from_int(1);
        let diff = &x - &y;
        assert_eq!(diff.valuation(), Some(3));
        assert_eq!(diff.relative_precision(), 3);
        let back = diff.inv().unwrap();
        assert_eq!(back.valuation(), Some(-3));
        assert_eq!(back.precision(), 0);
    }

    #[test]
    fn rationals_embed() {
        let c = PadicContext::new(7, 10).unwrap();
        let x = c.from_q(&qf(3, 14));
        assert_eq!(x.valuation(), Some(-1));
        assert_eq!(&x * &c.from_q(&q(14)), c.from_int(3));
        // 7x = 3/2 as a 7-adic unit: representative r with 2r - 3 = 0 mod 7^5
        let r = (&x * &c.from_int(7)).to_rational_mod(5).unwrap();
        let t = (r * q(2) - q(3)).to_integer();
        assert!((t % BigInt::from(16807)).is_zero());
    }

    #[test]
    fn json_round_trip() {
        let c = ctx5();
        let x = &c.from_int(7) + &c.s().shift(1);
        let back = PadicScalar::from_json(&c, &x.to_json(), "x").unwrap();
        assert_eq!(back, x);
        let z = PadicScalar::from_json(&c, &c.zero().to_json(), "z").unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn upper_half_point() {
        let c = ctx5();
        assert_eq!(UpperHalfPoint::new(c.from_int(3)).unwrap_err(), Error::PointOnBoundary);
        let z = UpperHalfPoint::new(&c.s() + &c.from_int(1)).unwrap();
        let w = z.diff();
        assert_eq!(w.frobenius(), -&w);
        assert!(w.inv().is_ok());
    }
}
