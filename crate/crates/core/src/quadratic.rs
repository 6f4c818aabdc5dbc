//! The real quadratic field Q(sqrt(m)) as pairs over Q.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::rational::{q, q_to_string, Coeff, Q};

/// `a + b sqrt(m)`. Values with different `m` must not be mixed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QSqrt {
    pub a: Q,
    pub b: Q,
    pub m: i64,
}

impl QSqrt {
    pub fn new(a: Q, b: Q, m: i64) -> Self {
        QSqrt { a, b, m }
    }

    pub fn rational(a: Q, m: i64) -> Self {
        QSqrt { a, b: Q::zero(), m }
    }

    pub fn sqrt_m(m: i64) -> Self {
        QSqrt { a: Q::zero(), b: Q::one(), m }
    }

    pub fn conj(&self) -> Self {
        QSqrt::new(self.a.clone(), -&self.b, self.m)
    }

    pub fn norm(&self) -> Q {
        &self.a * &self.a - &self.b * &self.b * q(self.m)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        Some(QSqrt::new(&self.a / &n, -&self.b / &n, self.m))
    }

    pub fn scale(&self, c: &Q) -> Self {
        QSqrt::new(&self.a * c, &self.b * c, self.m)
    }
}

impl fmt::Debug for QSqrt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", q_to_string(&self.a), q_to_string(&self.b), self.m)
    }
}

impl Add for QSqrt {
    type Output = QSqrt;
    fn add(self, r: QSqrt) -> QSqrt {
        debug_assert_eq!(self.m, r.m);
        QSqrt::new(self.a + r.a, self.b + r.b, self.m)
    }
}

impl Sub for QSqrt {
    type Output = QSqrt;
    fn sub(self, r: QSqrt) -> QSqrt {
        debug_assert_eq!(self.m, r.m);
        QSqrt::new(self.a - r.a, self.b - r.b, self.m)
    }
}

impl Mul for QSqrt {
    type Output = QSqrt;
    fn mul(self, r: QSqrt) -> QSqrt {
        debug_assert_eq!(self.m, r.m);
        let m = q(self.m);
        QSqrt::new(
            &self.a * &r.a + &self.b * &r.b * m,
            &self.a * &r.b + &self.b * &r.a,
            self.m,
        )
    }
}

impl Neg for QSqrt {
    type Output = QSqrt;
    fn neg(self) -> QSqrt {
        QSqrt::new(-self.a, -self.b, self.m)
    }
}

impl Coeff for QSqrt {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn one_like(&self) -> Self {
        QSqrt::rational(Q::one(), self.m)
    }
    fn scale_int(&self, k: i64) -> Self {
        self.scale(&q(k))
    }
    fn div_int(&self, k: i64) -> Option<Self> {
        (k != 0).then(|| self.scale(&(Q::one() / q(k))))
    }
    fn coeff_eq(&self, other: &Self) -> bool {
        self == other
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        let x = QSqrt::new(q(1), q(2), 3);
        let y = x.inv().unwrap();
        assert_eq!(x.clone() * y, QSqrt::rational(q(1), 3));
        assert_eq!(QSqrt::sqrt_m(3) * QSqrt::sqrt_m(3), QSqrt::rational(q(3), 3));
        assert_eq!(x.norm(), q(-11));
    }
}
