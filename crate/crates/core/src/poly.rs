//! Univariate z-polynomials and a small sparse multivariate polynomial type.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{q, q_from_json, q_to_string, Q};

/// Dense polynomial in z with rational coefficients, lowest degree first.
/// Trailing zeros are trimmed, so the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Q>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn constant(c: Q) -> Self {
        Self::new(vec![c])
    }

    /// `c z^k`.
    pub fn monomial(c: Q, k: usize) -> Self {
        let mut v = vec![Q::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let mut v = vec![Q::zero()];
        v.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / BigInt::from(k + 1)),
        );
        Self::new(v)
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn eval(&self, z: &Q) -> Q {
        self.coeffs
            .iter()
            .rev()
            .fold(Q::zero(), |acc, c| acc * z + c)
    }

    pub fn to_json(&self) -> Value {
        json!(self.coeffs.iter().map(q_to_string).collect::<Vec<_>>())
    }

    /// A JSON array of coefficients, lowest degree first, or `{"coeffs": [...]}`.
    pub fn from_json(v: &Value, path: &str) -> Result<Self> {
        let arr = match v {
            Value::Array(a) => a,
            Value::Object(o) => match o.get("coeffs") {
                Some(Value::Array(a)) => a,
                _ => return Err(Error::parse(format!("{path}.coeffs"), "expected an array")),
            },
            _ => return Err(Error::parse(path, "expected a coefficient array")),
        };
        let coeffs = arr
            .iter()
            .enumerate()
            .map(|(i, c)| q_from_json(c, &format!("{path}[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(coeffs))
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("({})z^{k}", q_to_string(c)))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut v = vec![Q::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        UniPoly::new(v)
    }
}

/// Sparse polynomial over Q in a fixed number of named variables.
#[derive(Clone, PartialEq, Eq)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Q::one());
        p
    }

    pub fn monomial(nvars: usize, exps: Vec<u32>, c: Q) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Self::zero(nvars);
        p.add_term(exps, c);
        p
    }

    fn add_term(&mut self, exps: Vec<u32>, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut e2 = e.clone();
                e2[var] -= 1;
                out.add_term(e2, c * BigInt::from(e[var]));
            }
        }
        out
    }

    /// Degree in one variable.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    /// Applies `x_var^2 = value` until `x_var` occurs at most linearly.
    pub fn reduce_square(&self, var: usize, value: &Q) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let half = e2[var] / 2;
            e2[var] %= 2;
            out.add_term(e2, c * num_traits::pow(value.clone(), half as usize));
        }
        out
    }

    /// Substitutes `x_var := replacement`.
    pub fn substitute(&self, var: usize, replacement: &MPoly) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut base = e.clone();
            base[var] = 0;
            let mut mono = Self::zero(self.nvars);
            mono.add_term(base, c.clone());
            for _ in 0..e[var] {
                mono = &mono * replacement;
            }
            out = &out + &mono;
        }
        out
    }

    pub fn to_string_with(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut s = q_to_string(c);
                for (i, &k) in e.iter().enumerate() {
                    match k {
                        0 => {}
                        1 => s.push_str(&format!("*{}", names[i])),
                        k => s.push_str(&format!("*{}^{k}", names[i])),
                    }
                }
                s
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        write!(f, "{}", self.to_string_with(&refs))
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        self + &rhs.scale(&-Q::one())
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Mul<&MPoly> for MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        &self * rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    #[test]
    fn calculus_on_unipoly() {
        let p = UniPoly::from_ints(&[1, 2, 3]);
        assert_eq!(p.derivative(), UniPoly::from_ints(&[2, 6]));
        assert_eq!(p.antiderivative().derivative(), p);
        assert_eq!(p.antiderivative().coeff(0), Q::zero());
        assert_eq!(p.eval(&q(2)), q(17));
        assert_eq!(UniPoly::from_ints(&[0, 0, 0]).degree(), None);
    }

    #[test]
    fn mpoly_reduce_and_substitute() {
        let r = MPoly::var(2, 0);
        let sq = &r * &r;
        assert_eq!(sq.reduce_square(0, &q(5)), MPoly::constant(2, q(5)));
        let x = MPoly::var(2, 1);
        let p = &x * &x;
        let sub = p.substitute(1, &(&r + &MPoly::constant(2, q(1))));
        assert_eq!(sub.reduce_square(0, &q(5)), &MPoly::constant(2, q(6)) + &r.scale(&q(2)));
        assert_eq!(p.derivative(1), x.scale(&qf(2, 1)));
    }
}
