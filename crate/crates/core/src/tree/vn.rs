//! `P_n` (polynomials of degree ≤ n) with the right action
//! `P·A = (cX + d)^n P((aX + b)/(cX + d))`, and its dual `V_n`.

use std::ops::{Add, Neg, Sub};

use num_traits::Zero;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::matrix::Mat2;
use crate::poly::UniPoly;
use crate::rational::{q_from_json, q_to_string, Q};

/// Values `φ(X^0), ..., φ(X^n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VnVector(pub Vec<Q>);

impl VnVector {
    pub fn zero(n: usize) -> Self {
        VnVector(vec![Q::zero(); n + 1])
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Q) -> Self {
        VnVector(self.0.iter().map(|x| x * c).collect())
    }

    /// `φ(P)`.
    pub fn apply(&self, p: &[Q]) -> Q {
        self.0.iter().zip(p).map(|(x, y)| x * y).sum()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.0.iter().map(|x| Value::String(q_to_string(x))).collect())
    }

    pub fn from_json(v: &Value, path: &str) -> Result<Self> {
        let a = v.as_array().ok_or_else(|| Error::parse(path, "expected an array"))?;
        if a.is_empty() {
            return Err(Error::parse(path, "empty vector"));
        }
        Ok(VnVector(
            a.iter()
                .enumerate()
                .map(|(i, x)| q_from_json(x, &format!("{path}[{i}]")))
                .collect::<Result<_>>()?,
        ))
    }
}

impl Add for &VnVector {
    type Output = VnVector;
    fn add(self, o: &VnVector) -> VnVector {
        VnVector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &VnVector {
    type Output = VnVector;
    fn sub(self, o: &VnVector) -> VnVector {
        VnVector(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &VnVector {
    type Output = VnVector;
    fn neg(self) -> VnVector {
        VnVector(self.0.iter().map(|a| -a).collect())
    }
}

/// Row `i` holds the coefficients of `X^i · A`.
pub fn action_matrix(a: &Mat2, n: usize) -> Result<Vec<Vec<Q>>> {
    if a.det().is_zero() {
        return Err(Error::SingularMatrix);
    }
    let num = UniPoly::new(vec![a.b.clone(), a.a.clone()]);
    let den = UniPoly::new(vec![a.d.clone(), a.c.clone()]);
    let mut num_pows = vec![UniPoly::constant(Q::from_integer(1.into()))];
    let mut den_pows = num_pows.clone();
    for _ in 0..n {
        num_pows.push(num_pows.last().expect("nonempty") * &num);
        den_pows.push(den_pows.last().expect("nonempty") * &den);
    }
    Ok((0..=n)
        .map(|i| {
            let p = &num_pows[i] * &den_pows[n - i];
            (0..=n).map(|k| p.coeff(k)).collect()
        })
        .collect())
}

pub fn pn_action(p: &[Q], a: &Mat2, n: usize) -> Result<Vec<Q>> {
    if p.len() != n + 1 {
        return Err(Error::DegreeMismatch(p.len() as i64 - 1, n as i64));
    }
    let m = action_matrix(a, n)?;
    Ok((0..=n).map(|k| (0..=n).map(|i| &p[i] * &m[i][k]).sum()).collect())
}

/// `(A·φ)(P) = φ(P·A)`.
pub fn vn_action(phi: &VnVector, a: &Mat2) -> Result<VnVector> {
    let n = phi.degree();
    let m = action_matrix(a, n)?;
    Ok(VnVector((0..=n).map(|i| (0..=n).map(|k| &m[i][k] * &phi.0[k]).sum()).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn qs(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn translation_of_x() {
        let a = Mat2::from_ints(1, 1, 0, 1);
        assert_eq!(pn_action(&qs(&[0, 1]), &a, 1).unwrap(), qs(&[1, 1]));
        let p = qs(&[3, -1, 4]);
        assert_eq!(pn_action(&p, &Mat2::identity(), 2).unwrap(), p);
    }

    #[test]
    fn right_action_and_duality() {
        let a = Mat2::from_ints(2, 1, 3, -1);
        let b = Mat2::from_ints(0, 1, -1, 5);
        let p = qs(&[1, 2, -3, 1]);
        let lhs = pn_action(&pn_action(&p, &a, 3).unwrap(), &b, 3).unwrap();
        assert_eq!(lhs, pn_action(&p, &(&a * &b), 3).unwrap());
        let phi = VnVector(qs(&[2, 0, 1, -7]));
        assert_eq!(vn_action(&phi, &a).unwrap().apply(&p), phi.apply(&pn_action(&p, &a, 3).unwrap()));
        let lhs = vn_action(&vn_action(&phi, &b).unwrap(), &a).unwrap();
        assert_eq!(lhs, vn_action(&phi, &(&a * &b)).unwrap());
        assert_eq!(vn_action(&phi, &Mat2::from_ints(1, 2, 2, 4)), Err(Error::SingularMatrix));
    }
}
