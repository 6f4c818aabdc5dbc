//! 2x2 matrices over Q.

use std::fmt;
use std::ops::Mul;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::padic::PadicScalar;
use crate::rational::{q, q_from_json, q_to_string, Q};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: Q,
    pub b: Q,
    pub c: Q,
    pub d: Q,
}

impl Mat2 {
    pub fn new(a: Q, b: Q, c: Q, d: Q) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2::new(q(a), q(b), q(c), q(d))
    }

    pub fn identity() -> Self {
        Mat2::from_ints(1, 0, 0, 1)
    }

    pub fn det(&self) -> Q {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> Q {
        &self.a + &self.d
    }

    /// Adjugate; for trace zero matrices this is `-M`.
    pub fn adj(&self) -> Self {
        Mat2::new(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    pub fn inv(&self) -> Result<Self> {
        let det = self.det();
        if det.is_zero() {
            return Err(Error::SingularMatrix);
        }
        let a = self.adj();
        Ok(Mat2::new(&a.a / &det, &a.b / &det, &a.c / &det, &a.d / &det))
    }

    pub fn is_scalar(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    pub fn is_identity(&self) -> bool {
        self.is_scalar() && self.a.is_one()
    }

    /// `(cz + d)` at a p-adic point.
    pub fn automorphy(&self, z: &PadicScalar) -> PadicScalar {
        let ctx = z.context();
        &(&ctx.from_q(&self.c) * z) + &ctx.from_q(&self.d)
    }

    /// Möbius action `(az + b)/(cz + d)`.
    pub fn mobius(&self, z: &PadicScalar) -> Result<PadicScalar> {
        let ctx = z.context();
        let num = &(&ctx.from_q(&self.a) * z) + &ctx.from_q(&self.b);
        num.div(&self.automorphy(z))
    }

    pub fn to_json(&self) -> Value {
        json!([
            [q_to_string(&self.a), q_to_string(&self.b)],
            [q_to_string(&self.c), q_to_string(&self.d)]
        ])
    }

    /// Accepts `[[a,b],[c,d]]` with integer or rational-string entries.
    pub fn from_json(v: &Value, path: &str) -> Result<Self> {
        let rows = v
            .as_array()
            .filter(|r| r.len() == 2)
            .ok_or_else(|| Error::parse(path, "expected [[a,b],[c,d]]"))?;
        let mut e = Vec::with_capacity(4);
        for (i, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .filter(|r| r.len() == 2)
                .ok_or_else(|| Error::parse(format!("{path}[{i}]"), "expected a row of two entries"))?;
            for (j, x) in row.iter().enumerate() {
                e.push(q_from_json(x, &format!("{path}[{i}][{j}]"))?);
            }
        }
        let mut it = e.into_iter();
        let mut next = || it.next().expect("four entries");
        Ok(Mat2::new(next(), next(), next(), next()))
    }

    /// Parses `a,b,c,d` (row-major) or a JSON matrix.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('[') {
            let v: Value = serde_json::from_str(t).map_err(|e| Error::parse("matrix", e.to_string()))?;
            return Mat2::from_json(&v, "matrix");
        }
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::parse("matrix", "expected four comma separated entries"));
        }
        let mut e = Vec::with_capacity(4);
        for (i, p) in parts.iter().enumerate() {
            e.push(
                crate::rational::parse_q(p)
                    .ok_or_else(|| Error::parse(format!("matrix[{i}]"), format!("not a rational: {p}")))?,
            );
        }
        Ok(Mat2::new(e[0].clone(), e[1].clone(), e[2].clone(), e[3].clone()))
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, o: &Mat2) -> Mat2 {
        Mat2::new(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            q_to_string(&self.a),
            q_to_string(&self.b),
            q_to_string(&self.c),
            q_to_string(&self.d)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicContext;

    #[test]
    fn inverse_and_parse() {
        let m = Mat2::from_ints(2, 1, 1, 1);
        assert!((&m * &m.inv().unwrap()).is_identity());
        assert_eq!(Mat2::parse("2,1,1,1").unwrap(), m);
        assert_eq!(Mat2::parse("[[2,1],[1,\"1\"]]").unwrap(), m);
        assert!(Mat2::from_ints(1, 2, 2, 4).inv().is_err());
    }

    #[test]
    fn mobius_composes() {
        let ctx = PadicContext::new(7, 10).unwrap();
        let z = &ctx.s() + &ctx.from_int(3);
        let g = Mat2::from_ints(1, 2, 3, 7);
        let h = Mat2::from_ints(0, -1, 1, 5);
        let lhs = g.mobius(&h.mobius(&z).unwrap()).unwrap();
        assert_eq!(lhs, (&g * &h).mobius(&z).unwrap());
    }
}
