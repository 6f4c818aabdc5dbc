//! Rational differentials `f(z) dz` with poles in P¹(Q) and their residues
//! along edges of the tree.
//!
//! Orientation: `I(ω)(e)` sums the residues at the ends on the target side of
//! `e`. For the standard edge from `Z_p` to `pZ_p` that is the side
//! containing 0; every other edge follows by equivariance.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::vn::VnVector;
use super::{BruhatTits, Cochain1, TreeEdge};
use crate::error::{Error, Result};
use crate::poly::UniPoly;
use crate::rational::{binomial, q_from_json, q_to_string, Q};

/// `poly(z) + Σ c_(q,k) / (z - q)^k`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RationalFunction {
    pub poly: UniPoly,
    pub poles: BTreeMap<(Q, u32), Q>,
}

impl RationalFunction {
    pub fn polynomial(p: UniPoly) -> Self {
        RationalFunction { poly: p, poles: BTreeMap::new() }
    }

    /// `c / (z - q)^k`.
    pub fn pole(q: Q, k: u32, c: Q) -> Self {
        let mut f = RationalFunction::default();
        f.add_pole(q, k, c);
        f
    }

    fn add_pole(&mut self, q: Q, k: u32, c: Q) {
        assert!(k >= 1, "pole order must be positive");
        let e = self.poles.entry((q.clone(), k)).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.poles.remove(&(q, k));
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.poly = &out.poly + &o.poly;
        for ((q, k), c) in &o.poles {
            out.add_pole(q.clone(), *k, c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut out = RationalFunction::polynomial(self.poly.scale(s));
        for ((q, k), c) in &self.poles {
            out.add_pole(q.clone(), *k, c * s);
        }
        out
    }

    pub fn derivative(&self) -> Self {
        let mut out = RationalFunction::polynomial(self.poly.derivative());
        for ((q, k), c) in &self.poles {
            out.add_pole(q.clone(), k + 1, -c * Q::from_integer((*k).into()));
        }
        out
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |f, _| f.derivative())
    }

    pub fn finite_poles(&self) -> Vec<Q> {
        let mut v: Vec<Q> = self.poles.keys().map(|(q, _)| q.clone()).collect();
        v.dedup();
        v
    }

    /// `Res_q z^i f(z) dz`.
    pub fn residue_at(&self, q: &Q, i: u32) -> Q {
        let mut r = Q::zero();
        for ((q0, k), c) in self.poles.range((q.clone(), 0)..=(q.clone(), u32::MAX)) {
            debug_assert_eq!(q0, q);
            // coefficient of (z-q)^(k-1) in z^i
            if k - 1 <= i {
                let e = (i - (k - 1)) as usize;
                r += c * Q::from_integer(binomial(i as u64, (k - 1) as u64)) * num_traits::pow(q.clone(), e);
            }
        }
        r
    }

    /// `Res_∞ z^i f(z) dz`, minus the sum of the finite residues.
    pub fn residue_at_infinity(&self, i: u32) -> Q {
        -self.finite_poles().iter().map(|q| self.residue_at(q, i)).sum::<Q>()
    }

    pub fn to_json(&self) -> Value {
        let poles: Vec<Value> = self
            .poles
            .iter()
            .map(|((q, k), c)| json!({"q": q_to_string(q), "k": k, "c": q_to_string(c)}))
            .collect();
        json!({"poly": self.poly.to_json(), "poles": poles})
    }

    pub fn from_json(v: &Value, path: &str) -> Result<Self> {
        let mut f = match v.get("poly") {
            None => RationalFunction::default(),
            Some(p) => RationalFunction::polynomial(UniPoly::from_json(p, &format!("{path}.poly"))?),
        };
        if let Some(poles) = v.get("poles") {
            let poles = poles
                .as_array()
                .ok_or_else(|| Error::parse(format!("{path}.poles"), "expected an array"))?;
            for (i, p) in poles.iter().enumerate() {
                let pp = format!("{path}.poles[{i}]");
                let q = q_from_json(p.get("q").unwrap_or(&Value::Null), &format!("{pp}.q"))?;
                let k = p
                    .get("k")
                    .map_or(Some(1), Value::as_u64)
                    .filter(|&k| k >= 1 && k <= u32::MAX as u64)
                    .ok_or_else(|| Error::parse(format!("{pp}.k"), "expected a positive integer"))?;
                let c = match p.get("c") {
                    None => Q::one(),
                    Some(c) => q_from_json(c, &format!("{pp}.c"))?,
                };
                f.add_pole(q, k as u32, c);
            }
        }
        Ok(f)
    }
}

/// Whether the end `q` (`None` for ∞) lies on the target side of `e`.
pub fn on_target_side(tree: &BruhatTits, e: &TreeEdge, q: Option<&Q>) -> bool {
    if tree.is_child(&e.source, &e.target) {
        q.is_some_and(|q| tree.contains_point(&e.target, q))
    } else {
        q.is_none_or(|q| !tree.contains_point(&e.source, q))
    }
}

/// `I(ω)(e)(X^i) = Σ_(q on the target side of e) Res_q z^i f(z) dz`, `0 ≤ i ≤ n`.
pub fn residue_value(tree: &BruhatTits, f: &RationalFunction, n: usize, e: &TreeEdge) -> VnVector {
    let poles = f.finite_poles();
    let inside: Vec<&Q> = poles.iter().filter(|q| on_target_side(tree, e, Some(q))).collect();
    let inf = on_target_side(tree, e, None);
    VnVector(
        (0..=n as u32)
            .map(|i| {
                let mut r: Q = inside.iter().map(|q| f.residue_at(q, i)).sum();
                if inf {
                    r += f.residue_at_infinity(i);
                }
                r
            })
            .collect(),
    )
}

pub fn residue_map_i(tree: &BruhatTits, f: &RationalFunction, n: usize, edges: &[TreeEdge]) -> Cochain1 {
    let mut c = Cochain1::new(n);
    for e in edges {
        c.insert(e.clone(), residue_value(tree, f, n, e));
    }
    c
}
