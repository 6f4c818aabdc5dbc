//! The Bruhat–Tits tree of PGL₂(Q_p).
//!
//! A vertex is the closed disk `b + p^m Z_p`, i.e. the lattice class with
//! basis columns of `[[p^m, b], [0, 1]]`. The normal form keeps `b` in
//! `Z[1/p] ∩ [0, p^m)`. Edges go from a disk to its `p` maximal subdisks and
//! to the unique disk of radius `p^(1-m)` containing it.

pub mod cocycle;
pub mod residue;
pub mod vn;

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::Mat2;
use crate::padic::{split_p, UpperHalfPoint};
use crate::rational::{q_from_json, q_to_string, Q};

pub use cocycle::{Cochain0, Cochain1, EpsClass, HarmonicCheck};
pub use residue::{residue_map_i, RationalFunction};
pub use vn::VnVector;

/// `v_p(x)`, `None` for zero.
pub fn vp(x: &Q, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let (a, _) = split_p(x.numer(), p);
    let (b, _) = split_p(x.denom(), p);
    Some(a - b)
}

fn pow_p(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

fn pow_pq(p: u64, e: i64) -> Q {
    if e >= 0 {
        Q::from_integer(pow_p(p, e as u32))
    } else {
        Q::new(BigInt::one(), pow_p(p, (-e) as u32))
    }
}

/// The representative of `x ∈ Z_(p)[1/p]` modulo `p^m` lying in `Z[1/p] ∩ [0, p^m)`.
pub fn reduce_mod(x: &Q, m: i64, p: u64) -> Q {
    let Some(v) = vp(x, p) else {
        return Q::zero();
    };
    if v >= m {
        return Q::zero();
    }
    // x = p^v * r/s with r, s prime to p
    let unit = x / pow_pq(p, v);
    let modulus = pow_p(p, (m - v) as u32);
    let s_inv = crate::padic::mod_inverse(&unit.denom().mod_floor(&modulus), &modulus)
        .expect("denominator is prime to p");
    let digits = (unit.numer() * s_inv).mod_floor(&modulus);
    Q::from_integer(digits) * pow_pq(p, v)
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeVertex {
    pub m: i64,
    pub b: Q,
}

impl TreeVertex {
    pub fn base() -> Self {
        TreeVertex { m: 0, b: Q::zero() }
    }

    pub fn to_json(&self) -> Value {
        json!({"m": self.m, "b": q_to_string(&self.b)})
    }

    pub fn from_json(v: &Value, path: &str) -> Result<(i64, Q)> {
        let m = v
            .get("m")
            .and_then(Value::as_i64)
            .ok_or_else(|| Error::parse(format!("{path}.m"), "expected an integer"))?;
        let b = match v.get("b") {
            None => Q::zero(),
            Some(b) => q_from_json(b, &format!("{path}.b"))?,
        };
        Ok((m, b))
    }
}

impl fmt::Debug for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D({}, {})", q_to_string(&self.b), self.m)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeEdge {
    pub source: TreeVertex,
    pub target: TreeVertex,
}

impl TreeEdge {
    pub fn reversed(&self) -> Self {
        TreeEdge { source: self.target.clone(), target: self.source.clone() }
    }

    pub fn to_json(&self) -> Value {
        json!({"source": self.source.to_json(), "target": self.target.to_json()})
    }
}

impl fmt::Debug for TreeEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} -> {:?}", self.source, self.target)
    }
}

/// Result of reducing a point of the upper half plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reduction {
    Vertex(TreeVertex),
    Edge(TreeEdge),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BruhatTits {
    pub p: u64,
}

impl BruhatTits {
    pub fn new(p: u64) -> Result<Self> {
        if !crate::padic::is_prime(p) {
            return Err(Error::InvalidContext(format!("{p} is not prime")));
        }
        Ok(BruhatTits { p })
    }

    /// Normal form of the disk `b + p^m Z_p`; `b` must be p-integral up to a power of `p`.
    pub fn vertex(&self, m: i64, b: &Q) -> TreeVertex {
        TreeVertex { m, b: reduce_mod(b, m, self.p) }
    }

    pub fn base(&self) -> TreeVertex {
        TreeVertex::base()
    }

    pub fn edge(&self, source: TreeVertex, target: TreeVertex) -> Result<TreeEdge> {
        if self.distance(&source, &target) != 1 {
            return Err(Error::NotAdjacent(format!("{source:?} and {target:?}")));
        }
        Ok(TreeEdge { source, target })
    }

    pub fn contains_point(&self, v: &TreeVertex, x: &Q) -> bool {
        vp(&(x - &v.b), self.p).is_none_or(|e| e >= v.m)
    }

    /// `true` if `w` is one of the `p` maximal subdisks of `v`.
    pub fn is_child(&self, v: &TreeVertex, w: &TreeVertex) -> bool {
        w.m == v.m + 1 && self.contains_point(v, &w.b)
    }

    pub fn parent(&self, v: &TreeVertex) -> TreeVertex {
        self.vertex(v.m - 1, &v.b)
    }

    pub fn children(&self, v: &TreeVertex) -> Vec<TreeVertex> {
        let step = pow_pq(self.p, v.m);
        (0..self.p as i64)
            .map(|t| self.vertex(v.m + 1, &(&v.b + &step * Q::from_integer(t.into()))))
            .collect()
    }

    /// The `p + 1` adjacent vertices.
    pub fn neighbors(&self, v: &TreeVertex) -> Vec<TreeVertex> {
        let mut out = self.children(v);
        out.push(self.parent(v));
        out
    }

    pub fn out_edges(&self, v: &TreeVertex) -> Vec<TreeEdge> {
        self.neighbors(v)
            .into_iter()
            .map(|w| TreeEdge { source: v.clone(), target: w })
            .collect()
    }

    /// Level of the smallest disk containing both.
    fn meet_level(&self, v: &TreeVertex, w: &TreeVertex) -> i64 {
        let lvl = v.m.min(w.m);
        match vp(&(&v.b - &w.b), self.p) {
            None => lvl,
            Some(e) => lvl.min(e),
        }
    }

    pub fn distance(&self, v: &TreeVertex, w: &TreeVertex) -> u64 {
        let m = self.meet_level(v, w);
        ((v.m - m) + (w.m - m)) as u64
    }

    /// The geodesic from `v` to `w`, both ends included.
    pub fn path(&self, v: &TreeVertex, w: &TreeVertex) -> Vec<TreeVertex> {
        let m = self.meet_level(v, w);
        let mut up: Vec<TreeVertex> = (m..=v.m).rev().map(|k| self.vertex(k, &v.b)).collect();
        let down = (m..w.m).map(|k| self.vertex(k + 1, &w.b));
        up.extend(down);
        up
    }

    pub fn path_edges(&self, v: &TreeVertex, w: &TreeVertex) -> Vec<TreeEdge> {
        self.path(v, w)
            .windows(2)
            .map(|e| TreeEdge { source: e[0].clone(), target: e[1].clone() })
            .collect()
    }

    /// All vertices within `radius` of `center`.
    pub fn ball(&self, center: &TreeVertex, radius: u64) -> Vec<TreeVertex> {
        let mut seen = vec![center.clone()];
        let mut queue = VecDeque::from([(center.clone(), 0u64)]);
        while let Some((v, d)) = queue.pop_front() {
            if d == radius {
                continue;
            }
            for w in self.neighbors(&v) {
                if !seen.contains(&w) {
                    seen.push(w.clone());
                    queue.push_back((w, d + 1));
                }
            }
        }
        seen.sort();
        seen
    }

    /// `g · v` for `g ∈ GL₂(Q)`, acting on lattices by left multiplication.
    pub fn act(&self, g: &Mat2, v: &TreeVertex) -> Result<TreeVertex> {
        if g.det().is_zero() {
            return Err(Error::SingularMatrix);
        }
        let pm = pow_pq(self.p, v.m);
        let (a, b) = (&g.a * &pm, &g.a * &v.b + &g.b);
        let (c, d) = (&g.c * &pm, &g.c * &v.b + &g.d);
        // column operations over GL2(Z_p) to make the lower left entry vanish
        let (a1, b1, d1) = if c.is_zero() {
            (a, b, d)
        } else if !d.is_zero() && vp(&c, self.p) >= vp(&d, self.p) {
            let t = &c / &d;
            (&a - &t * &b, b, d)
        } else {
            let t = &d / &c;
            (&b - &t * &a, a, c)
        };
        let m = vp(&a1, self.p).expect("nonzero determinant") - vp(&d1, self.p).expect("nonzero");
        Ok(self.vertex(m, &(&b1 / &d1)))
    }

    pub fn act_edge(&self, g: &Mat2, e: &TreeEdge) -> Result<TreeEdge> {
        Ok(TreeEdge { source: self.act(g, &e.source)?, target: self.act(g, &e.target)? })
    }

    /// The vertex closest to `z`: writing `z = x + y s`, it is the disk
    /// `x + p^(v(y)) Z_p`. Points of Q_{p²} never reduce to an edge
    /// midpoint, but the return type allows it.
    pub fn reduce_point(&self, z: &UpperHalfPoint) -> Result<Reduction> {
        let zz = z.z();
        if zz.context().p != self.p {
            return Err(Error::InvalidContext("point and tree use different primes".into()));
        }
        let y = zz.s_part();
        let vy = y.valuation().ok_or(Error::PointOnBoundary)?;
        let x = zz.rational_part().to_rational_mod(vy)?;
        Ok(Reduction::Vertex(self.vertex(vy, &x)))
    }

    pub fn vertex_from_json(&self, v: &Value, path: &str) -> Result<TreeVertex> {
        let (m, b) = TreeVertex::from_json(v, path)?;
        if vp(&b, self.p).is_some() && b.denom().is_positive() {
            let (_, unit) = split_p(b.denom(), self.p);
            if !unit.is_one() {
                return Err(Error::parse(format!("{path}.b"), "denominator must be a power of p"));
            }
        }
        Ok(self.vertex(m, &b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicContext;
    use crate::rational::{q, qf};
    use std::collections::HashMap;

    fn bfs_distance(t: &BruhatTits, a: &TreeVertex, b: &TreeVertex, cap: u64) -> Option<u64> {
        let mut dist = HashMap::from([(a.clone(), 0u64)]);
        let mut queue = VecDeque::from([a.clone()]);
        while let Some(v) = queue.pop_front() {
            let d = dist[&v];
            if &v == b {
                return Some(d);
            }
            if d == cap {
                continue;
            }
            for w in t.neighbors(&v) {
                if !dist.contains_key(&w) {
                    dist.insert(w.clone(), d + 1);
                    queue.push_back(w);
                }
            }
        }
        None
    }

    #[test]
    fn reduce_mod_normal_forms() {
        assert_eq!(reduce_mod(&q(7), 1, 5), q(2));
        assert_eq!(reduce_mod(&qf(1, 2), 2, 5), q(13));
        assert_eq!(reduce_mod(&qf(7, 5), 0, 5), qf(2, 5));
        assert_eq!(reduce_mod(&q(3), -1, 5), q(0));
    }

    #[test]
    fn neighbors_and_symmetry() {
        for p in [2u64, 3, 5] {
            let t = BruhatTits::new(p).unwrap();
            for v in t.ball(&t.base(), 2) {
                let nb = t.neighbors(&v);
                assert_eq!(nb.len(), p as usize + 1);
                for w in &nb {
                    assert!(t.neighbors(w).contains(&v));
                    assert_eq!(t.distance(&v, w), 1);
                }
            }
        }
    }

    #[test]
    fn distance_matches_bfs() {
        let t = BruhatTits::new(3).unwrap();
        let base = t.base();
        let v = t.vertex(2, &q(4));
        assert_eq!(t.distance(&base, &v), 2);
        assert_eq!(bfs_distance(&t, &base, &v, 6), Some(2));
        for a in t.ball(&base, 2) {
            for b in t.ball(&t.vertex(1, &q(1)), 1) {
                assert_eq!(Some(t.distance(&a, &b)), bfs_distance(&t, &a, &b, 5));
                let path = t.path(&a, &b);
                assert_eq!(path.len() as u64, t.distance(&a, &b) + 1);
                assert!(path.windows(2).all(|e| t.distance(&e[0], &e[1]) == 1));
            }
        }
    }

    #[test]
    fn action_is_a_group_action() {
        let t = BruhatTits::new(3).unwrap();
        let g = Mat2::from_ints(2, 1, 7, 4);
        let h = Mat2::from_ints(3, 0, 1, 1);
        for v in t.ball(&t.base(), 2) {
            let lhs = t.act(&g, &t.act(&h, &v).unwrap()).unwrap();
            assert_eq!(lhs, t.act(&(&g * &h), &v).unwrap());
            assert_eq!(t.act(&Mat2::identity(), &v).unwrap(), v);
            assert_eq!(t.act(&Mat2::from_ints(5, 0, 0, 5), &v).unwrap(), v);
        }
        // z -> pz moves down the geodesic towards 0
        assert_eq!(t.act(&Mat2::from_ints(3, 0, 0, 1), &t.base()).unwrap(), t.vertex(1, &q(0)));
    }

    #[test]
    fn reduction() {
        let ctx = PadicContext::new(5, 10).unwrap();
        let t = BruhatTits::new(5).unwrap();
        let z = UpperHalfPoint::new(ctx.s()).unwrap();
        assert_eq!(t.reduce_point(&z).unwrap(), Reduction::Vertex(t.base()));
        let z = UpperHalfPoint::new(&ctx.from_int(7) + &ctx.s().shift(2)).unwrap();
        assert_eq!(t.reduce_point(&z).unwrap(), Reduction::Vertex(t.vertex(2, &q(7))));
        let g = Mat2::from_ints(1, 1, 0, 1);
        let gz = UpperHalfPoint::new(g.mobius(z.z()).unwrap()).unwrap();
        let Reduction::Vertex(v) = t.reduce_point(&z).unwrap() else { unreachable!() };
        assert_eq!(t.reduce_point(&gz).unwrap(), Reduction::Vertex(t.act(&g, &v).unwrap()));
        assert!(UpperHalfPoint::new(ctx.from_int(3)).is_err());
    }
}
