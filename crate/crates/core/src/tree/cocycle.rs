//! Vertex and edge cochains with values in `V_n`, the coboundary, the
//! harmonicity test and the connecting map to `H¹(Γ, V_n)` for a free group.

use std::collections::{BTreeMap, VecDeque};

use num_traits::Zero;
use serde_json::{json, Map, Value};

use super::vn::{action_matrix, vn_action, VnVector};
use super::{BruhatTits, TreeEdge, TreeVertex};
use crate::error::{Error, Result};
use crate::linalg::{nullspace, rref};
use crate::matrix::Mat2;
use crate::rational::Q;

#[derive(Clone, Debug, PartialEq)]
pub struct Cochain0 {
    pub n: usize,
    pub values: BTreeMap<TreeVertex, VnVector>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cochain1 {
    pub n: usize,
    pub values: BTreeMap<TreeEdge, VnVector>,
}

impl Cochain0 {
    pub fn new(n: usize) -> Self {
        Cochain0 { n, values: BTreeMap::new() }
    }

    pub fn constant(n: usize, vertices: &[TreeVertex], value: &VnVector) -> Self {
        Cochain0 { n, values: vertices.iter().map(|v| (v.clone(), value.clone())).collect() }
    }
}

impl Cochain1 {
    pub fn new(n: usize) -> Self {
        Cochain1 { n, values: BTreeMap::new() }
    }

    pub fn get(&self, e: &TreeEdge) -> Option<&VnVector> {
        self.values.get(e)
    }

    pub fn insert(&mut self, e: TreeEdge, v: VnVector) {
        self.values.insert(e, v);
    }

    /// Sets `c(e) = v` and `c(ē) = -v`.
    pub fn insert_alternating(&mut self, e: TreeEdge, v: VnVector) {
        self.values.insert(e.reversed(), -&v);
        self.values.insert(e, v);
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(VnVector::is_zero)
    }

    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> = self
            .values
            .iter()
            .map(|(e, v)| json!({"source": e.source.to_json(), "target": e.target.to_json(), "value": v.to_json()}))
            .collect();
        json!({"n": self.n, "edges": edges})
    }

    pub fn from_json(tree: &BruhatTits, v: &Value, path: &str) -> Result<Self> {
        let n = v
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::parse(format!("{path}.n"), "expected a non-negative integer"))? as usize;
        let edges = v
            .get("edges")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse(format!("{path}.edges"), "expected an array"))?;
        let mut c = Cochain1::new(n);
        for (i, e) in edges.iter().enumerate() {
            let ep = format!("{path}.edges[{i}]");
            let s = tree.vertex_from_json(e.get("source").unwrap_or(&Value::Null), &format!("{ep}.source"))?;
            let t = tree.vertex_from_json(e.get("target").unwrap_or(&Value::Null), &format!("{ep}.target"))?;
            let edge = tree.edge(s, t).map_err(|err| Error::parse(&ep, err.to_string()))?;
            let val = VnVector::from_json(e.get("value").unwrap_or(&Value::Null), &format!("{ep}.value"))?;
            if val.degree() != n {
                return Err(Error::parse(format!("{ep}.value"), format!("expected {} entries", n + 1)));
            }
            c.insert(edge, val);
        }
        Ok(c)
    }
}

/// `δf(e) = f(source) - f(target)` on every edge with both ends in the domain.
pub fn coboundary(tree: &BruhatTits, f: &Cochain0) -> Cochain1 {
    let mut c = Cochain1::new(f.n);
    for (v, fv) in &f.values {
        for w in tree.neighbors(v) {
            if let Some(fw) = f.values.get(&w) {
                c.insert(TreeEdge { source: v.clone(), target: w }, fv - fw);
            }
        }
    }
    c
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct HarmonicCheck {
    pub missing_reversals: Vec<TreeEdge>,
    pub non_alternating: Vec<TreeEdge>,
    /// Vertices whose `p + 1` outgoing values are all known but do not sum to zero.
    pub bad_vertices: Vec<TreeVertex>,
    pub interior_vertices: usize,
}

impl HarmonicCheck {
    pub fn is_harmonic(&self) -> bool {
        self.missing_reversals.is_empty() && self.non_alternating.is_empty() && self.bad_vertices.is_empty()
    }
}

pub fn harmonic_check(tree: &BruhatTits, c: &Cochain1) -> HarmonicCheck {
    let mut out = HarmonicCheck::default();
    let mut sources: Vec<&TreeVertex> = Vec::new();
    for (e, v) in &c.values {
        match c.values.get(&e.reversed()) {
            None => out.missing_reversals.push(e.clone()),
            Some(r) if !(v + r).is_zero() => out.non_alternating.push(e.clone()),
            _ => {}
        }
        if sources.last() != Some(&&e.source) {
            sources.push(&e.source);
        }
    }
    sources.dedup();
    for v in sources {
        let vals: Option<Vec<&VnVector>> = tree.out_edges(v).iter().map(|e| c.values.get(e)).collect();
        if let Some(vals) = vals {
            out.interior_vertices += 1;
            let sum = vals.iter().fold(VnVector::zero(c.n), |acc, x| &acc + x);
            if !sum.is_zero() {
                out.bad_vertices.push(v.clone());
            }
        }
    }
    out
}

/// `c(γe) = γ·c(e)` wherever both sides are known.
pub fn check_invariant(tree: &BruhatTits, c: &Cochain1, gens: &[Mat2]) -> Result<usize> {
    let mut checked = 0;
    for (i, g) in gens.iter().enumerate() {
        for (e, v) in &c.values {
            let ge = tree.act_edge(g, e)?;
            if let Some(w) = c.values.get(&ge) {
                if vn_action(v, g)? != *w {
                    return Err(Error::NotInvariant(format!("generator {i} at edge {e:?}")));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

/// `f` with `δf = c` on the connected part of the support containing `base`
/// and `f(base) = 0`.
pub fn integrate(tree: &BruhatTits, c: &Cochain1, base: &TreeVertex) -> Result<Cochain0> {
    let mut f = Cochain0::new(c.n);
    f.values.insert(base.clone(), VnVector::zero(c.n));
    let mut queue = VecDeque::from([base.clone()]);
    while let Some(v) = queue.pop_front() {
        let fv = f.values[&v].clone();
        for w in tree.neighbors(&v) {
            let e = TreeEdge { source: v.clone(), target: w.clone() };
            let Some(cv) = c.values.get(&e) else { continue };
            let fw = &fv - cv;
            match f.values.get(&w) {
                Some(old) if *old != fw => {
                    return Err(Error::NotACocycle(format!("δf ≠ c on {e:?}")));
                }
                Some(_) => {}
                None => {
                    f.values.insert(w.clone(), fw);
                    queue.push_back(w);
                }
            }
        }
    }
    Ok(f)
}

/// A class in `V_n^g` modulo `{(γ_i m - m)_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsClass {
    /// `(γ_i f - f)(base)` for the integrated `f`.
    pub raw: Vec<VnVector>,
    /// Representative with every pivot coordinate of the coboundary span cleared.
    pub reduced: Vec<Q>,
    pub coboundary_rank: usize,
}

impl EpsClass {
    pub fn is_zero(&self) -> bool {
        self.reduced.iter().all(Zero::is_zero)
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("raw".into(), Value::Array(self.raw.iter().map(VnVector::to_json).collect()));
        m.insert("reduced".into(), VnVector(self.reduced.clone()).to_json());
        m.insert("coboundary_rank".into(), json!(self.coboundary_rank));
        m.insert("is_zero".into(), json!(self.is_zero()));
        Value::Object(m)
    }
}

/// Rows `(γ_i e_k - e_k)_i` spanning the coboundaries.
pub fn coboundary_rows(gens: &[Mat2], n: usize) -> Result<Vec<Vec<Q>>> {
    let mats: Vec<Vec<Vec<Q>>> = gens.iter().map(|g| action_matrix(g, n)).collect::<Result<_>>()?;
    Ok((0..=n)
        .map(|k| {
            let mut row = Vec::with_capacity(gens.len() * (n + 1));
            for m in &mats {
                // γ·e_k has i-th entry m[i][k]
                row.extend((0..=n).map(|i| {
                    let x = m[i][k].clone();
                    if i == k {
                        x - Q::from_integer(1.into())
                    } else {
                        x
                    }
                }));
            }
            row
        })
        .collect())
}

/// Dimension of `V_n^Γ`.
pub fn invariants_dim(gens: &[Mat2], n: usize) -> Result<usize> {
    let mut rows = Vec::new();
    for g in gens {
        let m = action_matrix(g, n)?;
        for i in 0..=n {
            let mut r: Vec<Q> = (0..=n).map(|k| m[i][k].clone()).collect();
            r[i] -= Q::from_integer(1.into());
            rows.push(r);
        }
    }
    Ok(nullspace(&rows, n + 1).len())
}

/// The connecting map: integrate `c` from `base` to `f` and return the class of
/// `(γ_i · f(γ_i⁻¹ base))_i`.
pub fn connecting_eps(tree: &BruhatTits, c: &Cochain1, gens: &[Mat2], base: &TreeVertex) -> Result<EpsClass> {
    check_invariant(tree, c, gens)?;
    let f = integrate(tree, c, base)?;
    let n = c.n;
    let mut raw = Vec::with_capacity(gens.len());
    for g in gens {
        let t = tree.act(&g.inv()?, base)?;
        let ft = match f.values.get(&t) {
            Some(x) => x,
            None => {
                let missing = tree
                    .path_edges(base, &t)
                    .into_iter()
                    .find(|e| !c.values.contains_key(e))
                    .map_or_else(|| format!("{t:?}"), |e| format!("{e:?}"));
                return Err(Error::MissingEdge(missing));
            }
        };
        raw.push(vn_action(ft, g)?);
    }
    let mut rows = coboundary_rows(gens, n)?;
    let pivots = rref(&mut rows);
    let mut x: Vec<Q> = raw.iter().flat_map(|v| v.0.iter().cloned()).collect();
    for (r, &pc) in pivots.iter().enumerate() {
        if !x[pc].is_zero() {
            let t = x[pc].clone();
            for (xi, ri) in x.iter_mut().zip(&rows[r]) {
                *xi -= &t * ri;
            }
        }
    }
    Ok(EpsClass { raw, reduced: x, coboundary_rank: pivots.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank;
    use crate::rational::q;

    fn vec_q(v: &[i64]) -> VnVector {
        VnVector(v.iter().map(|&x| q(x)).collect())
    }

    #[test]
    fn coboundary_of_constant_vanishes() {
        let t = BruhatTits::new(3).unwrap();
        let verts = t.ball(&t.base(), 2);
        let f = Cochain0::constant(2, &verts, &vec_q(&[1, -2, 5]));
        let c = coboundary(&t, &f);
        assert!(!c.values.is_empty());
        assert!(c.is_zero());
    }

    #[test]
    fn harmonic_acceptance_and_rejection() {
        let t = BruhatTits::new(2).unwrap();
        let base = t.base();
        let nb = t.neighbors(&base);
        let mut c = Cochain1::new(0);
        c.insert_alternating(TreeEdge { source: base.clone(), target: nb[0].clone() }, vec_q(&[1]));
        c.insert_alternating(TreeEdge { source: base.clone(), target: nb[1].clone() }, vec_q(&[2]));
        c.insert_alternating(TreeEdge { source: base.clone(), target: nb[2].clone() }, vec_q(&[-3]));
        let h = harmonic_check(&t, &c);
        assert!(h.is_harmonic());
        assert_eq!(h.interior_vertices, 1);
        c.insert_alternating(TreeEdge { source: base.clone(), target: nb[2].clone() }, vec_q(&[-2]));
        let h = harmonic_check(&t, &c);
        assert_eq!(h.bad_vertices, vec![base.clone()]);
        c.insert(TreeEdge { source: nb[2].clone(), target: base.clone() }, vec_q(&[5]));
        assert!(!harmonic_check(&t, &c).non_alternating.is_empty());
    }

    #[test]
    fn coboundary_rank_vs_invariants() {
        let gens = [Mat2::from_ints(1, 1, 0, 1), Mat2::from_ints(1, 0, 3, 1)];
        let rows = coboundary_rows(&gens, 2).unwrap();
        assert_eq!(rank(&rows), 3 - invariants_dim(&gens, 2).unwrap());
        let unip = [Mat2::from_ints(1, 1, 0, 1), Mat2::from_ints(1, 5, 0, 1)];
        assert_eq!(invariants_dim(&unip, 2).unwrap(), 1);
        assert_eq!(rank(&coboundary_rows(&unip, 2).unwrap()), 2);
    }
}
