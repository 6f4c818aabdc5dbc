//! Nearly rigid analytic functions: polynomials in `z`, `z*`, `u = 1/(z - z*)`
//! and a formal logarithm `L = log(z - z*)`.
//!
//! Terms are stored in the coordinates `(w, z*, L)` with `w = z - z*`, so the
//! relation `u (z - z*) = 1` holds by construction (`u = w^-1`) and equality
//! is comparison of sparse normal forms.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::padic::{PadicContext, PadicScalar, UpperHalfPoint};
use crate::poly::UniPoly;
use crate::rational::{binomial, q_from_json, q_to_string, Coeff, Q};

/// Monomial `w^w * (z*)^zs * L^log`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono {
    pub w: i32,
    pub zs: u32,
    pub log: u32,
}

impl Mono {
    pub const ONE: Mono = Mono { w: 0, zs: 0, log: 0 };

    pub fn new(w: i32, zs: u32, log: u32) -> Self {
        Mono { w, zs, log }
    }

    fn mul(self, o: Mono) -> Mono {
        Mono::new(self.w + o.w, self.zs + o.zs, self.log + o.log)
    }
}

/// Monomial `z^z (z*)^zs u^u L^log` in external coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExternalMono {
    pub z: u32,
    pub zs: u32,
    pub u: u32,
    pub log: u32,
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GradedForm {
    /// `f_0, ..., f_r` with `f = sum f_i(z) / (z - z*)^i`.
    pub parts: Vec<UniPoly>,
}

impl GradedForm {
    pub fn new(mut parts: Vec<UniPoly>) -> Self {
        while parts.len() > 1 && parts.last().is_some_and(UniPoly::is_zero) {
            parts.pop();
        }
        if parts.is_empty() {
            parts.push(UniPoly::zero());
        }
        GradedForm { parts }
    }

    pub fn depth(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn to_json(&self) -> Value {
        json!({"parts": self.parts.iter().map(UniPoly::to_json).collect::<Vec<_>>()})
    }

    pub fn from_json(v: &Value, path: &str) -> Result<Self> {
        match v.get("parts") {
            Some(Value::Array(a)) => Ok(GradedForm::new(
                a.iter()
                    .enumerate()
                    .map(|(i, p)| UniPoly::from_json(p, &format!("{path}.parts[{i}]")))
                    .collect::<Result<_>>()?,
            )),
            _ => Err(Error::parse(format!("{path}.parts"), "expected an array of polynomials")),
        }
    }
}

impl fmt::Debug for GradedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.parts).finish()
    }
}

/// Element of the nearly rigid ring with coefficients in `C`.
#[derive(Clone)]
pub struct NrFunction<C = Q> {
    terms: BTreeMap<Mono, C>,
}

impl<C: Coeff> NrFunction<C> {
    pub fn zero() -> Self {
        NrFunction {
            terms: BTreeMap::new(),
        }
    }

    pub fn term(m: Mono, c: C) -> Self {
        let mut f = Self::zero();
        f.add_term(m, c);
        f
    }

    pub fn constant(c: C) -> Self {
        Self::term(Mono::ONE, c)
    }

    fn add_term(&mut self, m: Mono, c: C) {
        if c.is_zero_coeff() {
            return;
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let s = old + c;
                if !s.is_zero_coeff() {
                    self.terms.insert(m, s);
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.add_term(*m, v.clone() * c.clone());
        }
        out
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.add_term(*m, v.scale_int(k));
        }
        out
    }

    /// Multiplies by `w^k = (z - z*)^k`.
    pub fn shift_w(&self, k: i32) -> Self {
        NrFunction {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Mono::new(m.w + k, m.zs, m.log), c.clone()))
                .collect(),
        }
    }

    /// `∂/∂z`: `w -> 1`, `z* -> 0`, `L -> u`.
    pub fn d_dz(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m.w != 0 {
                out.add_term(Mono::new(m.w - 1, m.zs, m.log), c.scale_int(m.w as i64));
            }
            if m.log > 0 {
                out.add_term(Mono::new(m.w - 1, m.zs, m.log - 1), c.scale_int(m.log as i64));
            }
        }
        out
    }

    /// `∂/∂z*`: `w -> -1`, `z* -> 1`, `L -> -u`.
    pub fn d_dzstar(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m.w != 0 {
                out.add_term(Mono::new(m.w - 1, m.zs, m.log), c.scale_int(-(m.w as i64)));
            }
            if m.zs > 0 {
                out.add_term(Mono::new(m.w, m.zs - 1, m.log), c.scale_int(m.zs as i64));
            }
            if m.log > 0 {
                out.add_term(Mono::new(m.w - 1, m.zs, m.log - 1), c.scale_int(-(m.log as i64)));
            }
        }
        out
    }

    /// Largest power of `u` (depth in the graded description).
    pub fn u_degree(&self) -> u32 {
        self.terms.keys().map(|m| (-m.w).max(0) as u32).max().unwrap_or(0)
    }

    pub fn log_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.log).max().unwrap_or(0)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> NrFunction<D> {
        let mut out = NrFunction::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }

    pub fn pow(&self, e: u32, one: &C) -> Self {
        (0..e).fold(Self::constant(one.clone()), |acc, _| &acc * self)
    }
}

impl NrFunction<Q> {
    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn from_q(c: Q) -> Self {
        Self::constant(c)
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(crate::rational::q(c))
    }

    /// `z = w + z*`.
    pub fn z() -> Self {
        let mut f = Self::term(Mono::new(1, 0, 0), Q::one());
        f.add_term(Mono::new(0, 1, 0), Q::one());
        f
    }

    pub fn zs() -> Self {
        Self::term(Mono::new(0, 1, 0), Q::one())
    }

    /// `u = 1/(z - z*)`.
    pub fn u() -> Self {
        Self::term(Mono::new(-1, 0, 0), Q::one())
    }

    /// `w = z - z*`.
    pub fn w() -> Self {
        Self::term(Mono::new(1, 0, 0), Q::one())
    }

    /// The formal logarithm `L = log(z - z*)`.
    pub fn log() -> Self {
        Self::term(Mono::new(0, 0, 1), Q::one())
    }

    /// Embeds a rigid function (polynomial in `z`).
    pub fn from_z_poly(p: &UniPoly) -> Self {
        let z = Self::z();
        let mut out = Self::zero();
        let mut zk = Self::one();
        for c in p.coeffs() {
            out = &out + &zk.scale(c);
            zk = &zk * &z;
        }
        out
    }

    pub fn from_external(terms: &[(ExternalMono, Q)]) -> Self {
        let mut out = Self::zero();
        for (e, c) in terms {
            // (w + z*)^z (z*)^zs w^-u L^log
            for t in 0..=e.z {
                let coeff = c * Q::from_integer(binomial(e.z as u64, t as u64));
                out.add_term(
                    Mono::new(t as i32 - e.u as i32, e.z - t + e.zs, e.log),
                    coeff,
                );
            }
        }
        out
    }

    /// The same function in `(z, z*, u, L)` monomials; positive powers of
    /// `w` are expanded as `(z - z*)^k`.
    pub fn to_external(&self) -> Vec<(ExternalMono, Q)> {
        let mut acc: BTreeMap<ExternalMono, Q> = BTreeMap::new();
        for (m, c) in &self.terms {
            if m.w <= 0 {
                let key = ExternalMono { z: 0, zs: m.zs, u: (-m.w) as u32, log: m.log };
                *acc.entry(key).or_insert_with(Q::zero) += c;
            } else {
                let e = m.w as u32;
                for t in 0..=e {
                    let sign = if t % 2 == 0 { Q::one() } else { -Q::one() };
                    let key = ExternalMono { z: e - t, zs: m.zs + t, u: 0, log: m.log };
                    *acc.entry(key).or_insert_with(Q::zero) +=
                        c * sign * Q::from_integer(binomial(e as u64, t as u64));
                }
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .to_external()
            .into_iter()
            .map(|(e, c)| json!({"z": e.z, "zs": e.zs, "u": e.u, "L": e.log, "coeff": q_to_string(&c)}))
            .collect();
        json!({"terms": terms})
    }

    pub fn from_json(v: &Value, path: &str) -> Result<Self> {
        let terms = match v.get("terms") {
            Some(Value::Array(a)) => a,
            _ => return Err(Error::parse(format!("{path}.terms"), "expected an array")),
        };
        let mut ext = Vec::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            let tp = format!("{path}.terms[{i}]");
            if !t.is_object() {
                return Err(Error::parse(tp, "expected an object"));
            }
            let exp = |k: &str| -> Result<u32> {
                match t.get(k) {
                    None => Ok(0),
                    Some(x) => x
                        .as_u64()
                        .and_then(|n| u32::try_from(n).ok())
                        .ok_or_else(|| Error::parse(format!("{tp}.{k}"), "expected a non-negative integer")),
                }
            };
            let coeff = t
                .get("coeff")
                .ok_or_else(|| Error::parse(format!("{tp}.coeff"), "missing"))?;
            let c = q_from_json(coeff, &format!("{tp}.coeff"))?;
            ext.push((
                ExternalMono { z: exp("z")?, zs: exp("zs")?, u: exp("u")?, log: exp("L")? },
                c,
            ));
        }
        Ok(Self::from_external(&ext))
    }

    /// `f = sum f_i(z) (z - z*)^{-i}`, by substituting `z* = z - w`.
    pub fn to_graded_form(&self) -> Result<GradedForm> {
        if self.log_degree() > 0 {
            return Err(Error::HasLogTerm);
        }
        // w-power -> coefficients in z
        let mut by_w: BTreeMap<i32, Vec<Q>> = BTreeMap::new();
        for (m, c) in &self.terms {
            // w^e (z - w)^b = sum_t C(b,t) z^{b-t} (-w)^t w^e
            for t in 0..=m.zs {
                let sign = if t % 2 == 0 { Q::one() } else { -Q::one() };
                let coeff = c * sign * Q::from_integer(binomial(m.zs as u64, t as u64));
                let zpow = (m.zs - t) as usize;
                let slot = by_w.entry(m.w + t as i32).or_default();
                if slot.len() <= zpow {
                    slot.resize(zpow + 1, Q::zero());
                }
                slot[zpow] += coeff;
            }
        }
        let mut parts: Vec<UniPoly> = Vec::new();
        for (wp, coeffs) in by_w {
            let poly = UniPoly::new(coeffs);
            if poly.is_zero() {
                continue;
            }
            if wp > 0 {
                return Err(Error::NotNearlyRigid);
            }
            let i = (-wp) as usize;
            if parts.len() <= i {
                parts.resize(i + 1, UniPoly::zero());
            }
            parts[i] = poly;
        }
        Ok(GradedForm::new(parts))
    }

    pub fn from_graded_form(g: &GradedForm) -> Self {
        let mut out = Self::zero();
        for (i, p) in g.parts.iter().enumerate() {
            out = &out + &Self::from_z_poly(p).shift_w(-(i as i32));
        }
        out
    }

    /// True when `f` depends on `z` only (a rigid function).
    pub fn is_rigid(&self) -> bool {
        self.to_graded_form().is_ok_and(|g| g.depth() == 0)
    }
}

/// Coefficients that can be read in Q_{p^2}.
pub trait ToPadic {
    fn to_padic(&self, ctx: &PadicContext) -> PadicScalar;
}

impl ToPadic for Q {
    fn to_padic(&self, ctx: &PadicContext) -> PadicScalar {
        ctx.from_q(self)
    }
}

impl ToPadic for PadicScalar {
    fn to_padic(&self, _ctx: &PadicContext) -> PadicScalar {
        self.clone()
    }
}

impl<C: Coeff + ToPadic> NrFunction<C> {
    /// Value at `z0`, with `z* = sigma(z0)` and `L` set to `log_branch`.
    pub fn evaluate(&self, z0: &UpperHalfPoint, log_branch: Option<&PadicScalar>) -> Result<PadicScalar> {
        let ctx = z0.context();
        if self.log_degree() > 0 && log_branch.is_none() {
            return Err(Error::MissingLogBranch);
        }
        let w0 = z0.diff();
        let u0 = w0.inv()?;
        let zs0 = z0.conj();
        let mut acc = ctx.zero();
        for (m, c) in &self.terms {
            let wpart = if m.w >= 0 { w0.pow(m.w as i64)? } else { u0.pow(-(m.w as i64))? };
            let mut v = &c.to_padic(&ctx) * &wpart;
            v = &v * &zs0.pow(m.zs as i64)?;
            if m.log > 0 {
                v = &v * &log_branch.expect("checked above").pow(m.log as i64)?;
            }
            acc = &acc + &v;
        }
        Ok(acc)
    }

    pub fn to_padic_coeffs(&self, ctx: &PadicContext) -> NrFunction<PadicScalar> {
        self.map_coeffs(|c| c.to_padic(ctx))
    }
}

impl<C: Coeff> PartialEq for NrFunction<C> {
    fn eq(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }
}

impl<C: Coeff> fmt::Debug for NrFunction<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("{c:?}*w^{}*zs^{}*L^{}", m.w, m.zs, m.log))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<C: Coeff> Add for &NrFunction<C> {
    type Output = NrFunction<C>;
    fn add(self, rhs: &NrFunction<C>) -> NrFunction<C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for &NrFunction<C> {
    type Output = NrFunction<C>;
    fn sub(self, rhs: &NrFunction<C>) -> NrFunction<C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl<C: Coeff> Neg for &NrFunction<C> {
    type Output = NrFunction<C>;
    fn neg(self) -> NrFunction<C> {
        self.scale_int(-1)
    }
}

impl<C: Coeff> Mul for &NrFunction<C> {
    type Output = NrFunction<C>;
    fn mul(self, rhs: &NrFunction<C>) -> NrFunction<C> {
        let mut out = NrFunction::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(*m2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl<C: Coeff> $tr for NrFunction<C> {
            type Output = NrFunction<C>;
            fn $m(self, rhs: NrFunction<C>) -> NrFunction<C> {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    type F = NrFunction<Q>;

    #[test]
    fn defining_relation() {
        let w = &F::z() - &F::zs();
        assert_eq!(&w * &F::u(), F::one());
        let f = &F::z() * &F::u();
        assert_eq!(&f * &F::one(), f);
    }

    #[test]
    fn square_expands_in_both_coordinate_systems() {
        let s = &F::z() + &F::zs();
        let lhs = &s * &s;
        let rhs = &(&(&F::z() * &F::z()) + &(&F::z() * &F::zs()).scale_int(2)) + &(&F::zs() * &F::zs());
        assert_eq!(lhs, rhs);
        assert_eq!(F::from_external(&lhs.to_external()), lhs);
    }

    #[test]
    fn derivative_rules() {
        let u = F::u();
        assert_eq!(u.d_dz(), -&(&u * &u));
        assert_eq!(u.d_dzstar(), &u * &u);
        assert_eq!(F::log().d_dz(), u);
        assert_eq!(F::log().d_dzstar(), -&u);
        assert_eq!(F::z().d_dz(), F::one());
        assert!(F::z().d_dzstar().is_zero());
        assert!(F::zs().d_dz().is_zero());
        assert_eq!(F::zs().d_dzstar(), F::one());
    }

    #[test]
    fn graded_forms() {
        let g = F::u().scale_int(7).to_graded_form().unwrap();
        assert_eq!(g.parts, vec![UniPoly::zero(), UniPoly::from_ints(&[7])]);
        // z* u = z u - 1
        let g = (&F::zs() * &F::u()).to_graded_form().unwrap();
        assert_eq!(g.parts, vec![UniPoly::from_ints(&[-1]), UniPoly::from_ints(&[0, 1])]);
        assert_eq!(F::from_graded_form(&g), &F::zs() * &F::u());
        assert_eq!(F::zs().to_graded_form(), Err(Error::NotNearlyRigid));
        assert_eq!(F::log().to_graded_form(), Err(Error::HasLogTerm));
    }

    #[test]
    fn evaluation() {
        let ctx = PadicContext::new(5, 8).unwrap();
        let z0 = UpperHalfPoint::new(ctx.s()).unwrap();
        assert_eq!(F::z().evaluate(&z0, None).unwrap(), ctx.s());
        let u = F::u().evaluate(&z0, None).unwrap();
        assert_eq!(&u * &(&ctx.s() * &ctx.from_int(2)), ctx.one());
        assert_eq!(F::log().evaluate(&z0, None), Err(Error::MissingLogBranch));
        let lb = ctx.from_int(3);
        assert_eq!(F::log().evaluate(&z0, Some(&lb)).unwrap(), lb);
    }

    #[test]
    fn json_shape() {
        let f = &F::u().scale_int(2) + &F::from_q(q(1));
        let v = f.to_json();
        assert_eq!(F::from_json(&v, "f").unwrap(), f);
        let bad = json!({"terms": [{"z": -1, "coeff": "1"}]});
        assert!(matches!(F::from_json(&bad, "f"), Err(Error::Parse { .. })));
    }
}
