//! Symmetric powers of the de Rham module over the nearly rigid ring: basis
//! changes, the Gauss–Manin connection, Kodaira–Spencer, the Hodge splitting
//! `Ψ`, the operator `Θ = Ψ ∘ KS⁻¹ ∘ ∇` and the symplectic pairing.
//!
//! A section of degree `n` is `Σ_a c_a g₁^a g₂^(n-a)` for a generator pair
//! `(g₁, g₂)`: `(dτ, dτ*)`, `(dx, dy)` or `(ω_can, η_can)`. Pure sections
//! `f ⊗ dτ^m` may have negative `m`. Every section carries a power of the
//! formal period `t_p`. Negative powers of `g₁` are allowed whenever the
//! generator change keeps `g₁` fixed (tau and canonical frames).

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::nearly_rigid::NrFunction;
use crate::rational::{binomial, Q};

type F = NrFunction<Q>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    /// `(dτ, dτ*)`
    Tau,
    /// `(dx, dy)` with `dτ = z dx + dy`
    DxDy,
    /// `(ω_can, η_can) = (dτ, dτ*/(z* - z))`
    Canonical,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::Tau => "tau",
            Basis::DxDy => "dxdy",
            Basis::Canonical => "canonical",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "tau" => Some(Basis::Tau),
            "dxdy" => Some(Basis::DxDy),
            "canonical" | "can" => Some(Basis::Canonical),
            _ => None,
        }
    }

    /// Rows express `g₁, g₂` in `(dτ, dτ*)`.
    fn to_tau(self) -> [[F; 2]; 2] {
        let u = F::u();
        match self {
            Basis::Tau => [[F::one(), F::zero()], [F::zero(), F::one()]],
            Basis::DxDy => [[u.clone(), -&u], [-&(&F::zs() * &u), &F::z() * &u]],
            Basis::Canonical => [[F::one(), F::zero()], [F::zero(), -&u]],
        }
    }

    /// Rows express `dτ, dτ*` in `(g₁, g₂)`.
    fn from_tau(self) -> [[F; 2]; 2] {
        match self {
            Basis::Tau => [[F::one(), F::zero()], [F::zero(), F::one()]],
            Basis::DxDy => [[F::z(), F::one()], [F::zs(), F::one()]],
            Basis::Canonical => [[F::one(), F::zero()], [F::zero(), -&F::w()]],
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct DrSection {
    basis: Basis,
    n: i64,
    tp_pow: i64,
    /// exponent of `g₁` -> coefficient
    coeffs: BTreeMap<i64, F>,
}

impl DrSection {
    pub fn zero(basis: Basis, n: i64) -> Self {
        DrSection { basis, n, tp_pow: 0, coeffs: BTreeMap::new() }
    }

    pub fn new(basis: Basis, n: i64, tp_pow: i64, coeffs: impl IntoIterator<Item = (i64, F)>) -> Result<Self> {
        let mut s = DrSection { basis, n, tp_pow, coeffs: BTreeMap::new() };
        for (a, c) in coeffs {
            if n - a < 0 {
                return Err(Error::InvalidMonomial(format!(
                    "g1^{a} g2^{} is not a basis element of degree {n}",
                    n - a
                )));
            }
            s.add_coeff(a, c);
        }
        Ok(s)
    }

    /// `f ⊗ dτ^m`.
    pub fn pure(f: F, m: i64) -> Self {
        let mut s = DrSection::zero(Basis::Tau, m);
        s.add_coeff(m, f);
        s
    }

    /// `f · g₁^a g₂^(n-a)`.
    pub fn monomial(basis: Basis, n: i64, a: i64, f: F) -> Result<Self> {
        DrSection::new(basis, n, 0, [(a, f)])
    }

    fn add_coeff(&mut self, a: i64, c: F) {
        let e = self.coeffs.entry(a).or_insert_with(F::zero);
        *e = &*e + &c;
        if e.is_zero() {
            self.coeffs.remove(&a);
        }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn degree(&self) -> i64 {
        self.n
    }

    pub fn tp_pow(&self) -> i64 {
        self.tp_pow
    }

    pub fn with_tp_pow(mut self, k: i64) -> Self {
        self.tp_pow = k;
        self
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, F> {
        &self.coeffs
    }

    pub fn coeff(&self, a: i64) -> F {
        self.coeffs.get(&a).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_pure(&self) -> bool {
        self.basis != Basis::DxDy && self.coeffs.keys().all(|&a| a == self.n)
    }

    pub fn scale(&self, f: &F) -> Self {
        let mut out = DrSection { coeffs: BTreeMap::new(), ..self.clone() };
        for (a, c) in &self.coeffs {
            out.add_coeff(*a, c * f);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DegreeMismatch(self.n, other.n));
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return basis_convert(other, self.basis).map(|s| s.with_tp_pow(other.tp_pow));
        }
        if self.tp_pow != other.tp_pow {
            return Err(Error::TpMismatch(self.tp_pow, other.tp_pow));
        }
        let o = basis_convert(other, self.basis)?;
        let mut out = self.clone();
        for (a, c) in o.coeffs {
            out.add_coeff(a, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&F::from_int(-1)))
    }

    /// Equal as sections (after conversion to a common basis), including the `t_p` power.
    pub fn same_as(&self, other: &Self) -> bool {
        match (basis_convert(self, Basis::Tau), basis_convert(other, Basis::Tau)) {
            (Ok(a), Ok(b)) => {
                a.n == b.n && a.coeffs == b.coeffs && (a.is_zero() || a.tp_pow == b.tp_pow)
            }
            _ => false,
        }
    }

    /// Product with a pure `f ⊗ dτ^m` (tau basis, weights add).
    pub fn mul_pure(&self, f: &F, m: i64) -> Result<Self> {
        let t = basis_convert(self, Basis::Tau)?;
        let n = t.n + m;
        DrSection::new(
            Basis::Tau,
            n,
            t.tp_pow,
            t.coeffs.iter().map(|(a, c)| (a + m, c * f)),
        )
    }

    pub fn to_json(&self) -> Value {
        let mut coeffs = Map::new();
        for (a, c) in &self.coeffs {
            let mut v = c.to_json();
            v["tp_pow"] = json!(self.tp_pow);
            coeffs.insert(a.to_string(), v);
        }
        json!({"n": self.n, "basis": self.basis.name(), "tp_pow": self.tp_pow, "coeffs": coeffs})
    }

    pub fn from_json(v: &Value, path: &str) -> Result<Self> {
        let n = v
            .get("n")
            .and_then(Value::as_i64)
            .ok_or_else(|| Error::parse(format!("{path}.n"), "expected an integer"))?;
        let basis = match v.get("basis") {
            None => Basis::Tau,
            Some(b) => b
                .as_str()
                .and_then(Basis::parse)
                .ok_or_else(|| Error::parse(format!("{path}.basis"), "expected tau, dxdy or canonical"))?,
        };
        let obj = v
            .get("coeffs")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::parse(format!("{path}.coeffs"), "expected an object"))?;
        let mut tp: Option<i64> = v.get("tp_pow").and_then(Value::as_i64);
        let mut coeffs = Vec::new();
        for (k, c) in obj {
            let cp = format!("{path}.coeffs.{k}");
            let a: i64 = k.parse().map_err(|_| Error::parse(&cp, "key is not an integer"))?;
            if let Some(t) = c.get("tp_pow") {
                let t = t
                    .as_i64()
                    .ok_or_else(|| Error::parse(format!("{cp}.tp_pow"), "expected an integer"))?;
                match tp {
                    Some(prev) if prev != t => return Err(Error::TpMismatch(prev, t)),
                    _ => tp = Some(t),
                }
            }
            coeffs.push((a, F::from_json(c, &cp)?));
        }
        DrSection::new(basis, n, tp.unwrap_or(0), coeffs).map_err(|e| Error::parse(path, e.to_string()))
    }
}

impl fmt::Debug for DrSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DrSection[{} n={} tp^{}]{{", self.basis.name(), self.n, self.tp_pow)?;
        for (a, c) in &self.coeffs {
            write!(f, " {a}: {c:?};")?;
        }
        write!(f, " }}")
    }
}

/// A section-valued one form `A ⊗ dz + B ⊗ dz*`.
#[derive(Clone, Debug, PartialEq)]
pub struct DrForm {
    pub dz: DrSection,
    pub dzs: DrSection,
}

impl DrForm {
    pub fn add(&self, o: &Self) -> Result<Self> {
        Ok(DrForm { dz: self.dz.add(&o.dz)?, dzs: self.dzs.add(&o.dzs)? })
    }

    pub fn same_as(&self, o: &Self) -> bool {
        self.dz.same_as(&o.dz) && self.dzs.same_as(&o.dzs)
    }

    pub fn to_json(&self) -> Value {
        json!({"dz": self.dz.to_json(), "dzs": self.dzs.to_json()})
    }
}

fn expand(coeffs: &BTreeMap<i64, F>, n: i64, m: &[[F; 2]; 2], target: Basis, tp_pow: i64) -> Result<DrSection> {
    let diagonal = m[0][1].is_zero() && m[1][0].is_zero();
    let mut out = DrSection::zero(target, n).with_tp_pow(tp_pow);
    for (&a, c) in coeffs {
        let b = n - a;
        if diagonal {
            let left = if a >= 0 {
                m[0][0].pow(a as u32, &Q::one())
            } else if m[0][0] == F::one() {
                F::one()
            } else {
                return Err(Error::NegativeWeight(format!("g1^{a} has no expansion in this basis")));
            };
            out.add_coeff(a, &(c * &left) * &m[1][1].pow(b as u32, &Q::one()));
            continue;
        }
        if a < 0 {
            return Err(Error::NegativeWeight(format!(
                "degree {n} section with g1^{a} cannot be written in the {} basis",
                target.name()
            )));
        }
        // (m00 h1 + m01 h2)^a (m10 h1 + m11 h2)^b
        let p1 = binomial_expand(&m[0][0], &m[0][1], a as u32);
        let p2 = binomial_expand(&m[1][0], &m[1][1], b as u32);
        for (i, x) in p1.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let cx = c * x;
            for (j, y) in p2.iter().enumerate() {
                if !y.is_zero() {
                    out.add_coeff((i + j) as i64, &cx * y);
                }
            }
        }
    }
    Ok(out)
}

/// Coefficients of `(α h₁ + β h₂)^e` indexed by the power of `h₁`.
fn binomial_expand(alpha: &F, beta: &F, e: u32) -> Vec<F> {
    let one = Q::one();
    (0..=e)
        .map(|i| {
            let c = Q::from_integer(binomial(e as u64, i as u64));
            (&alpha.pow(i, &one) * &beta.pow(e - i, &one)).scale(&c)
        })
        .collect()
}

pub fn basis_convert(s: &DrSection, target: Basis) -> Result<DrSection> {
    if s.basis == target {
        return Ok(s.clone());
    }
    let tau = if s.basis == Basis::Tau {
        s.clone()
    } else {
        expand(&s.coeffs, s.n, &s.basis.to_tau(), Basis::Tau, s.tp_pow)?
    };
    if target == Basis::Tau {
        return Ok(tau);
    }
    expand(&tau.coeffs, tau.n, &target.from_tau(), target, tau.tp_pow)
}

/// Gauss–Manin connection: `∇dτ = u(dτ - dτ*) ⊗ dz`, `∇dτ* = u(dτ - dτ*) ⊗ dz*`,
/// extended by Leibniz. The result is in the basis of the input.
pub fn gm_connection(s: &DrSection) -> Result<DrForm> {
    let t = basis_convert(s, Basis::Tau)?;
    let n = t.n;
    let mut dz = DrSection::zero(Basis::Tau, n).with_tp_pow(t.tp_pow);
    let mut dzs = DrSection::zero(Basis::Tau, n).with_tp_pow(t.tp_pow);
    for (&a, c) in &t.coeffs {
        let b = n - a;
        let uc = c.shift_w(-1);
        dz.add_coeff(a, c.d_dz());
        dzs.add_coeff(a, c.d_dzstar());
        if a != 0 {
            dz.add_coeff(a, uc.scale_int(a));
            dz.add_coeff(a - 1, uc.scale_int(-a));
        }
        if b != 0 {
            dzs.add_coeff(a + 1, uc.scale_int(b));
            dzs.add_coeff(a, uc.scale_int(-b));
        }
    }
    Ok(DrForm { dz: basis_convert(&dz, s.basis)?, dzs: basis_convert(&dzs, s.basis)? })
}

/// `KS⁻¹`: the `dz`-coefficient `s` of a form becomes `t_p⁻¹ · s ⊗ dτ²`.
pub fn ks_inverse(s: &DrSection) -> Result<DrSection> {
    Ok(s.mul_pure(&F::one(), 2)?.with_tp_pow(s.tp_pow - 1))
}

/// `KS`: `f ⊗ dτ^m` with `m ≥ 2` parts becomes `t_p · f ⊗ dτ^(m-2)`, the
/// coefficient of `dz`.
pub fn kodaira_spencer(s: &DrSection) -> Result<DrSection> {
    let t = basis_convert(s, Basis::Tau)?;
    let n = t.n - 2;
    for &a in t.coeffs.keys() {
        if a - 2 < 0 && a != t.n {
            return Err(Error::InvalidMonomial(format!("dτ^{a} dτ*^{} is not divisible by dτ²", t.n - a)));
        }
    }
    DrSection::new(Basis::Tau, n, t.tp_pow + 1, t.coeffs.iter().map(|(a, c)| (a - 2, c.clone())))
}

/// The Hodge splitting `Ψ`: keeps the pure `dτ^n` part, killing every
/// monomial with a `dτ*` factor.
pub fn hodge_split(s: &DrSection) -> Result<DrSection> {
    let t = basis_convert(s, Basis::Tau)?;
    Ok(DrSection::pure(t.coeff(t.n), t.n).with_tp_pow(t.tp_pow))
}

/// `Ψ` on forms: the `dz*` component is discarded as well.
pub fn hodge_split_form(f: &DrForm) -> Result<DrSection> {
    hodge_split(&f.dz)
}

/// `Θ = Ψ ∘ KS⁻¹ ∘ ∇`.
pub fn theta(s: &DrSection) -> Result<DrSection> {
    hodge_split(&ks_inverse(&gm_connection(s)?.dz)?)
}

pub fn theta_iter(s: &DrSection, j: usize) -> Result<DrSection> {
    let mut out = s.clone();
    for _ in 0..j {
        out = theta(&out)?;
    }
    Ok(out)
}

/// Divided symmetric power of the pairing with `⟨dx, dy⟩ = -1`. In the
/// canonical frame `⟨ω^a η^(n-a), ω^b η^(n-b)⟩ = (-1)^(n-a) / C(n,a)` if
/// `a + b = n` and 0 otherwise. The `t_p` powers of the inputs are ignored.
pub fn sym_pairing(s1: &DrSection, s2: &DrSection) -> Result<F> {
    if s1.n != s2.n {
        return Err(Error::DegreeMismatch(s1.n, s2.n));
    }
    let n = s1.n;
    if n < 0 {
        return Err(Error::NegativeWeight(format!("pairing in degree {n}")));
    }
    let c1 = basis_convert(s1, Basis::Canonical)?;
    let c2 = basis_convert(s2, Basis::Canonical)?;
    if c1.coeffs.keys().chain(c2.coeffs.keys()).any(|&a| a < 0) {
        return Err(Error::NegativeWeight("pairing of sections with negative ω powers".into()));
    }
    let mut out = F::zero();
    for (&a, x) in &c1.coeffs {
        if let Some(y) = c2.coeffs.get(&(n - a)) {
            let sign: i64 = if (n - a) % 2 == 0 { 1 } else { -1 };
            let k = Q::new(sign.into(), binomial(n as u64, a as u64));
            out = &out + &(x * y).scale(&k);
        }
    }
    Ok(out)
}

/// `ω_can^a η_can^(n-a)`.
pub fn canonical_monomial(n: i64, a: i64) -> Result<DrSection> {
    DrSection::monomial(Basis::Canonical, n, a, F::one())
}
