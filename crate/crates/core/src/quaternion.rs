//! The Hashimoto model of the indefinite quaternion algebra of discriminant
//! `p N^-`: basis `1, i, j, k` with `i^2 = -p N^-`, `j^2 = p0`, `k = ij = -ji`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hilbert::{hilbert_symbol, prime_divisors, Place};
use crate::padic::{is_prime, legendre};
use crate::poly::MPoly;
use crate::quadratic::QSqrt;
use crate::rational::{q, q_to_string, qf, Coeff, Q};

/// Quaternion with coordinates on `1, i, j, k`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuatElement<C> {
    pub x: [C; 4],
}

impl<C: Coeff> QuatElement<C> {
    pub fn new(x0: C, x1: C, x2: C, x3: C) -> Self {
        QuatElement { x: [x0, x1, x2, x3] }
    }

    pub fn add(&self, o: &Self) -> Self {
        QuatElement {
            x: std::array::from_fn(|t| self.x[t].clone() + o.x[t].clone()),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QuatElement {
            x: std::array::from_fn(|t| self.x[t].clone() - o.x[t].clone()),
        }
    }

    pub fn scale_by(&self, c: &C) -> Self {
        QuatElement {
            x: std::array::from_fn(|t| self.x[t].clone() * c.clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.x.iter().all(Coeff::is_zero_coeff)
    }

    pub fn coeff_eq(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }
}

impl QuatElement<Q> {
    pub fn from_q(c: [Q; 4]) -> Self {
        QuatElement { x: c }
    }

    pub fn from_ints(c: [i64; 4]) -> Self {
        QuatElement { x: c.map(q) }
    }

    pub fn lin(terms: &[(Q, &QuatElement<Q>)]) -> Self {
        let mut out = QuatElement::from_ints([0; 4]);
        for (c, v) in terms {
            out = out.add(&v.scale_by(c));
        }
        out
    }

    /// Extension of scalars to Q(sqrt(m)).
    pub fn extend(&self, m: i64) -> QuatElement<QSqrt> {
        QuatElement {
            x: std::array::from_fn(|t| QSqrt::rational(self.x[t].clone(), m)),
        }
    }
}

/// Structure constants of the Hashimoto model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HashimotoAlgebra {
    pub p: u64,
    pub nminus: u64,
    pub p0: u64,
}

/// Least prime `p0 <= bound` with `(p0, p N^-)_l = -1` exactly for `l | p N^-`,
/// and every prime of `N^+` split in `Q(sqrt(p0))`.
pub fn find_p0(p: u64, nminus: u64, nplus: u64, bound: u64) -> Result<u64> {
    (2..=bound)
        .filter(|&c| is_prime(c))
        .find(|&c| p0_conditions_hold(p, nminus, nplus, c))
        .ok_or(Error::NotFoundWithinBound(bound))
}

pub fn p0_conditions_hold(p: u64, nminus: u64, nplus: u64, p0: u64) -> bool {
    let disc = p * nminus;
    let (a, b) = (q(p0 as i64), q(disc as i64));
    let mut places: Vec<u64> = prime_divisors(&BigInt::from(2 * disc * p0));
    places.sort_unstable();
    places.dedup();
    let finite_ok = places.iter().all(|&l| {
        let want = if disc % l == 0 { -1 } else { 1 };
        hilbert_symbol(&a, &b, Place::Finite(l)).unwrap() == want
    });
    let inf_ok = hilbert_symbol(&a, &b, Place::Infinity).unwrap() == 1;
    let split_ok = prime_divisors(&BigInt::from(nplus.max(1)))
        .into_iter()
        .all(|l| splits_in(l, p0));
    finite_ok && inf_ok && split_ok
}

/// Whether the prime `l` splits in `Q(sqrt(p0))`.
fn splits_in(l: u64, p0: u64) -> bool {
    if l == p0 {
        return false;
    }
    if l == 2 {
        return p0 % 8 == 1;
    }
    legendre(&BigInt::from(p0), l) == 1
}

/// The standard symplectic matrix `[[0, I2], [-I2, 0]]`.
pub fn standard_j() -> [[Q; 4]; 4] {
    let mut j: [[Q; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| Q::zero()));
    j[0][2] = q(1);
    j[1][3] = q(1);
    j[2][0] = q(-1);
    j[3][1] = q(-1);
    j
}

fn gram_to_string(g: &[[Q; 4]; 4]) -> String {
    let rows: Vec<String> = g
        .iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(q_to_string).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

impl HashimotoAlgebra {
    pub fn new(p: u64, nminus: u64, p0: u64) -> Self {
        HashimotoAlgebra { p, nminus, p0 }
    }

    /// Algebra with the least admissible `p0`.
    pub fn search(p: u64, nminus: u64, nplus: u64, bound: u64) -> Result<Self> {
        Ok(Self::new(p, nminus, find_p0(p, nminus, nplus, bound)?))
    }

    pub fn discriminant(&self) -> i64 {
        (self.p * self.nminus) as i64
    }

    pub fn i_sq(&self) -> i64 {
        -self.discriminant()
    }

    pub fn j_sq(&self) -> i64 {
        self.p0 as i64
    }

    pub fn one<C: Coeff>(&self, unit: &C) -> QuatElement<C> {
        let z = unit.scale_int(0);
        QuatElement::new(unit.clone(), z.clone(), z.clone(), z)
    }

    pub fn mul<C: Coeff>(&self, x: &QuatElement<C>, y: &QuatElement<C>) -> QuatElement<C> {
        let (a, b) = (self.i_sq(), self.j_sq());
        let [a0, a1, a2, a3] = x.x.clone();
        let [b0, b1, b2, b3] = y.x.clone();
        let m = |u: &C, v: &C| u.clone() * v.clone();
        QuatElement::new(
            m(&a0, &b0) + m(&a1, &b1).scale_int(a) + m(&a2, &b2).scale_int(b)
                - m(&a3, &b3).scale_int(a * b),
            m(&a0, &b1) + m(&a1, &b0) - m(&a2, &b3).scale_int(b) + m(&a3, &b2).scale_int(b),
            m(&a0, &b2) + m(&a2, &b0) + m(&a1, &b3).scale_int(a) - m(&a3, &b1).scale_int(a),
            m(&a0, &b3) + m(&a3, &b0) + m(&a1, &b2) - m(&a2, &b1),
        )
    }

    pub fn conj<C: Coeff>(&self, x: &QuatElement<C>) -> QuatElement<C> {
        let [x0, x1, x2, x3] = x.x.clone();
        QuatElement::new(x0, -x1, -x2, -x3)
    }

    pub fn trd<C: Coeff>(&self, x: &QuatElement<C>) -> C {
        x.x[0].scale_int(2)
    }

    pub fn nrd<C: Coeff>(&self, x: &QuatElement<C>) -> C {
        self.mul(x, &self.conj(x)).x[0].clone()
    }

    /// `x^dagger = i^{-1} conj(x) i`.
    pub fn dagger<C: Coeff>(&self, x: &QuatElement<C>) -> QuatElement<C> {
        let i = self.i_elem(&x.x[0]);
        let i_inv = QuatElement {
            x: i.x.clone().map(|c| c.div_int(self.i_sq()).expect("i^2 is nonzero")),
        };
        self.mul(&self.mul(&i_inv, &self.conj(x)), &i)
    }

    fn i_elem<C: Coeff>(&self, like: &C) -> QuatElement<C> {
        let z = like.scale_int(0);
        QuatElement::new(z.clone(), like.one_like(), z.clone(), z)
    }

    /// `psi0(x, y) = trd(i y^dagger x) / p`.
    pub fn psi0<C: Coeff>(&self, x: &QuatElement<C>, y: &QuatElement<C>) -> C {
        let i = self.i_elem(&x.x[0]);
        let t = self.trd(&self.mul(&self.mul(&i, &self.dagger(y)), x));
        t.div_int(self.p as i64).expect("p is nonzero")
    }

    /// `e = (1 (x) 1 + (1/p0) j (x) sqrt(p0)) / 2` in `B (x) Q(sqrt(p0))`.
    pub fn idempotent_e(&self) -> QuatElement<QSqrt> {
        self.idempotent_with_sign(1)
    }

    /// The complementary idempotent `e'` (sign -1).
    pub fn idempotent_with_sign(&self, sign: i64) -> QuatElement<QSqrt> {
        let m = self.j_sq();
        let zero = QSqrt::rational(Q::zero(), m);
        QuatElement::new(
            QSqrt::rational(qf(1, 2), m),
            zero.clone(),
            QSqrt::new(Q::zero(), qf(sign, 2 * m), m),
            zero,
        )
    }

    /// The elements `epsilon_1..epsilon_4` for the parameter `a`.
    pub fn epsilons(&self, a: i64) -> [QuatElement<Q>; 4] {
        let p0 = self.j_sq();
        [
            QuatElement::from_ints([1, 0, 0, 0]),
            QuatElement::from_q([qf(1, 2), q(0), qf(1, 2), q(0)]),
            QuatElement::from_q([q(0), qf(1, 2), q(0), qf(1, 2)]),
            QuatElement::from_q([q(0), q(0), qf(a * self.discriminant(), p0), qf(1, p0)]),
        ]
    }

    /// `eta_1..eta_4` built from the epsilons, with `D = p N^-`.
    pub fn eta_candidates(&self, a: i64) -> [QuatElement<Q>; 4] {
        let [e1, e2, e3, e4] = self.epsilons(a);
        let p0 = self.j_sq();
        let d = self.discriminant();
        [
            QuatElement::lin(&[(q(1), &e3), (qf(-(p0 - 1), 2), &e4)]),
            QuatElement::lin(&[(q(-a * d), &e1), (q(-1), &e4)]),
            e1.clone(),
            e2,
        ]
    }

    pub fn gram(&self, basis: &[QuatElement<Q>; 4]) -> [[Q; 4]; 4] {
        std::array::from_fn(|r| std::array::from_fn(|c| self.psi0(&basis[r], &basis[c])))
    }

    /// The eta basis for `a`, or `GramNotSymplectic` when its Gram matrix
    /// under `psi0` is not the standard `J`.
    pub fn symplectic_basis(&self, a: i64) -> Result<[QuatElement<Q>; 4]> {
        let eta = self.eta_candidates(a);
        let g = self.gram(&eta);
        if g == standard_j() {
            Ok(eta)
        } else {
            Err(Error::GramNotSymplectic(gram_to_string(&g)))
        }
    }

    /// Least `a` in `[0, bound)` whose eta basis has Gram matrix `J`.
    pub fn find_hashimoto_a(&self, bound: i64) -> Result<i64> {
        (0..bound)
            .find(|&a| self.symplectic_basis(a).is_ok())
            .ok_or(Error::NoValidParameter)
    }

    /// `c` with `Gram(eta) = c J`, if the Gram matrix is a multiple of `J`.
    pub fn gram_scale(&self, a: i64) -> Option<Q> {
        let g = self.gram(&self.eta_candidates(a));
        let c = g[0][2].clone();
        let j = standard_j();
        let ok = (0..4).all(|r| (0..4).all(|s| g[r][s] == &j[r][s] * &c));
        ok.then_some(c)
    }

    pub fn report(&self, a_bound: i64) -> Value {
        let a = self.find_hashimoto_a(a_bound);
        let a_used = *a.as_ref().unwrap_or(&0);
        let gram = self.gram(&self.eta_candidates(a_used));
        let ks = ks_symplectic_check();
        json!({
            "p": self.p,
            "Nminus": self.nminus,
            "p0": self.p0,
            "i_sq": self.i_sq(),
            "j_sq": self.j_sq(),
            "a": a.as_ref().ok(),
            "a_search": match &a { Ok(_) => "ok".to_string(), Err(e) => e.to_string() },
            "gram": gram.iter().map(|r| r.iter().map(q_to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "gram_scale": self.gram_scale(a_used).map(|c| q_to_string(&c)),
            "ks_scalar": ks.scalar_string(),
            "ks_z_free": ks.z_free,
            "ks_residual": ks.residual_string(),
        })
    }
}

/// Variable indices for the symbolic `Pi(z)` computation.
pub mod sym {
    pub const ALPHA_PLUS: usize = 0;
    pub const ALPHA_MINUS: usize = 1;
    pub const A: usize = 2;
    pub const DELTA: usize = 3;
    pub const Z: usize = 4;
    /// `sqrt(p0)`, reduced with `r^2 = p0`.
    pub const ROOT: usize = 5;
    pub const C: usize = 6;
    /// `1/p0`.
    pub const P0: usize = 7;
    pub const NVARS: usize = 8;
    pub const NAMES: [&str; NVARS] = ["a+", "a-", "a", "D", "z", "sqrt(p0)", "c", "1/p0"];
}

fn var(i: usize) -> MPoly {
    MPoly::var(sym::NVARS, i)
}

fn cst(c: Q) -> MPoly {
    MPoly::constant(sym::NVARS, c)
}

/// `1/sqrt(p0) = sqrt(p0) * p0^{-1}`, with `p0^{-1}` the formal variable P0.
fn inv_root() -> MPoly {
    &var(sym::ROOT) * &var(sym::P0)
}

/// Replaces `r^2 * p0^{-1}` by 1.
fn reduce_root(p: &MPoly) -> MPoly {
    let mut out = MPoly::zero(sym::NVARS);
    for (e, c) in p.terms() {
        let mut e = e.clone();
        let pairs = (e[sym::ROOT] / 2).min(e[sym::P0]);
        e[sym::ROOT] -= 2 * pairs;
        e[sym::P0] -= pairs;
        out = &out + &MPoly::monomial(sym::NVARS, e, c.clone());
    }
    out
}

/// `Pi(z)` with `alpha+, alpha-, a, Delta` formal.
pub fn pi_vector() -> [MPoly; 4] {
    let lin = &(&(&(&var(sym::ALPHA_PLUS) * &var(sym::A)) * &var(sym::DELTA)) * &var(sym::Z))
        + &cst(q(1));
    [
        &(&var(sym::ALPHA_MINUS) * &inv_root()).scale(&qf(1, 2)) * &lin,
        &inv_root().scale(&q(-1)) * &lin,
        var(sym::Z),
        var(sym::ALPHA_PLUS).scale(&qf(1, 2)) * &var(sym::Z),
    ]
}

/// Result of the Kodaira-Spencer symplectic identity check.
#[derive(Clone, Debug)]
pub struct KsSymplectic {
    /// `(dPi/dz) J Pi^T`.
    pub scalar: MPoly,
    pub z_free: bool,
    /// `scalar - (alpha+ - alpha-)/(2 sqrt(p0))`.
    pub residual: MPoly,
    /// `scalar` after `alpha+- = c +- sqrt(p0)`.
    pub specialised: MPoly,
}

impl KsSymplectic {
    pub fn scalar_string(&self) -> String {
        self.scalar.to_string_with(&sym::NAMES)
    }
    pub fn residual_string(&self) -> String {
        self.residual.to_string_with(&sym::NAMES)
    }
}

pub fn ks_symplectic_check() -> KsSymplectic {
    let pi = pi_vector();
    let dpi: Vec<MPoly> = pi.iter().map(|x| x.derivative(sym::Z)).collect();
    // J Pi^T = (Pi3, Pi4, -Pi1, -Pi2)
    let jpi = [
        pi[2].clone(),
        pi[3].clone(),
        pi[0].scale(&q(-1)),
        pi[1].scale(&q(-1)),
    ];
    let mut scalar = MPoly::zero(sym::NVARS);
    for t in 0..4 {
        scalar = &scalar + &(&dpi[t] * &jpi[t]);
    }
    let scalar = reduce_root(&scalar);
    let expected = (&var(sym::ALPHA_PLUS) - &var(sym::ALPHA_MINUS)) * &inv_root().scale(&qf(1, 2));
    let residual = reduce_root(&(&scalar - &expected));
    let plus = &var(sym::C) + &var(sym::ROOT);
    let minus = &var(sym::C) - &var(sym::ROOT);
    let specialised = reduce_root(
        &scalar
            .substitute(sym::ALPHA_PLUS, &plus)
            .substitute(sym::ALPHA_MINUS, &minus),
    );
    KsSymplectic {
        z_free: scalar.degree_in(sym::Z) == 0,
        scalar,
        residual,
        specialised,
    }
}

pub fn one_poly() -> MPoly {
    cst(Q::one())
}
