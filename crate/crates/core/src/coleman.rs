//! Coleman primitives of `ω_f = f(z) dz ⊗ ω_can^n` in the symbolic ring, the
//! sections `G_j`, the functions `H_j` and their identities.
//!
//! With `F = Σ c_a ω^a η^(n-a)`, `∇F = ω_f` reads
//! `∂c_a + (2a - n) u c_a + (a + 1) c_(a+1) = 0` for `a < n`,
//! `∂c_n + n u c_n = f` and `∂* c_a = (n - a + 1) u² c_(a-1)`.
//! Starting from an unknown rigid `c₀` the first family determines every
//! `c_a`; the last equation then collapses to `κ · c₀^(n+1) = f`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::derham::{self, Basis, DrForm, DrSection};
use crate::error::{Error, Result};
use crate::maass::delta_iter;
use crate::nearly_rigid::NrFunction;
use crate::poly::UniPoly;
use crate::rational::{binomial, factorial, q, q_to_string, Q};

type F = NrFunction<Q>;

/// `Σ κ · u^i · c₀^(k)` keyed by `(i, k)`.
type Formal = BTreeMap<(u32, u32), Q>;

fn formal_add(acc: &mut Formal, key: (u32, u32), c: Q) {
    let e = acc.entry(key).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        acc.remove(&key);
    }
}

/// `∂/∂z` using `∂u = -u²`.
fn formal_d(x: &Formal) -> Formal {
    let mut out = Formal::new();
    for (&(i, k), c) in x {
        if i > 0 {
            formal_add(&mut out, (i + 1, k), -c * Q::from_integer(i.into()));
        }
        formal_add(&mut out, (i, k + 1), c.clone());
    }
    out
}

fn formal_u(x: &Formal, scale: &Q) -> Formal {
    let mut out = Formal::new();
    for (&(i, k), c) in x {
        formal_add(&mut out, (i + 1, k), c * scale);
    }
    out
}

fn formal_sum(a: &Formal, b: &Formal) -> Formal {
    let mut out = a.clone();
    for (k, c) in b {
        formal_add(&mut out, *k, c.clone());
    }
    out
}

/// The formal coefficients `c_0, ..., c_n` in terms of `c₀` and the left side
/// of the final equation.
fn formal_chain(n: u32) -> (Vec<Formal>, Formal) {
    let nn = n as i64;
    let mut cs = vec![Formal::from([((0, 0), Q::one())])];
    for a in 0..n {
        let c = &cs[a as usize];
        let rhs = formal_sum(&formal_d(c), &formal_u(c, &q(2 * a as i64 - nn)));
        let k = -Q::one() / q(a as i64 + 1);
        cs.push(rhs.into_iter().map(|(key, v)| (key, v * &k)).collect());
    }
    let last = &cs[n as usize];
    let fin = formal_sum(&formal_d(last), &formal_u(last, &q(nn)));
    (cs, fin)
}

fn formal_to_string(x: &Formal) -> String {
    x.iter()
        .map(|(&(i, k), c)| format!("{}*u^{i}*c0^({k})", q_to_string(c)))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// The constant `κ` with `∂c_n + n u c_n = κ c₀^(n+1)`.
pub fn final_constant(n: u32) -> Result<Q> {
    let (_, fin) = formal_chain(n);
    if let [(&(0, k), c)] = fin.iter().collect::<Vec<_>>()[..] {
        if k == n + 1 {
            return Ok(c.clone());
        }
    }
    Err(Error::CancellationFailure(formal_to_string(&fin)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrimitiveSolution {
    pub n: u32,
    pub f: UniPoly,
    pub c0: UniPoly,
    /// `κ` in `κ c₀^(n+1) = f`.
    pub kappa: Q,
    /// `c_a` in the canonical frame, `a = 0..=n`.
    pub coeffs: Vec<F>,
}

fn check_even(n: i64) -> Result<u32> {
    if n < 0 || n % 2 != 0 {
        return Err(Error::OddDegree(n));
    }
    Ok(n as u32)
}

/// The recursion applied to a concrete `c₀`.
fn chain_from(c0: &UniPoly, n: u32) -> Vec<F> {
    let nn = n as i64;
    let mut cs = vec![F::from_z_poly(c0)];
    for a in 0..n as i64 {
        let c = &cs[a as usize];
        let rhs = &c.d_dz() + &c.shift_w(-1).scale_int(2 * a - nn);
        cs.push(rhs.scale(&(-Q::one() / q(a + 1))));
    }
    cs
}

/// Solves `∇F = f dz ⊗ ω_can^n` with all integration constants zero.
pub fn solve_primitive(f: &UniPoly, n: i64) -> Result<PrimitiveSolution> {
    let n = check_even(n)?;
    let kappa = final_constant(n)?;
    let mut c0 = f.scale(&(Q::one() / &kappa));
    for _ in 0..=n {
        c0 = c0.antiderivative();
    }
    let coeffs = chain_from(&c0, n);
    let sol = PrimitiveSolution { n, f: f.clone(), c0, kappa, coeffs };
    let last = &sol.coeffs[n as usize];
    let fin = &last.d_dz() + &last.shift_w(-1).scale_int(n as i64);
    if fin != F::from_z_poly(f) {
        return Err(Error::CancellationFailure(format!("{:?}", &fin - &F::from_z_poly(f))));
    }
    sol.check_dzstar()?;
    Ok(sol)
}

impl PrimitiveSolution {
    pub fn section(&self) -> DrSection {
        DrSection::new(
            Basis::Canonical,
            self.n as i64,
            0,
            self.coeffs.iter().enumerate().map(|(a, c)| (a as i64, c.clone())),
        )
        .expect("indices in range")
    }

    /// `ω_f = f dz ⊗ ω_can^n`.
    pub fn omega_f(&self) -> DrForm {
        let n = self.n as i64;
        DrForm {
            dz: DrSection::monomial(Basis::Canonical, n, n, F::from_z_poly(&self.f)).expect("valid"),
            dzs: DrSection::zero(Basis::Canonical, n),
        }
    }

    /// `∂* c_a = (n - a + 1) u² c_(a-1)` for every `a`.
    pub fn check_dzstar(&self) -> Result<()> {
        let u2 = F::u().pow(2, &Q::one());
        for a in 0..=self.n as usize {
            let lhs = self.coeffs[a].d_dzstar();
            let rhs = if a == 0 {
                F::zero()
            } else {
                (&u2 * &self.coeffs[a - 1]).scale_int((self.n as usize - a + 1) as i64)
            };
            if lhs != rhs {
                return Err(Error::CancellationFailure(format!("dz* equation fails at a = {a}")));
            }
        }
        Ok(())
    }

    /// `∇F - ω_f` is zero.
    pub fn verify(&self) -> Result<()> {
        let nf = derham::gm_connection(&self.section())?;
        if !nf.same_as(&self.omega_f()) {
            return Err(Error::IdentityFailure(format!("∇F - ω_f ≠ 0: {:?}", nf)));
        }
        Ok(())
    }

    /// `⟨F, ω^j η^(n-j)⟩ = (-1)^j c_(n-j) / C(n, j)` for any `0 ≤ j ≤ n`.
    pub fn pairing_value(&self, j: i64) -> Result<F> {
        let n = self.n as i64;
        if !(0..=n).contains(&j) {
            return Err(Error::IndexOutOfRange { j, n });
        }
        let sign: i64 = if j % 2 == 0 { 1 } else { -1 };
        Ok(self.coeffs[(n - j) as usize].scale(&Q::new(sign.into(), binomial(n as u64, j as u64))))
    }

    fn check_range(&self, j: i64) -> Result<()> {
        let n = self.n as i64;
        if j < n / 2 || j > n {
            return Err(Error::IndexOutOfRange { j, n });
        }
        Ok(())
    }

    /// `H_j` for `n/2 ≤ j ≤ n`.
    pub fn make_h(&self, j: i64) -> Result<F> {
        self.check_range(j)?;
        self.pairing_value(j)
    }

    /// `G_j = H_j ⊗ ω_can^(n-2j)` for `n/2 ≤ j ≤ n`.
    pub fn make_g(&self, j: i64) -> Result<DrSection> {
        self.check_range(j)?;
        self.g_unchecked(j)
    }

    fn g_unchecked(&self, j: i64) -> Result<DrSection> {
        Ok(DrSection::pure(self.pairing_value(j)?, self.n as i64 - 2 * j))
    }

    pub fn to_json(&self) -> Value {
        let mut coeffs = Map::new();
        for (a, c) in self.coeffs.iter().enumerate() {
            coeffs.insert(a.to_string(), c.to_json());
        }
        json!({
            "n": self.n,
            "f": self.f.to_json(),
            "c0": self.c0.to_json(),
            "kappa": q_to_string(&self.kappa),
            "basis": "canonical",
            "coeffs": coeffs,
        })
    }
}

/// `Θ(G_j) = j G_(j-1)` with `t_p = 1` (for `j = n/2` the right side uses
/// the pairing value just below the admissible range).
pub fn check_theta_step(sol: &PrimitiveSolution, j: i64) -> Result<()> {
    let g = sol.make_g(j)?;
    let lhs = derham::theta(&g)?.with_tp_pow(0);
    let rhs = sol.g_unchecked(j - 1)?.scale(&F::from_int(j));
    if !lhs.same_as(&rhs) {
        return Err(Error::IdentityFailure(format!("Θ(G_{j}) - {j}·G_{}", j - 1)));
    }
    Ok(())
}

/// `Θ^(j+1)(G_j) = j! ω_f`, `ω_f` identified with a weight `n + 2` section via
/// `KS⁻¹`. Returns the `t_p` exponent `e` of the exact identity
/// `Θ^(j+1)(G_j) = t_p^e · j! · KS⁻¹(ω_f)`.
pub fn check_theta_top(sol: &PrimitiveSolution, j: i64) -> Result<i64> {
    let g = sol.make_g(j)?;
    let lhs = derham::theta_iter(&g, (j + 1) as usize)?;
    let ks = derham::ks_inverse(&sol.omega_f().dz)?;
    let jf = Q::from_integer(factorial(j as u64));
    let rhs = ks.scale(&F::from_q(jf));
    let e = lhs.tp_pow() - rhs.tp_pow();
    if !lhs.clone().with_tp_pow(0).same_as(&rhs.with_tp_pow(0)) {
        return Err(Error::IdentityFailure(format!("Θ^{}(G_{j}) - {j}!·ω_f", j + 1)));
    }
    Ok(e)
}

#[derive(Clone, Debug)]
pub struct RecurrenceReport {
    pub j: i64,
    pub factor: Q,
    pub discrepancy: F,
}

/// Weight at which the `δ` iteration of `H_n` starts.
pub fn h_n_weight(n: u32) -> i64 {
    -(n as i64)
}

/// `δ^(n-j)(H_n) = (n!/j!) H_j`.
pub fn verify_h_recurrence(sol: &PrimitiveSolution, j: i64) -> Result<RecurrenceReport> {
    sol.check_range(j)?;
    let n = sol.n as i64;
    let hn = sol.make_h(n)?;
    let lhs = delta_iter(&hn, h_n_weight(sol.n), (n - j) as usize);
    let factor = Q::new(factorial(n as u64), factorial(j as u64));
    let disc = &lhs - &sol.make_h(j)?.scale(&factor);
    if !disc.is_zero() {
        return Err(Error::IdentityFailure(format!("{disc:?}")));
    }
    Ok(RecurrenceReport { j, factor, discrepancy: disc })
}

/// Horizontal sections of `Sym^n`: the solutions with `f = 0`, one for each
/// `c₀ = z^t` with `t ≤ n`. Each is checked to satisfy `∇F = 0`.
pub fn kernel_basis(n: i64) -> Result<Vec<DrSection>> {
    if n < 0 {
        return Err(Error::NegativeWeight(format!("Sym^{n}")));
    }
    let n = n as u32;
    // κ c₀^(n+1) = 0 has the polynomials of degree ≤ n as solutions.
    final_constant(n)?;
    let mut out = Vec::new();
    for t in 0..=n as usize {
        let c0 = UniPoly::monomial(Q::one(), t);
        let coeffs = chain_from(&c0, n);
        let s = DrSection::new(
            Basis::Canonical,
            n as i64,
            0,
            coeffs.into_iter().enumerate().map(|(a, c)| (a as i64, c)),
        )?;
        let ns = derham::gm_connection(&s)?;
        if !(ns.dz.is_zero() && ns.dzs.is_zero()) {
            return Err(Error::IdentityFailure(format!("c0 = z^{t} is not horizontal")));
        }
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    #[test]
    fn degree_zero() {
        let s = solve_primitive(&UniPoly::from_ints(&[1]), 0).unwrap();
        assert_eq!(s.c0, UniPoly::from_ints(&[0, 1]));
        s.verify().unwrap();
        assert_eq!(s.make_g(0).unwrap(), DrSection::pure(F::z(), 0));
    }

    #[test]
    fn degree_two_example() {
        assert_eq!(final_constant(2).unwrap(), qf(1, 2));
        let s = solve_primitive(&UniPoly::from_ints(&[0, 12]), 2).unwrap();
        assert_eq!(s.c0, UniPoly::from_ints(&[0, 0, 0, 0, 1]));
        let (c0, u) = (F::from_z_poly(&s.c0), F::u());
        let d1 = F::from_z_poly(&s.c0.derivative());
        let d2 = F::from_z_poly(&s.c0.nth_derivative(2));
        assert_eq!(s.coeffs[1], &(&u * &c0).scale_int(2) - &d1);
        let c2 = &(&(&(&u * &u) * &c0) - &(&u * &d1)) + &d2.scale(&qf(1, 2));
        assert_eq!(s.coeffs[2], c2);
        s.verify().unwrap();
        verify_h_recurrence(&s, 1).unwrap();
        verify_h_recurrence(&s, 2).unwrap();
    }

    #[test]
    fn odd_degree_rejected() {
        assert_eq!(solve_primitive(&UniPoly::from_ints(&[1]), 3), Err(Error::OddDegree(3)));
    }

    #[test]
    fn range_checks() {
        let s = solve_primitive(&UniPoly::from_ints(&[1, 1]), 4).unwrap();
        assert!(matches!(s.make_h(1), Err(Error::IndexOutOfRange { j: 1, n: 4 })));
        assert!(s.pairing_value(1).is_ok());
        assert!(s.make_g(5).is_err());
    }

    #[test]
    fn theorem_identities() {
        for n in [0i64, 2, 4] {
            let s = solve_primitive(&UniPoly::from_ints(&[3, -1, 2]), n).unwrap();
            for j in n / 2..=n {
                if j >= 1 {
                    check_theta_step(&s, j).unwrap();
                }
                assert_eq!(check_theta_top(&s, j).unwrap(), -j);
                verify_h_recurrence(&s, j).unwrap();
            }
        }
    }

    #[test]
    fn kernel_has_full_rank() {
        for n in [0i64, 2, 4] {
            assert_eq!(kernel_basis(n).unwrap().len(), n as usize + 1);
        }
    }
}
