//! CM points: fixed points of embeddings `Q_{p²} → M₂(Q_p)` and evaluation of
//! nearly rigid functions there.

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::coleman::{h_n_weight, PrimitiveSolution};
use crate::error::{Error, Result};
use crate::maass::delta_iter;
use crate::matrix::Mat2;
use crate::nearly_rigid::NrFunction;
use crate::padic::{legendre, PadicContext, PadicScalar, UpperHalfPoint};
use crate::rational::{factorial, Q};
use crate::tree::vp;

/// A matrix `M` with `M² = d_K · I` for a non-square `d_K` of even valuation.
#[derive(Clone, Debug, PartialEq)]
pub struct CmEmbedding {
    pub m: Mat2,
    pub dk: Q,
}

impl CmEmbedding {
    pub fn new(m: Mat2, p: u64) -> Result<Self> {
        if m.is_scalar() {
            return Err(Error::NotAnEmbedding("scalar matrix".into()));
        }
        let sq = &m * &m;
        if !sq.is_scalar() {
            return Err(Error::NotAnEmbedding(format!("M² = {sq:?} is not scalar")));
        }
        let dk = sq.a.clone();
        if dk.is_zero() {
            return Err(Error::NotAnEmbedding("nilpotent matrix".into()));
        }
        let v = vp(&dk, p).expect("nonzero");
        if v % 2 != 0 {
            return Err(Error::NotAnEmbedding(format!("d_K has odd valuation {v} (ramified)")));
        }
        let unit = &dk * pow_q(p, -v);
        let residue = unit.numer() * unit.denom();
        if legendre(&residue, p) == 1 {
            return Err(Error::RootInQp);
        }
        Ok(CmEmbedding { m, dk })
    }
}

fn pow_q(p: u64, e: i64) -> Q {
    let pq = Q::from_integer(p.into());
    if e >= 0 {
        num_traits::pow(pq, e as usize)
    } else {
        Q::one() / num_traits::pow(pq, (-e) as usize)
    }
}

#[derive(Clone, Debug)]
pub struct CmPoint {
    pub embedding: CmEmbedding,
    pub z0: UpperHalfPoint,
    /// `λ` with `M (z0, 1)ᵀ = λ (z0, 1)ᵀ`; `λ² = d_K`.
    pub eigenvalue: PadicScalar,
}

/// Roots of `M₂₁ z² + (M₂₂ - M₁₁) z - M₁₂ = 0`.
fn fixed_roots(m: &Mat2, ctx: &PadicContext) -> Result<[PadicScalar; 2]> {
    let (a, b, c) = (ctx.from_q(&m.c), ctx.from_q(&(&m.d - &m.a)), ctx.from_q(&(-&m.b)));
    if m.c.is_zero() {
        return Err(Error::RootInQp);
    }
    let disc = &(&b * &b) - &(&(&a * &c) * &ctx.from_int(4));
    let r = disc.sqrt()?;
    let two_a = &a * &ctx.from_int(2);
    Ok([(&(-&b) + &r).div(&two_a)?, (&(-&b) - &r).div(&two_a)?])
}

impl CmPoint {
    /// The fixed point with positive s-component sign.
    pub fn fixed_point(e: &CmEmbedding, ctx: &PadicContext) -> Result<Self> {
        let roots = fixed_roots(&e.m, ctx)?;
        let z = roots
            .into_iter()
            .find(|z| z.s_sign() > 0)
            .ok_or(Error::RootInQp)?;
        let z0 = UpperHalfPoint::new(z).map_err(|_| Error::RootInQp)?;
        let eigenvalue = e.m.automorphy(z0.z());
        let pt = CmPoint { embedding: e.clone(), z0, eigenvalue };
        if !pt.eigen_residual().is_zero() {
            return Err(Error::NotAnEmbedding("eigen-equation fails at working precision".into()));
        }
        Ok(pt)
    }

    /// `M₁₁ z0 + M₁₂ - λ z0`.
    pub fn eigen_residual(&self) -> PadicScalar {
        let ctx = self.z0.context();
        let m = &self.embedding.m;
        let z = self.z0.z();
        &(&(&ctx.from_q(&m.a) * z) + &ctx.from_q(&m.b)) - &(&self.eigenvalue * z)
    }

    /// The fixed point of `adj(M)` with eigenvalue `λ`.
    pub fn conjugate_fixed_point(&self) -> Result<PadicScalar> {
        let adj = self.embedding.m.adj();
        let ctx = self.z0.context();
        for z in fixed_roots(&adj, &ctx)? {
            if adj.automorphy(&z) == self.eigenvalue {
                return Ok(z);
            }
        }
        Err(Error::NotAnEmbedding("no fixed point of adj(M) with eigenvalue λ".into()))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "matrix": self.embedding.m.to_json(),
            "z0": self.z0.z().to_json(),
            "sigma_z0": self.z0.conj().to_json(),
            "eigenvalue": self.eigenvalue.to_json(),
            "residual": self.eigen_residual().to_json(),
        })
    }
}

/// `δ^j_k(f)` evaluated at the CM point.
pub fn evaluate_maass_at_cm(
    f: &NrFunction,
    k: i64,
    j: usize,
    pt: &CmPoint,
    log_branch: Option<&PadicScalar>,
) -> Result<PadicScalar> {
    delta_iter(f, k, j).evaluate(&pt.z0, log_branch)
}

#[derive(Clone, Debug)]
pub struct AjRow {
    pub j: i64,
    pub h_j: PadicScalar,
    pub delta_h_n: PadicScalar,
    /// `n!/j!`
    pub factor: Q,
    pub consistent: bool,
}

impl AjRow {
    pub fn to_json(&self) -> Value {
        json!({
            "j": self.j,
            "H_j": self.h_j.to_json(),
            "delta_H_n": self.delta_h_n.to_json(),
            "factor": crate::rational::q_to_string(&self.factor),
            "consistent": self.consistent,
        })
    }
}

/// Rows `(j, H_j(z_A), δ^(n-j)(H_n)(z_A))` for `n/2 ≤ j ≤ n`.
pub fn aj_values(sol: &PrimitiveSolution, pt: &CmPoint, log_branch: Option<&PadicScalar>) -> Result<Vec<AjRow>> {
    let n = sol.n as i64;
    let ctx = pt.z0.context();
    let hn = sol.make_h(n)?;
    let mut rows = Vec::new();
    for j in n / 2..=n {
        let h_j = sol.make_h(j)?.evaluate(&pt.z0, log_branch)?;
        let delta_h_n = delta_iter(&hn, h_n_weight(sol.n), (n - j) as usize).evaluate(&pt.z0, log_branch)?;
        let factor = Q::new(factorial(n as u64), factorial(j as u64));
        let consistent = delta_h_n == &ctx.from_q(&factor) * &h_j;
        rows.push(AjRow { j, h_j, delta_h_n, factor, consistent });
    }
    Ok(rows)
}

/// `⟨F, (d ω_can)^j η_can^(n-j)⟩(z_A)` for each admissible `j`.
pub fn scaled_pairing_values(sol: &PrimitiveSolution, pt: &CmPoint, d_phi: &Q) -> Result<Vec<(i64, PadicScalar)>> {
    let n = sol.n as i64;
    let f = sol.section();
    let mut out = Vec::new();
    for j in n / 2..=n {
        let omega = crate::derham::canonical_monomial(n, j)?;
        // (dω)^j η^(n-j) = d^j ω^j η^(n-j)
        let scaled = omega.scale(&NrFunction::from_q(num_traits::pow(d_phi.clone(), j as usize)));
        let v = crate::derham::sym_pairing(&f, &scaled)?.evaluate(&pt.z0, None)?;
        out.push((j, v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::UniPoly;
    use crate::rational::q;

    fn ctx() -> PadicContext {
        PadicContext::new(5, 20).unwrap()
    }

    #[test]
    fn standard_embedding() {
        let c = ctx();
        let e = CmEmbedding::new(Mat2::from_ints(0, c.d, 1, 0), 5).unwrap();
        let pt = CmPoint::fixed_point(&e, &c).unwrap();
        assert!(pt.z0.z() == &c.s() || pt.z0.z() == &(-&c.s()));
        assert_eq!(pt.eigenvalue, *pt.z0.z());
        assert!(pt.eigen_residual().is_zero());
        assert_eq!(pt.conjugate_fixed_point().unwrap(), pt.z0.conj());
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(matches!(CmEmbedding::new(Mat2::from_ints(3, 0, 0, 3), 5), Err(Error::NotAnEmbedding(_))));
        assert_eq!(CmEmbedding::new(Mat2::from_ints(0, 4, 1, 0), 5), Err(Error::RootInQp));
        assert!(matches!(CmEmbedding::new(Mat2::from_ints(1, 2, 3, 4), 5), Err(Error::NotAnEmbedding(_))));
        assert!(matches!(CmEmbedding::new(Mat2::from_ints(0, 5, 1, 0), 5), Err(Error::NotAnEmbedding(_))));
    }

    #[test]
    fn maass_values() {
        let c = ctx();
        let e = CmEmbedding::new(Mat2::from_ints(0, 2, 1, 0), 5).unwrap();
        let pt = CmPoint::fixed_point(&e, &c).unwrap();
        let f = NrFunction::z();
        assert_eq!(evaluate_maass_at_cm(&f, 3, 0, &pt, None).unwrap(), *pt.z0.z());
        let v = evaluate_maass_at_cm(&NrFunction::one(), 4, 1, &pt, None).unwrap();
        assert_eq!(v, c.from_int(4).div(&pt.z0.diff()).unwrap());
    }

    #[test]
    fn aj_table_for_cubic() {
        let c = ctx();
        let e = CmEmbedding::new(Mat2::from_ints(0, 2, 1, 0), 5).unwrap();
        let pt = CmPoint::fixed_point(&e, &c).unwrap();
        let sol = crate::coleman::solve_primitive(&UniPoly::from_ints(&[0, 12]), 2).unwrap();
        let rows = aj_values(&sol, &pt, None).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.consistent));
        let base = scaled_pairing_values(&sol, &pt, &q(1)).unwrap();
        let scaled = scaled_pairing_values(&sol, &pt, &q(3)).unwrap();
        for ((j, a), (_, b)) in base.iter().zip(&scaled) {
            assert_eq!(*b, &c.from_int(3i64.pow(*j as u32)) * a);
        }
    }
}
