//! The Shimura–Maass operator `δ_k = ∂/∂z + k/(z - z*)` and the graded
//! decomposition of nearly rigid functions.

use crate::error::{Error, Result};
use crate::matrix::Mat2;
use crate::nearly_rigid::{GradedForm, NrFunction, ToPadic};
use crate::padic::UpperHalfPoint;
use crate::poly::UniPoly;
use crate::rational::{Coeff, Q};

/// A nearly rigid function together with its weight.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedFunction<C: Coeff = Q> {
    pub f: NrFunction<C>,
    pub k: i64,
}

impl<C: Coeff> WeightedFunction<C> {
    pub fn new(f: NrFunction<C>, k: i64) -> Self {
        WeightedFunction { f, k }
    }

    pub fn raise(&self) -> Self {
        WeightedFunction::new(delta(&self.f, self.k), self.k + 2)
    }
}

pub fn delta<C: Coeff>(f: &NrFunction<C>, k: i64) -> NrFunction<C> {
    &f.d_dz() + &f.shift_w(-1).scale_int(k)
}

/// `δ_{k+2(j-1)} ∘ ... ∘ δ_k`.
pub fn delta_iter<C: Coeff>(f: &NrFunction<C>, k: i64, j: usize) -> NrFunction<C> {
    let mut g = f.clone();
    for i in 0..j {
        g = delta(&g, k + 2 * i as i64);
    }
    g
}

/// `k (k+1) ... (k+j-1)`.
pub fn pochhammer(k: i64, j: usize) -> i64 {
    (0..j as i64).map(|i| k + i).product()
}

#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub checks: usize,
    /// Smallest valuation of `f(γz) - (cz+d)^k f(z)` over all samples,
    /// `None` when every discrepancy vanished at working precision.
    pub worst_valuation: Option<i64>,
    /// Smallest working precision seen across the samples.
    pub min_precision: i64,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.worst_valuation.is_none()
    }
}

/// Samples the transformation law `f(γz) = (cz+d)^k f(z)`.
pub fn weight_invariance_check<C: Coeff + ToPadic>(
    f: &NrFunction<C>,
    k: i64,
    gammas: &[Mat2],
    points: &[UpperHalfPoint],
) -> Result<InvarianceReport> {
    let mut worst: Option<i64> = None;
    let mut min_prec = i64::MAX;
    let mut checks = 0;
    for g in gammas {
        for z in points {
            let j = g.automorphy(z.z());
            if j.is_zero() {
                return Err(Error::SamplePointDegenerate(format!("cz+d vanishes for {g:?}")));
            }
            let gz = g
                .mobius(z.z())
                .map_err(|e| Error::SamplePointDegenerate(e.to_string()))?;
            let gz = UpperHalfPoint::new(gz)
                .map_err(|_| Error::SamplePointDegenerate(format!("{g:?} sends a sample into Q_p")))?;
            let lhs = f.evaluate(&gz, None)?;
            let rhs = &j.pow(k)? * &f.evaluate(z, None)?;
            let diff = &lhs - &rhs;
            min_prec = min_prec.min(diff.precision());
            if let Some(v) = diff.valuation() {
                worst = Some(worst.map_or(v, |w: i64| w.min(v)));
            }
            checks += 1;
        }
    }
    Ok(InvarianceReport { checks, worst_valuation: worst, min_precision: min_prec })
}

/// `Σ_j δ^j(h_j)` with `h_j` of weight `k + 2(r - j)`; the result has weight `k + 2r`.
pub fn graded_compose(hs: &[UniPoly], k: i64) -> NrFunction {
    let r = hs.len().saturating_sub(1) as i64;
    let mut out = NrFunction::zero();
    for (j, h) in hs.iter().enumerate() {
        let w = k + 2 * (r - j as i64);
        out = &out + &delta_iter(&NrFunction::from_z_poly(h), w, j);
    }
    out
}

/// Inverse of [`graded_compose`]: writes a depth-`r` form of weight `k + 2r`
/// as `Σ_j δ^j(h_j)` by peeling off the top `u`-degree.
pub fn graded_decompose(h: &GradedForm, k: i64) -> Result<Vec<UniPoly>> {
    let r = h.depth();
    let mut residual = NrFunction::from_graded_form(h);
    let mut out = vec![UniPoly::zero(); r + 1];
    for j in (0..=r).rev() {
        let w = k + 2 * (r - j) as i64;
        let poch = pochhammer(w, j);
        if poch == 0 {
            return Err(Error::ZeroPochhammer { weight: w, depth: j });
        }
        let g = residual.to_graded_form().map_err(|_| Error::NotInGradedSpan)?;
        if g.depth() > j {
            return Err(Error::NotInGradedSpan);
        }
        let top = g.parts.get(j).cloned().unwrap_or_else(UniPoly::zero);
        let hj = top.scale(&Q::new(1.into(), poch.into()));
        residual = &residual - &delta_iter(&NrFunction::from_z_poly(&hj), w, j);
        out[j] = hj;
    }
    if !residual.is_zero() {
        return Err(Error::NotInGradedSpan);
    }
    Ok(out)
}

/// [`graded_decompose`] for an arbitrary nearly rigid function of depth `r`.
pub fn graded_decompose_nr(f: &NrFunction, k: i64) -> Result<Vec<UniPoly>> {
    let g = f.to_graded_form().map_err(|e| match e {
        Error::NotNearlyRigid => Error::NotInGradedSpan,
        e => e,
    })?;
    graded_decompose(&g, k)
}

/// True if `δ_k` raised the `u`-degree by at most one.
pub fn degree_growth_ok(f: &NrFunction, k: i64) -> bool {
    delta(f, k).u_degree() <= f.u_degree() + 1
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicContext;
    use crate::rational::q;

    type F = NrFunction<Q>;

    #[test]
    fn delta_examples() {
        assert_eq!(delta(&F::one(), 5), F::u().scale_int(5));
        let expect = &F::one() + &(&F::z() * &F::u()).scale_int(2);
        assert_eq!(delta(&F::z(), 2), expect);
        let f = &(&F::z() * &F::zs()) + &F::u();
        assert_eq!(delta(&f, 0), f.d_dz());
    }

    #[test]
    fn iterates_follow_pochhammer() {
        for k in [-3i64, 0, 2, 5] {
            assert_eq!(delta_iter(&F::one(), k, 0), F::one());
            assert_eq!(delta_iter(&F::one(), k, 2), F::u().pow(2, &q(1)).scale_int(k * (k + 1)));
            assert_eq!(
                delta_iter(&F::one(), k, 3),
                F::u().pow(3, &q(1)).scale_int(k * (k + 1) * (k + 2))
            );
        }
    }

    #[test]
    fn decomposition_examples() {
        let h = F::u().scale_int(2).to_graded_form().unwrap();
        let parts = graded_decompose(&h, 2).unwrap();
        assert_eq!(parts, vec![UniPoly::zero(), UniPoly::from_ints(&[1])]);
        let g = GradedForm::new(vec![UniPoly::from_ints(&[1, 2, 3])]);
        assert_eq!(graded_decompose(&g, 4).unwrap(), g.parts);
        let bad = F::u().to_graded_form().unwrap();
        assert!(matches!(graded_decompose(&bad, 0), Err(Error::ZeroPochhammer { .. })));
        assert_eq!(graded_decompose_nr(&F::zs(), 2), Err(Error::NotInGradedSpan));
    }

    #[test]
    fn identity_and_constant_pass_invariance() {
        let ctx = PadicContext::new(5, 10).unwrap();
        let pts = vec![UpperHalfPoint::new(ctx.s()).unwrap()];
        let f = &F::z() * &F::u();
        let rep = weight_invariance_check(&f, 3, &[Mat2::identity()], &pts).unwrap();
        assert!(rep.passed());
        let rep = weight_invariance_check(&F::one(), 0, &[Mat2::from_ints(2, 1, 1, 1)], &pts).unwrap();
        assert!(rep.passed());
        let rep = weight_invariance_check(&F::z(), 0, &[Mat2::from_ints(1, 1, 0, 1)], &pts).unwrap();
        assert!(!rep.passed());
    }
}
