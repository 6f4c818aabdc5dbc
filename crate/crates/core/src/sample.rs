//! Seeded random inputs shared by the verification suites and tests.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::matrix::Mat2;
use crate::nearly_rigid::{ExternalMono, NrFunction};
use crate::poly::UniPoly;
use crate::rational::{qf, Q};

pub type SampleRng = ChaCha8Rng;

/// Independent stream for assertion `id` under `seed`.
pub fn rng_for(seed: u64, id: u64) -> SampleRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(id);
    r
}

pub fn small_q(rng: &mut impl Rng) -> Q {
    let n = rng.gen_range(-9..=9);
    let d = [1, 1, 1, 2, 3][rng.gen_range(0..5)];
    qf(n, d)
}

pub fn nonzero_q(rng: &mut impl Rng) -> Q {
    loop {
        let x = small_q(rng);
        if x != Q::default() {
            return x;
        }
    }
}

/// Polynomial of degree at most `deg`.
pub fn poly(rng: &mut impl Rng, deg: usize) -> UniPoly {
    UniPoly::new((0..=deg).map(|_| small_q(rng)).collect())
}

/// Random nearly rigid function without log terms: up to `terms` monomials
/// `z^a z*^b u^c` with exponents at most `max_exp`.
pub fn nr_function(rng: &mut impl Rng, terms: usize, max_exp: u32) -> NrFunction {
    let n = rng.gen_range(1..=terms.max(1));
    let ext: Vec<(ExternalMono, Q)> = (0..n)
        .map(|_| {
            (
                ExternalMono {
                    z: rng.gen_range(0..=max_exp),
                    zs: rng.gen_range(0..=max_exp),
                    u: rng.gen_range(0..=max_exp),
                    log: 0,
                },
                nonzero_q(rng),
            )
        })
        .collect();
    NrFunction::from_external(&ext)
}

/// Like [`nr_function`] but with occasional `L` factors.
pub fn nr_function_with_log(rng: &mut impl Rng, terms: usize, max_exp: u32) -> NrFunction {
    let f = nr_function(rng, terms, max_exp);
    let g = nr_function(rng, terms, max_exp);
    let l = rng.gen_range(0..=2u32);
    &f + &(&g * &NrFunction::log().pow(l, &Q::from_integer(1.into())))
}

/// Integer matrix with small entries and nonzero determinant.
pub fn invertible_matrix(rng: &mut impl Rng, bound: i64) -> Mat2 {
    loop {
        let m = Mat2::from_ints(
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound),
            rng.gen_range(-bound..=bound),
        );
        if m.det() != Q::default() {
            return m;
        }
    }
}
