//! Quadratic Hilbert symbols over Q.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::padic::{is_prime, legendre, split_p};
use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Finite(u64),
    Infinity,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

/// `(a, b)_place`: +1 iff `a x^2 + b y^2 = z^2` has a nontrivial solution
/// over the completion of Q at `place`.
pub fn hilbert_symbol(a: &Q, b: &Q, place: Place) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroArgument);
    }
    // n/d and n*d agree modulo squares
    let a = a.numer() * a.denom();
    let b = b.numer() * b.denom();
    Ok(match place {
        Place::Infinity => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Finite(p) => {
            assert!(is_prime(p), "{p} is not prime");
            let (alpha, u) = split_p(&a, p);
            let (beta, v) = split_p(&b, p);
            if p == 2 {
                let eps = |x: &BigInt| -> i64 {
                    let r = x.mod_floor(&BigInt::from(4)).to_i64().unwrap();
                    ((r - 1) / 2) % 2
                };
                let omega = |x: &BigInt| -> i64 {
                    let r = x.mod_floor(&BigInt::from(8)).to_i64().unwrap();
                    ((r * r - 1) / 8) % 2
                };
                let e = eps(&u) * eps(&v) + alpha * omega(&v) + beta * omega(&u);
                if e % 2 == 0 {
                    1
                } else {
                    -1
                }
            } else {
                let e = alpha * beta * (((p - 1) / 2) as i64);
                let mut s: i8 = if e % 2 == 0 { 1 } else { -1 };
                if beta % 2 != 0 {
                    s *= legendre(&u, p);
                }
                if alpha % 2 != 0 {
                    s *= legendre(&v, p);
                }
                s
            }
        }
    })
}

/// Primes dividing a nonzero integer.
pub fn prime_divisors(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs().to_u64().expect("factorisation limited to u64");
    let mut out = Vec::new();
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            out.push(k);
            while n % k == 0 {
                n /= k;
            }
        }
        k += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The places where `(a, b)` can be -1: 2, infinity and the primes of `ab`.
pub fn relevant_places(a: &Q, b: &Q) -> Vec<Place> {
    let prod = a.numer() * a.denom() * b.numer() * b.denom();
    let mut primes = prime_divisors(&prod);
    primes.push(2);
    primes.sort_unstable();
    primes.dedup();
    let mut out: Vec<Place> = primes.into_iter().map(Place::Finite).collect();
    out.push(Place::Infinity);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    /// Primitive solutions of a x^2 + b y^2 = z^2 modulo p^k. For squarefree
    /// a, b this decides local solubility once k >= 2 (odd p) or k >= 3 (p = 2).
    fn brute(a: i64, b: i64, p: i64, k: u32) -> i8 {
        let m = p.pow(k);
        for x in 0..m {
            for y in 0..m {
                for z in 0..m {
                    if x % p == 0 && y % p == 0 && z % p == 0 {
                        continue;
                    }
                    if (a * x * x + b * y * y - z * z).rem_euclid(m) == 0 {
                        return 1;
                    }
                }
            }
        }
        -1
    }

    #[test]
    fn one_is_always_plus() {
        for b in [-7, -1, 2, 3, 10] {
            for pl in [Place::Finite(2), Place::Finite(3), Place::Finite(5), Place::Infinity] {
                assert_eq!(hilbert_symbol(&q(1), &q(b), pl).unwrap(), 1);
            }
        }
    }

    #[test]
    fn known_values_match_brute_force() {
        // (2,3)_3 = -1 and (-1,-1)_2 = -1
        assert_eq!(hilbert_symbol(&q(2), &q(3), Place::Finite(3)).unwrap(), -1);
        assert_eq!(brute(2, 3, 3, 2), -1);
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), Place::Finite(2)).unwrap(), -1);
        assert_eq!(brute(-1, -1, 2, 3), -1);
        assert_eq!(hilbert_symbol(&q(2), &q(7), Place::Finite(7)).unwrap(), 1);
        assert_eq!(brute(2, 7, 7, 2), 1);
    }

    #[test]
    fn rational_arguments_use_square_class() {
        let a = qf(2, 9);
        assert_eq!(
            hilbert_symbol(&a, &q(3), Place::Finite(3)).unwrap(),
            hilbert_symbol(&q(2), &q(3), Place::Finite(3)).unwrap()
        );
        assert_eq!(
            hilbert_symbol(&qf(1, 2), &q(3), Place::Finite(3)).unwrap(),
            hilbert_symbol(&q(2), &q(3), Place::Finite(3)).unwrap()
        );
    }

    #[test]
    fn zero_argument() {
        assert_eq!(hilbert_symbol(&q(0), &q(3), Place::Infinity), Err(Error::ZeroArgument));
    }
}
