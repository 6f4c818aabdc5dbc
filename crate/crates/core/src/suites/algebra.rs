//! Suites over exact rational arithmetic.

use rand::Rng;

use super::{e2s, task, Check, Task};
use crate::coleman::{self, solve_primitive};
use crate::derham::{self, hodge_split, theta, theta_iter, Basis, DrSection};
use crate::hilbert::{hilbert_symbol, relevant_places, Place};
use crate::maass::{delta, delta_iter, graded_compose, graded_decompose};
use crate::nearly_rigid::{GradedForm, NrFunction};
use crate::poly::UniPoly;
use crate::quadratic::QSqrt;
use crate::quaternion::{find_p0, ks_symplectic_check, one_poly, HashimotoAlgebra, QuatElement};
use crate::rational::{q, Q};
use crate::sample::{self, SampleRng};

type F = NrFunction<Q>;

fn random_section(rng: &mut SampleRng) -> DrSection {
    let n = rng.gen_range(0..=4i64);
    let basis = [Basis::Tau, Basis::DxDy, Basis::Canonical][rng.gen_range(0..3)];
    let coeffs: Vec<(i64, F)> = (0..=n).map(|a| (a, sample::nr_function(rng, 3, 2))).collect();
    DrSection::new(basis, n, 0, coeffs).expect("indices in range")
}

pub(super) fn splitting() -> Vec<Task> {
    let mut out = vec![task("splitting/fixed-sections", |_| {
        let dtau_star = DrSection::new(Basis::DxDy, 1, 0, [(1, F::zs()), (0, F::one())]).expect("valid");
        let dtau = DrSection::new(Basis::DxDy, 1, 0, [(1, F::z()), (0, F::one())]).expect("valid");
        let a = hodge_split(&dtau_star).map(|s| s.is_zero());
        let b = hodge_split(&dtau).map(|s| s == DrSection::pure(F::one(), 1));
        Check::expect(a == Ok(true) && b == Ok(true), format!("Ψ(dτ*) = 0: {a:?}, Ψ(dτ) = dτ: {b:?}"))
    })];
    for i in 0..100 {
        out.push(task(format!("splitting/section-{i:03}"), |rng| {
            Check::from_result((|| {
                let f = sample::nr_function(rng, 4, 2);
                let g = sample::nr_function(rng, 4, 2);
                let s = DrSection::new(Basis::DxDy, 1, 0, [(1, f.clone()), (0, g.clone())]).map_err(e2s)?;
                let closed = DrSection::pure(&(&f - &(&g * &F::zs())) * &F::u(), 1);
                if hodge_split(&s).map_err(e2s)? != closed {
                    return Err("Ψ(f dx + g dy) differs from u(f - g z*) dτ".into());
                }
                let t = random_section(rng);
                let pt = hodge_split(&t).map_err(e2s)?;
                if hodge_split(&pt).map_err(e2s)? != pt {
                    return Err(format!("Ψ² ≠ Ψ on a degree {} section", t.degree()));
                }
                for b in [Basis::Tau, Basis::DxDy, Basis::Canonical] {
                    let back = derham::basis_convert(&derham::basis_convert(&t, b).map_err(e2s)?, t.basis())
                        .map_err(e2s)?;
                    if back != t {
                        return Err(format!("basis round trip through {} fails", b.name()));
                    }
                }
                let m = rng.gen_range(-3..=6i64);
                let pure = DrSection::pure(sample::nr_function(rng, 3, 2), m);
                if hodge_split(&pure).map_err(e2s)? != pure {
                    return Err(format!("Ψ is not the identity on dτ^{m}"));
                }
                Ok(Check::pass(format!("degree {} random section", t.degree())))
            })())
        }));
    }
    out
}

pub(super) fn explicit_formula() -> Vec<Task> {
    let mut out = Vec::new();
    for i in 0..30 {
        for k in [2i64, 4, 6, 8] {
            out.push(task(format!("explicit-formula/f{i:02}-k{k}"), move |rng| {
                Check::from_result((|| {
                    let deg = rng.gen_range(0..=6usize);
                    let f = &F::from_z_poly(&sample::poly(rng, deg)) + &sample::nr_function(rng, 3, 2);
                    let s = DrSection::pure(f.clone(), k);
                    let lhs = theta(&s).map_err(e2s)?;
                    let rhs = DrSection::pure(delta(&f, k), k + 2).with_tp_pow(-1);
                    if lhs != rhs {
                        return Err(format!("Θ(f dτ^{k}) ≠ t_p⁻¹ δ_k(f) dτ^{}", k + 2));
                    }
                    for j in 1..=4usize {
                        let lhs = theta_iter(&s, j).map_err(e2s)?;
                        let rhs = DrSection::pure(delta_iter(&f, k, j), k + 2 * j as i64).with_tp_pow(-(j as i64));
                        if lhs != rhs {
                            return Err(format!("Θ^{j} mismatch"));
                        }
                    }
                    Ok(Check::pass(format!("deg_z {deg}, {} terms, j ≤ 4", f.num_terms())))
                })())
            }));
        }
    }
    out
}

pub(super) fn coleman() -> Vec<Task> {
    let mut out = Vec::new();
    for n in [0i64, 2, 4] {
        for i in 0..10 {
            out.push(task(format!("coleman/n{n}-f{i:02}"), move |rng| {
                Check::from_result((|| {
                    let deg = rng.gen_range(0..=8usize);
                    let f = sample::poly(rng, deg);
                    let sol = solve_primitive(&f, n).map_err(e2s)?;
                    sol.verify().map_err(e2s)?;
                    sol.check_dzstar().map_err(e2s)?;
                    for j in n / 2..=n {
                        if j >= 1 {
                            coleman::check_theta_step(&sol, j).map_err(e2s)?;
                        }
                        let e = coleman::check_theta_top(&sol, j).map_err(e2s)?;
                        if e != -j {
                            return Err(format!("t_p exponent of Θ^{}(G_{j}) is {e}, expected {}", j + 1, -j));
                        }
                        coleman::verify_h_recurrence(&sol, j).map_err(e2s)?;
                    }
                    Ok(Check::pass(format!("deg f = {deg}, κ = {}", crate::rational::q_to_string(&sol.kappa))))
                })())
            }));
        }
    }
    for n in [0i64, 2, 4, 6] {
        out.push(task(format!("coleman/kernel-n{n}"), move |_| match coleman::kernel_basis(n) {
            Ok(b) => {
                let rows: Vec<Vec<Q>> = b
                    .iter()
                    .map(|s| {
                        let c0 = s.coeff(0).to_graded_form().map(|g| g.parts[0].clone()).unwrap_or_default();
                        (0..=n as usize).map(|t| c0.coeff(t)).collect()
                    })
                    .collect();
                let r = crate::linalg::rank(&rows);
                Check::expect(r == n as usize + 1, format!("horizontal sections span dimension {r}"))
            }
            Err(e) => Check::fail(e.to_string()),
        }));
    }
    out
}

pub(super) fn ks_symplectic() -> Vec<Task> {
    vec![task("ks-symplectic/identity", |_| {
        let ks = ks_symplectic_check();
        let ok = ks.z_free && ks.residual.is_zero() && ks.specialised == one_poly();
        Check::expect(ok, format!("(dΠ/dz) J Πᵀ = {}", ks.scalar_string()))
    })]
}

fn random_quat(rng: &mut SampleRng) -> QuatElement<Q> {
    QuatElement::from_q(std::array::from_fn(|_| sample::small_q(rng)))
}

pub(super) fn quaternion() -> Vec<Task> {
    const P: u64 = 3;
    const NMINUS: u64 = 2;
    fn alg() -> Result<HashimotoAlgebra, String> {
        HashimotoAlgebra::search(P, NMINUS, 1, 500).map_err(e2s)
    }
    let mut out = vec![
        task("quaternion/structure-constants", |_| {
            Check::from_result((|| {
                let b = alg()?;
                let (i, j, k) = (
                    QuatElement::from_ints([0, 1, 0, 0]),
                    QuatElement::from_ints([0, 0, 1, 0]),
                    QuatElement::from_ints([0, 0, 0, 1]),
                );
                let ok = b.mul(&i, &i) == QuatElement::from_q([q(b.i_sq()), q(0), q(0), q(0)])
                    && b.mul(&j, &j) == QuatElement::from_q([q(b.j_sq()), q(0), q(0), q(0)])
                    && b.mul(&i, &j) == k
                    && b.mul(&j, &i) == k.scale_by(&q(-1));
                Ok(Check::expect(ok, format!("i² = {}, j² = {}, ij = -ji = k", b.i_sq(), b.j_sq())))
            })())
        }),
        task("quaternion/idempotent", |_| {
            Check::from_result((|| {
                let b = alg()?;
                let e = b.idempotent_e();
                let e2 = b.idempotent_with_sign(-1);
                let one = b.one(&QSqrt::rational(q(1), b.j_sq()));
                let ok = b.mul(&e, &e).coeff_eq(&e)
                    && b.mul(&e, &e2).is_zero()
                    && e.add(&e2).coeff_eq(&one)
                    && b.dagger(&e).coeff_eq(&e);
                Ok(Check::expect(ok, "e² = e, e e' = 0, e + e' = 1, e† = e"))
            })())
        }),
        task("quaternion/gram-symplectic", |_| {
            Check::from_result((|| {
                let b = alg()?;
                match b.find_hashimoto_a(500) {
                    Ok(a) => Ok(Check::pass(format!("Gram(η) = J for a = {a}"))),
                    Err(e) => {
                        let scale = b.gram_scale(0).map(|c| crate::rational::q_to_string(&c));
                        Err(format!("{e}; Gram(η) = c·J with c = {scale:?} for every a"))
                    }
                }
            })())
        }),
    ];
    for i in 0..50 {
        out.push(task(format!("quaternion/triple-{i:02}"), |rng| {
            Check::from_result((|| {
                let b = alg()?;
                let (d, x, y) = (random_quat(rng), random_quat(rng), random_quat(rng));
                if b.dagger(&b.dagger(&x)) != x {
                    return Err("† is not an involution".into());
                }
                if b.dagger(&b.mul(&x, &y)) != b.mul(&b.dagger(&y), &b.dagger(&x)) {
                    return Err("† is not an anti-automorphism".into());
                }
                if !b.psi0(&x, &x).eq(&q(0)) || b.psi0(&x, &y) != -b.psi0(&y, &x) {
                    return Err("ψ₀ is not alternating".into());
                }
                if b.psi0(&b.mul(&d, &x), &y) != b.psi0(&x, &b.mul(&b.dagger(&d), &y)) {
                    return Err("ψ₀(dx, y) ≠ ψ₀(x, d†y)".into());
                }
                Ok(Check::pass("ψ₀ alternating and †-compatible"))
            })())
        }));
    }
    for (p, nm) in [(3u64, 2u64), (5, 2), (3, 14)] {
        out.push(task(format!("quaternion/p0-search-{p}-{nm}"), move |_| match find_p0(p, nm, 1, 500) {
            Ok(p0) => Check::pass(format!("p0 = {p0}")),
            Err(e) => Check::fail(e.to_string()),
        }));
    }
    out
}

pub(super) fn hilbert() -> Vec<Task> {
    const SAMPLE: [i64; 8] = [1, -1, 2, -2, 3, -3, 5, -5];
    let places = [Place::Finite(2), Place::Finite(3), Place::Finite(5), Place::Infinity];
    let mut out = Vec::new();
    for place in places {
        for a in SAMPLE {
            out.push(task(format!("hilbert/sample-{place}-a{a:+}"), move |_| {
                Check::from_result((|| {
                    let h = |x: i64, y: i64| hilbert_symbol(&q(x), &q(y), place).map_err(e2s);
                    for b1 in SAMPLE {
                        if h(a, b1)? != h(b1, a)? {
                            return Err(format!("({a},{b1}) not symmetric"));
                        }
                        for b2 in SAMPLE {
                            if h(a, b1 * b2)? != h(a, b1)? * h(a, b2)? {
                                return Err(format!("({a}, {b1}·{b2}) not multiplicative"));
                            }
                        }
                    }
                    Ok(Check::pass("symmetric and bimultiplicative"))
                })())
            }));
        }
    }
    for i in 0..50 {
        out.push(task(format!("hilbert/product-{i:02}"), |rng| {
            Check::from_result((|| {
                let mut pick = || loop {
                    let x: i64 = rng.gen_range(-30..=30);
                    if x != 0 {
                        return x;
                    }
                };
                let (a, b) = (pick(), pick());
                let mut places = relevant_places(&q(a), &q(b));
                for extra in [Place::Finite(3), Place::Finite(5), Place::Finite(7)] {
                    if !places.contains(&extra) {
                        places.push(extra);
                    }
                }
                let mut prod = 1i8;
                for pl in &places {
                    prod *= hilbert_symbol(&q(a), &q(b), *pl).map_err(e2s)?;
                }
                Ok(Check::expect(prod == 1, format!("({a},{b}) over {} places: product {prod}", places.len())))
            })())
        }));
    }
    out
}

pub(super) fn graded() -> Vec<Task> {
    let mut out = Vec::new();
    for k in [2i64, 4] {
        for r in 0..=5usize {
            for i in 0..20 {
                out.push(task(format!("graded/k{k}-r{r}-{i:02}"), move |rng| {
                    Check::from_result((|| {
                        let hs: Vec<UniPoly> = (0..=r).map(|_| sample::poly(rng, 3)).collect();
                        let h = graded_compose(&hs, k);
                        let g = h.to_graded_form().map_err(e2s)?;
                        let back = graded_decompose(&g, k).map_err(e2s)?;
                        // trailing zero parts are dropped by the graded form
                        let trimmed: Vec<UniPoly> = hs[..back.len().min(hs.len())].to_vec();
                        if back != trimmed || hs[back.len()..].iter().any(|p| !p.is_zero()) {
                            return Err("decompose ∘ compose ≠ id".into());
                        }
                        let parts: Vec<UniPoly> = (0..=r).map(|_| sample::poly(rng, 3)).collect();
                        let g = GradedForm::new(parts);
                        let hs = graded_decompose(&g, k).map_err(e2s)?;
                        if graded_compose(&hs, k) != F::from_graded_form(&g) {
                            return Err("compose ∘ decompose ≠ id".into());
                        }
                        Ok(Check::pass(format!("depth {r}")))
                    })())
                }));
            }
        }
    }
    out
}

