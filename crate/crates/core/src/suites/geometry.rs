//! Suites over the tree, CM points and p-adic sample points.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;

use super::{e2s, task, Check, SuiteConfig, Task};
use crate::cm::{aj_values, scaled_pairing_values, CmEmbedding, CmPoint};
use crate::coleman::{solve_primitive, verify_h_recurrence};
use crate::linalg::rank;
use crate::maass::{delta, weight_invariance_check};
use crate::matrix::Mat2;
use crate::nearly_rigid::NrFunction;
use crate::padic::{PadicContext, UpperHalfPoint};
use crate::rational::{q, Q};
use crate::sample::{self, SampleRng};
use crate::tree::cocycle::{
    coboundary, coboundary_rows, connecting_eps, harmonic_check, invariants_dim, Cochain0,
};
use crate::tree::residue::{residue_map_i, residue_value, RationalFunction};
use crate::tree::vn::{vn_action, VnVector};
use crate::tree::{BruhatTits, Reduction, TreeEdge, TreeVertex};

fn random_vn(rng: &mut SampleRng, n: usize) -> VnVector {
    VnVector((0..=n).map(|_| sample::small_q(rng)).collect())
}

fn random_point(rng: &mut SampleRng, ctx: &PadicContext) -> UpperHalfPoint {
    let a = sample::small_q(rng);
    let b = sample::nonzero_q(rng);
    UpperHalfPoint::new(ctx.from_q_pair(&a, &b)).expect("b ≠ 0")
}

fn random_rational_function(rng: &mut SampleRng) -> RationalFunction {
    let mut f = RationalFunction::polynomial(sample::poly(rng, 2));
    for _ in 0..rng.gen_range(1..=3) {
        let k = rng.gen_range(1..=3);
        f = f.add(&RationalFunction::pole(sample::small_q(rng), k, sample::nonzero_q(rng)));
    }
    f
}

fn ball_edges(t: &BruhatTits, center: &TreeVertex, r: u64) -> Vec<TreeEdge> {
    let ball = t.ball(center, r);
    ball.iter().flat_map(|v| t.out_edges(v)).filter(|e| ball.contains(&e.target)).collect()
}

/// A 0-cochain on `S = ∪ path(base, γ⁻¹ base)` satisfying `f(γv) = γ f(v)`
/// whenever both vertices lie in `S`. Γ must act freely on vertices.
fn equivariant_cochain(
    t: &BruhatTits,
    gens: &[Mat2],
    n: usize,
    rng: &mut SampleRng,
) -> Result<Cochain0, String> {
    let base = t.base();
    let mut moves = Vec::new();
    for g in gens {
        moves.push(g.clone());
        moves.push(g.inv().map_err(e2s)?);
    }
    let mut support = BTreeSet::new();
    for g in &moves {
        let target = t.act(g, &base).map_err(e2s)?;
        support.extend(t.path(&base, &target));
    }
    let mut f: BTreeMap<TreeVertex, VnVector> = BTreeMap::new();
    for v0 in &support {
        if f.contains_key(v0) {
            continue;
        }
        f.insert(v0.clone(), random_vn(rng, n));
        let mut queue = VecDeque::from([v0.clone()]);
        while let Some(v) = queue.pop_front() {
            for g in &moves {
                let w = t.act(g, &v).map_err(e2s)?;
                if !support.contains(&w) {
                    continue;
                }
                let fw = vn_action(&f[&v], g).map_err(e2s)?;
                match f.get(&w) {
                    Some(old) if *old != fw => return Err(format!("{w:?} has a nontrivial stabiliser")),
                    Some(_) => {}
                    None => {
                        f.insert(w.clone(), fw);
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    Ok(Cochain0 { n, values: f })
}

pub(super) fn tree(cfg: &SuiteConfig) -> Vec<Task> {
    let cfg = *cfg;
    let mut out = Vec::new();
    for p in [2u64, 3, 5] {
        out.push(task(format!("tree/neighbors-p{p}"), move |_| {
            Check::from_result((|| {
                let t = BruhatTits::new(p).map_err(e2s)?;
                let verts = t.ball(&t.base(), 2);
                for v in &verts {
                    let nb = t.neighbors(v);
                    let distinct: BTreeSet<_> = nb.iter().collect();
                    if nb.len() != p as usize + 1 || distinct.len() != nb.len() {
                        return Err(format!("{v:?} has {} neighbours", nb.len()));
                    }
                    if nb.iter().any(|w| !t.neighbors(w).contains(v) || t.distance(v, w) != 1) {
                        return Err(format!("adjacency is not symmetric at {v:?}"));
                    }
                }
                Ok(Check::pass(format!("{} vertices, p + 1 neighbours each", verts.len())))
            })())
        }));
    }
    for i in 0..10 {
        out.push(task(format!("tree/reduce-equivariant-{i:02}"), move |rng| {
            Check::from_result((|| {
                let ctx = PadicContext::new(cfg.p, cfg.prec.max(10)).map_err(e2s)?;
                let t = BruhatTits::new(cfg.p).map_err(e2s)?;
                let z = random_point(rng, &ctx);
                let Reduction::Vertex(v) = t.reduce_point(&z).map_err(e2s)? else {
                    return Err("point reduced to an edge".into());
                };
                for _ in 0..3 {
                    let g = sample::invertible_matrix(rng, 6);
                    let gz = g.mobius(z.z()).map_err(e2s)?;
                    let gz = UpperHalfPoint::new(gz).map_err(e2s)?;
                    let lhs = t.reduce_point(&gz).map_err(e2s)?;
                    let rhs = Reduction::Vertex(t.act(&g, &v).map_err(e2s)?);
                    if lhs != rhs {
                        return Err(format!("red(γz) ≠ γ red(z) for γ = {g:?}"));
                    }
                }
                Ok(Check::pass(format!("red(z) = {v:?}")))
            })())
        }));
    }
    for n in 0..=3usize {
        out.push(task(format!("tree/coboundary-constant-n{n}"), move |rng| {
            let t = BruhatTits::new(cfg.p).expect("prime");
            let verts = t.ball(&t.base(), 2);
            let c = coboundary(&t, &Cochain0::constant(n, &verts, &random_vn(rng, n)));
            Check::expect(!c.values.is_empty() && c.is_zero(), format!("δ(const) on {} edges", c.values.len()))
        }));
    }
    for n in 0..=3usize {
        out.push(task(format!("tree/eps-of-coboundary-n{n}"), move |rng| {
            Check::from_result((|| {
                let p = cfg.p as i64;
                let t = BruhatTits::new(cfg.p).map_err(e2s)?;
                // axes 0–∞ and 1–(1+p) are disjoint, so the group is Schottky
                let g1 = Mat2::from_ints(p, 0, 0, 1);
                let a = Mat2::from_ints(1 + p, 1, 1, 1);
                let g2 = &(&a * &g1) * &a.inv().map_err(e2s)?;
                let gens = [g1, g2];
                let f = equivariant_cochain(&t, &gens, n, rng)?;
                let c = coboundary(&t, &f);
                let eps = connecting_eps(&t, &c, &gens, &t.base()).map_err(e2s)?;
                Ok(Check::expect(eps.is_zero(), format!("ε(δf) = {:?}", eps.reduced)))
            })())
        }));
    }
    for i in 0..5 {
        out.push(task(format!("tree/coboundary-rank-{i}"), move |rng| {
            Check::from_result((|| {
                let n = rng.gen_range(0..=4usize);
                let gens: Vec<Mat2> = (0..rng.gen_range(1..=3)).map(|_| sample::invertible_matrix(rng, 5)).collect();
                let r = rank(&coboundary_rows(&gens, n).map_err(e2s)?);
                let inv = invariants_dim(&gens, n).map_err(e2s)?;
                Ok(Check::expect(r + inv == n + 1, format!("n = {n}: rank {r}, invariants {inv}")))
            })())
        }));
    }
    for i in 0..5 {
        out.push(task(format!("tree/harmonic-{i}"), move |rng| {
            Check::from_result((|| {
                let t = BruhatTits::new(cfg.p).map_err(e2s)?;
                let n = rng.gen_range(0..=3usize);
                let f = random_rational_function(rng);
                let mut c = residue_map_i(&t, &f, n, &ball_edges(&t, &t.base(), 2));
                let h = harmonic_check(&t, &c);
                if !h.is_harmonic() || h.interior_vertices == 0 {
                    return Err(format!("residue cocycle rejected: {h:?}"));
                }
                let e = TreeEdge { source: t.base(), target: t.neighbors(&t.base())[0].clone() };
                let bumped = c.get(&e).cloned().unwrap_or_else(|| VnVector::zero(n));
                let mut one = VnVector::zero(n);
                one.0[0] = q(1);
                c.insert_alternating(e, &bumped + &one);
                let h = harmonic_check(&t, &c);
                Ok(Check::expect(!h.is_harmonic(), "perturbed cocycle is rejected"))
            })())
        }));
    }
    out.push(task("tree/residue-dz-over-z", move |_| {
        Check::from_result((|| {
            let t = BruhatTits::new(cfg.p).map_err(e2s)?;
            let f = RationalFunction::pole(q(0), 1, q(1));
            for m in -5..5 {
                let e = TreeEdge { source: t.vertex(m, &q(0)), target: t.vertex(m + 1, &q(0)) };
                let one = VnVector(vec![q(1)]);
                if residue_value(&t, &f, 0, &e) != one || residue_value(&t, &f, 0, &e.reversed()) != -&one {
                    return Err(format!("I(dz/z) ≠ ±1 on {e:?}"));
                }
            }
            for e in ball_edges(&t, &t.vertex(1, &q(1)), 1) {
                if !residue_value(&t, &f, 0, &e).is_zero() {
                    return Err(format!("I(dz/z) ≠ 0 off the geodesic at {e:?}"));
                }
            }
            Ok(Check::pass("±1 along 0–∞, 0 elsewhere"))
        })())
    }));
    for i in 0..5 {
        out.push(task(format!("tree/residue-exact-{i}"), move |rng| {
            Check::from_result((|| {
                let t = BruhatTits::new(cfg.p).map_err(e2s)?;
                let n = rng.gen_range(0..=3usize);
                let r = random_rational_function(rng);
                let f = r.nth_derivative(n + 1);
                let c = residue_map_i(&t, &f, n, &ball_edges(&t, &t.base(), 2));
                Ok(Check::expect(c.is_zero(), format!("I(R^({})) on {} edges", n + 1, c.values.len())))
            })())
        }));
    }
    out
}

/// `[[a, b], [c, -a]]` with `M² = d_K`, `d_K ≡ d (mod p)` a non-residue unit.
fn random_embedding(rng: &mut SampleRng, ctx: &PadicContext) -> Result<CmEmbedding, String> {
    let p = ctx.p as i64;
    let dk = ctx.d + p * rng.gen_range(0..=6i64);
    let a = rng.gen_range(-5..=5i64);
    let rest = dk - a * a;
    let divisors: Vec<i64> = (1..=rest.abs()).filter(|c| rest % c == 0).collect();
    let c = divisors[rng.gen_range(0..divisors.len())] * if rng.gen_bool(0.5) { 1 } else { -1 };
    CmEmbedding::new(Mat2::from_ints(a, rest / c, c, -a), ctx.p).map_err(e2s)
}

pub(super) fn cm(cfg: &SuiteConfig) -> Vec<Task> {
    let prec = cfg.prec;
    let mut out = Vec::new();
    for p in [5u64, 7] {
        for i in 0..5 {
            out.push(task(format!("cm/p{p}-fixed-point-{i}"), move |rng| {
                Check::from_result((|| {
                    let ctx = PadicContext::new(p, prec).map_err(e2s)?;
                    let e = random_embedding(rng, &ctx)?;
                    let pt = CmPoint::fixed_point(&e, &ctx).map_err(e2s)?;
                    let res = pt.eigen_residual();
                    if !res.is_zero() {
                        return Err(format!("eigen-equation residual has valuation {:?}", res.valuation()));
                    }
                    let sz = pt.conjugate_fixed_point().map_err(e2s)?;
                    let diff = &sz - &pt.z0.conj();
                    Ok(Check::expect(diff.is_zero(), format!("M = {:?}", e.m)).with_valuation(diff.valuation()))
                })())
            }));
        }
        for i in 0..3 {
            for n in [2i64, 4] {
                out.push(task(format!("cm/p{p}-aj-n{n}-{i}"), move |rng| {
                    Check::from_result((|| {
                        let ctx = PadicContext::new(p, prec).map_err(e2s)?;
                        let e = random_embedding(rng, &ctx)?;
                        let pt = CmPoint::fixed_point(&e, &ctx).map_err(e2s)?;
                        let deg = rng.gen_range(0..=4);
                        let f = sample::poly(rng, deg);
                        let sol = solve_primitive(&f, n).map_err(e2s)?;
                        for j in n / 2..=n {
                            verify_h_recurrence(&sol, j).map_err(e2s)?;
                        }
                        let rows = aj_values(&sol, &pt, None).map_err(e2s)?;
                        if let Some(r) = rows.iter().find(|r| !r.consistent) {
                            let v = (&r.delta_h_n - &(&ctx.from_q(&r.factor) * &r.h_j)).valuation();
                            return Ok(Check::fail(format!("row j = {} inconsistent", r.j)).with_valuation(v));
                        }
                        let d: Q = sample::nonzero_q(rng);
                        let base = scaled_pairing_values(&sol, &pt, &q(1)).map_err(e2s)?;
                        let scaled = scaled_pairing_values(&sol, &pt, &d).map_err(e2s)?;
                        for ((j, a), (_, b)) in base.iter().zip(&scaled) {
                            let expect = &ctx.from_q(&num_traits::pow(d.clone(), *j as usize)) * a;
                            if *b != expect {
                                return Err(format!("pairing at j = {j} does not scale by d^j"));
                            }
                        }
                        Ok(Check::pass(format!("{} rows at {:?}", rows.len(), e.m)))
                    })())
                }));
            }
        }
    }
    out
}

fn sample_points(rng: &mut SampleRng, ctx: &PadicContext, count: usize) -> Vec<UpperHalfPoint> {
    (0..count).map(|_| random_point(rng, ctx)).collect()
}

fn invariance_check(f: &NrFunction, k: i64, gammas: &[Mat2], pts: &[UpperHalfPoint]) -> Result<Check, String> {
    for (g, weight) in [(f.clone(), k), (delta(f, k), k + 2)] {
        let r = weight_invariance_check(&g, weight, gammas, pts).map_err(e2s)?;
        if !r.passed() {
            return Ok(Check::fail(format!("weight {weight} law fails")).with_valuation(r.worst_valuation));
        }
    }
    Ok(Check::pass(format!("weights {k} and {} on {} points", k + 2, pts.len())))
}

pub(super) fn invariance(cfg: &SuiteConfig) -> Vec<Task> {
    let cfg = *cfg;
    let mut out = Vec::new();
    for k in [0i64, 2, 4] {
        for i in 0..5 {
            out.push(task(format!("invariance/unipotent-k{k}-{i}"), move |rng| {
                Check::from_result((|| {
                    let ctx = PadicContext::new(cfg.p, cfg.prec).map_err(e2s)?;
                    let p = Q::from_integer(cfg.p.into());
                    let mut f = NrFunction::zero();
                    for e in 0..=rng.gen_range(0..=3u32) {
                        f = &f + &NrFunction::u().pow(e, &q(1)).scale(&sample::small_q(rng));
                    }
                    let t = sample::nonzero_q(rng);
                    let gammas = [
                        Mat2::new(q(1), t.clone(), q(0), q(1)),
                        Mat2::new(q(1), &t * &p, q(0), q(1)),
                        Mat2::new(q(1), &t / &p, q(0), q(1)),
                    ];
                    invariance_check(&f, k, &gammas, &sample_points(rng, &ctx, 5))
                })())
            }));
        }
    }
    for n in 0..=4u32 {
        out.push(task(format!("invariance/lower-z{n}"), move |rng| {
            Check::from_result((|| {
                let ctx = PadicContext::new(cfg.p, cfg.prec).map_err(e2s)?;
                let p = Q::from_integer(cfg.p.into());
                let c = sample::nonzero_q(rng);
                let gammas = [Mat2::new(q(1), q(0), c.clone(), q(1)), Mat2::new(q(1), q(0), &c * &p, q(1))];
                let f = NrFunction::z().pow(n, &q(1));
                invariance_check(&f, -(n as i64), &gammas, &sample_points(rng, &ctx, 5))
            })())
        }));
    }
    out
}
