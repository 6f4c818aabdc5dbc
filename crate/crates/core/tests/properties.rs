use maassp_core::coleman::solve_primitive;
use maassp_core::derham::{self, gm_connection, hodge_split, sym_pairing, Basis, DrSection};
use maassp_core::hilbert::{hilbert_symbol, relevant_places};
use maassp_core::maass::{delta, delta_iter, graded_compose, graded_decompose_nr};
use maassp_core::matrix::Mat2;
use maassp_core::nearly_rigid::{GradedForm, NrFunction};
use maassp_core::padic::{PadicContext, UpperHalfPoint};
use maassp_core::rational::q;
use maassp_core::sample::{self, rng_for, SampleRng};
use maassp_core::tree::vn::{pn_action, vn_action, VnVector};
use maassp_core::tree::BruhatTits;
use proptest::prelude::*;
use rand::Rng;

fn rng(seed: u64) -> SampleRng {
    rng_for(seed, 0)
}

fn section(rng: &mut SampleRng, n: i64, basis: Basis) -> DrSection {
    let coeffs: Vec<_> = (0..=n).map(|a| (a, sample::nr_function(rng, 3, 2))).collect();
    DrSection::new(basis, n, 0, coeffs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn derivations_commute(seed in any::<u64>()) {
        let f = sample::nr_function_with_log(&mut rng(seed), 5, 3);
        prop_assert_eq!(f.d_dz().d_dzstar(), f.d_dzstar().d_dz());
    }

    #[test]
    fn leibniz_rule(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = sample::nr_function_with_log(&mut r, 4, 2);
        let g = sample::nr_function_with_log(&mut r, 4, 2);
        let fg = &f * &g;
        prop_assert_eq!(fg.d_dz(), &(&f.d_dz() * &g) + &(&f * &g.d_dz()));
        prop_assert_eq!(fg.d_dzstar(), &(&f.d_dzstar() * &g) + &(&f * &g.d_dzstar()));
    }

    #[test]
    fn external_form_round_trip(seed in any::<u64>()) {
        let f = sample::nr_function_with_log(&mut rng(seed), 6, 3);
        prop_assert_eq!(NrFunction::from_external(&f.to_external()), f.clone());
        prop_assert_eq!(NrFunction::from_json(&f.to_json(), "$").unwrap(), f);
    }

    #[test]
    fn graded_form_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let depth = r.gen_range(0..=4usize);
        let g = GradedForm::new((0..=depth).map(|_| sample::poly(&mut r, 4)).collect());
        let f = NrFunction::from_graded_form(&g);
        prop_assert_eq!(f.to_graded_form().unwrap(), g.clone());
        prop_assert_eq!(GradedForm::from_json(&g.to_json(), "$").unwrap(), g);
    }

    #[test]
    fn evaluation_is_a_ring_map(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ctx = PadicContext::new(5, 20).unwrap();
        let z = UpperHalfPoint::new(ctx.from_q_pair(&sample::small_q(&mut r), &sample::nonzero_q(&mut r))).unwrap();
        let f = sample::nr_function(&mut r, 3, 2);
        let g = sample::nr_function(&mut r, 3, 2);
        let (fz, gz) = (f.evaluate(&z, None).unwrap(), g.evaluate(&z, None).unwrap());
        prop_assert_eq!((&f * &g).evaluate(&z, None).unwrap(), &fz * &gz);
        prop_assert_eq!((&f + &g).evaluate(&z, None).unwrap(), &fz + &gz);
    }

    #[test]
    fn delta_raises_u_degree_by_at_most_one(seed in any::<u64>(), k in -4i64..8) {
        let f = sample::nr_function(&mut rng(seed), 5, 3);
        prop_assert!(delta(&f, k).u_degree() <= f.u_degree() + 1);
    }

    #[test]
    fn weighted_leibniz(seed in any::<u64>(), k in -4i64..8, l in -4i64..8) {
        let mut r = rng(seed);
        let f = sample::nr_function(&mut r, 3, 2);
        let g = sample::nr_function(&mut r, 3, 2);
        prop_assert_eq!(delta(&(&f * &g), k + l), &(&delta(&f, k) * &g) + &(&f * &delta(&g, l)));
    }

    #[test]
    fn iterates_compose(seed in any::<u64>(), k in -4i64..8, i in 0usize..4, j in 0usize..4) {
        let f = sample::nr_function(&mut rng(seed), 3, 2);
        let lhs = delta_iter(&delta_iter(&f, k, i), k + 2 * i as i64, j);
        prop_assert_eq!(lhs, delta_iter(&f, k, i + j));
    }

    #[test]
    fn graded_decomposition_of_random_tuple(seed in any::<u64>(), k in prop::sample::select(vec![2i64, 4, 6])) {
        let mut r = rng(seed);
        let depth = r.gen_range(0..=4usize);
        let hs: Vec<_> = (0..=depth).map(|_| sample::poly(&mut r, 3)).collect();
        let back = graded_decompose_nr(&graded_compose(&hs, k), k).unwrap();
        prop_assert_eq!(graded_compose(&back, k), graded_compose(&hs, k));
    }

    #[test]
    fn connection_leibniz(seed in any::<u64>(), n in 0i64..4) {
        let mut r = rng(seed);
        let f = sample::nr_function(&mut r, 3, 2);
        let s = section(&mut r, n, Basis::Tau);
        let lhs = gm_connection(&s.scale(&f)).unwrap();
        let ns = gm_connection(&s).unwrap();
        let dz = s.scale(&f.d_dz()).add(&ns.dz.scale(&f)).unwrap();
        let dzs = s.scale(&f.d_dzstar()).add(&ns.dzs.scale(&f)).unwrap();
        prop_assert!(lhs.dz.same_as(&dz));
        prop_assert!(lhs.dzs.same_as(&dzs));
    }

    #[test]
    fn connection_is_frame_independent(seed in any::<u64>(), n in 0i64..4) {
        let mut r = rng(seed);
        let s = section(&mut r, n, Basis::DxDy);
        let a = gm_connection(&s).unwrap();
        let b = gm_connection(&derham::basis_convert(&s, Basis::Canonical).unwrap()).unwrap();
        prop_assert!(a.same_as(&b));
    }

    #[test]
    fn pairing_is_horizontal(seed in any::<u64>(), n in prop::sample::select(vec![0i64, 2, 4])) {
        let mut r = rng(seed);
        let s = section(&mut r, n, Basis::Canonical);
        let t = section(&mut r, n, Basis::Canonical);
        let d = sym_pairing(&s, &t).unwrap();
        let (ns, nt) = (gm_connection(&s).unwrap(), gm_connection(&t).unwrap());
        let rhs = &sym_pairing(&ns.dz, &t).unwrap() + &sym_pairing(&s, &nt.dz).unwrap();
        prop_assert_eq!(d.d_dz(), rhs);
        let rhs = &sym_pairing(&ns.dzs, &t).unwrap() + &sym_pairing(&s, &nt.dzs).unwrap();
        prop_assert_eq!(d.d_dzstar(), rhs);
    }

    #[test]
    fn hodge_split_is_idempotent(seed in any::<u64>(), n in 0i64..5) {
        let mut r = rng(seed);
        let s = section(&mut r, n, Basis::Canonical);
        let ps = hodge_split(&s).unwrap();
        prop_assert!(ps.is_pure());
        prop_assert_eq!(hodge_split(&ps).unwrap(), ps);
    }

    #[test]
    fn primitive_solves_the_equation(seed in any::<u64>(), n in prop::sample::select(vec![0i64, 2, 4, 6])) {
        let mut r = rng(seed);
        let deg = r.gen_range(0..=6);
        let sol = solve_primitive(&sample::poly(&mut r, deg), n).unwrap();
        prop_assert!(sol.verify().is_ok());
    }

    #[test]
    fn frobenius_is_a_field_automorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ctx = PadicContext::new(7, 15).unwrap();
        let x = ctx.from_q_pair(&sample::small_q(&mut r), &sample::small_q(&mut r));
        let y = ctx.from_q_pair(&sample::small_q(&mut r), &sample::small_q(&mut r));
        prop_assert_eq!((&x * &y).frobenius(), &x.frobenius() * &y.frobenius());
        prop_assert_eq!((&x + &y).frobenius(), &x.frobenius() + &y.frobenius());
        prop_assert_eq!(x.frobenius().frobenius(), x.clone());
        prop_assert!((&x * &x.frobenius()).is_in_qp());
    }

    #[test]
    fn hilbert_product_formula(a in -60i64..60, b in -60i64..60) {
        prop_assume!(a != 0 && b != 0);
        let prod: i8 = relevant_places(&q(a), &q(b))
            .into_iter()
            .map(|pl| hilbert_symbol(&q(a), &q(b), pl).unwrap())
            .product();
        prop_assert_eq!(prod, 1);
    }

    #[test]
    fn vn_duality_and_action(seed in any::<u64>(), n in 0usize..5) {
        let mut r = rng(seed);
        let a = sample::invertible_matrix(&mut r, 6);
        let b = sample::invertible_matrix(&mut r, 6);
        let phi = VnVector((0..=n).map(|_| sample::small_q(&mut r)).collect());
        let poly: Vec<_> = (0..=n).map(|_| sample::small_q(&mut r)).collect();
        prop_assert_eq!(vn_action(&phi, &a).unwrap().apply(&poly), phi.apply(&pn_action(&poly, &a, n).unwrap()));
        let ab = &a * &b;
        prop_assert_eq!(vn_action(&vn_action(&phi, &b).unwrap(), &a).unwrap(), vn_action(&phi, &ab).unwrap());
    }

    #[test]
    fn tree_metric(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3, 5])) {
        let mut r = rng(seed);
        let t = BruhatTits::new(p).unwrap();
        let ball = t.ball(&t.base(), 3);
        let pick = |r: &mut SampleRng| ball[r.gen_range(0..ball.len())].clone();
        let (x, y, z) = (pick(&mut r), pick(&mut r), pick(&mut r));
        prop_assert_eq!(t.distance(&x, &y), t.distance(&y, &x));
        prop_assert!(t.distance(&x, &z) <= t.distance(&x, &y) + t.distance(&y, &z));
        prop_assert_eq!(t.distance(&x, &x), 0);
        let g = sample::invertible_matrix(&mut r, 6);
        prop_assert_eq!(t.distance(&t.act(&g, &x).unwrap(), &t.act(&g, &y).unwrap()), t.distance(&x, &y));
    }

    #[test]
    fn matrix_inverse(seed in any::<u64>()) {
        let g = sample::invertible_matrix(&mut rng(seed), 9);
        prop_assert!((&g * &g.inv().unwrap()).is_identity());
        prop_assert_eq!(Mat2::parse(&g.to_json().to_string()).unwrap(), g);
    }
}
