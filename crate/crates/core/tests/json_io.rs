use maassp_core::coleman::solve_primitive;
use maassp_core::derham::{Basis, DrSection};
use maassp_core::matrix::Mat2;
use maassp_core::maass::delta;
use maassp_core::nearly_rigid::NrFunction;
use maassp_core::padic::{PadicContext, PadicScalar};
use maassp_core::poly::UniPoly;
use maassp_core::rational::{q, qf};
use maassp_core::tree::cocycle::Cochain1;
use maassp_core::tree::residue::RationalFunction;
use maassp_core::tree::vn::VnVector;
use maassp_core::tree::{BruhatTits, TreeEdge};
use maassp_core::Error;
use serde_json::json;

fn parse_path(e: Error) -> String {
    match e {
        Error::Parse { path, .. } => path,
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn delta_of_one_is_two_u() {
    let one = NrFunction::from_json(&json!({"terms": [{"z": 0, "zs": 0, "u": 0, "L": 0, "coeff": "1"}]}), "$").unwrap();
    let out = delta(&one, 2).to_json();
    assert_eq!(out, json!({"terms": [{"z": 0, "zs": 0, "u": 1, "L": 0, "coeff": "2"}]}));
}

#[test]
fn nr_function_errors_carry_field_paths() {
    let bad = json!({"terms": [{"z": 1, "zs": 0, "u": 0, "L": 0, "coeff": "1"}, {"z": -1, "coeff": "2"}]});
    assert!(parse_path(NrFunction::from_json(&bad, "$").unwrap_err()).starts_with("$.terms[1]"));
    let bad = json!({"terms": [{"z": 1, "zs": 0, "u": 0, "L": 0, "coeff": "x/2"}]});
    assert_eq!(parse_path(NrFunction::from_json(&bad, "$").unwrap_err()), "$.terms[0].coeff");
    assert_eq!(parse_path(NrFunction::from_json(&json!([1]), "$").unwrap_err()), "$.terms");
}

#[test]
fn rationals_are_decimal_strings() {
    let f = NrFunction::from_q(qf(-7, 3));
    assert_eq!(f.to_json()["terms"][0]["coeff"], json!("-7/3"));
}

#[test]
fn scalar_round_trip() {
    let ctx = PadicContext::new(5, 20).unwrap();
    let x = ctx.from_q_pair(&qf(3, 25), &q(-4));
    let v = x.to_json();
    assert_eq!(v["v"], json!(-2));
    assert_eq!(PadicScalar::from_json(&ctx, &v, "$").unwrap(), x);
    assert_eq!(PadicContext::from_json(&ctx.to_json()).unwrap(), ctx);
}

#[test]
fn section_round_trip_and_tp_consistency() {
    let s = DrSection::new(Basis::Tau, 2, -1, [(0, NrFunction::z()), (2, NrFunction::u())]).unwrap();
    let v = s.to_json();
    assert_eq!(v["basis"], json!("tau"));
    assert_eq!(v["coeffs"]["0"]["tp_pow"], json!(-1));
    assert!(DrSection::from_json(&v, "$").unwrap().same_as(&s));
    let mut bad = v.clone();
    bad["coeffs"]["2"]["tp_pow"] = json!(0);
    assert!(DrSection::from_json(&bad, "$").is_err());
    let mut bad = v;
    bad["basis"] = json!("omega");
    assert_eq!(parse_path(DrSection::from_json(&bad, "$").unwrap_err()), "$.basis");
}

#[test]
fn matrices_parse_from_both_forms() {
    let m = Mat2::from_ints(1, -2, 3, 4);
    assert_eq!(Mat2::parse("1,-2,3,4").unwrap(), m);
    assert_eq!(Mat2::parse(&m.to_json().to_string()).unwrap(), m);
    assert!(Mat2::parse("1,2,3").is_err());
}

#[test]
fn vertices_and_cochains() {
    let t = BruhatTits::new(3).unwrap();
    let v = t.vertex(2, &q(7));
    assert_eq!(v.to_json(), json!({"m": 2, "b": "7"}));
    assert_eq!(t.vertex_from_json(&v.to_json(), "$").unwrap(), v);
    let e = parse_path(t.vertex_from_json(&json!({"m": 1, "b": "1/2"}), "$.source").unwrap_err());
    assert_eq!(e, "$.source.b");
    let mut c = Cochain1::new(1);
    c.insert_alternating(TreeEdge { source: t.base(), target: t.vertex(1, &q(2)) }, VnVector(vec![q(1), qf(1, 2)]));
    assert_eq!(Cochain1::from_json(&t, &c.to_json(), "$").unwrap(), c);
}

#[test]
fn rational_function_round_trip() {
    let f = RationalFunction::polynomial(UniPoly::from_ints(&[1, 0, 2])).add(&RationalFunction::pole(qf(1, 3), 2, q(5)));
    assert_eq!(RationalFunction::from_json(&f.to_json(), "$").unwrap(), f);
}

#[test]
fn primitive_solution_json() {
    let sol = solve_primitive(&UniPoly::from_ints(&[0, 12]), 2).unwrap();
    let v = sol.to_json();
    assert_eq!(v["n"], json!(2));
    assert_eq!(v["kappa"], json!("1/2"));
}
