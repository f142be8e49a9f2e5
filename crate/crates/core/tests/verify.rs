//! Named examples of the (1,4) verification, and mutations that must fail.

use std::sync::OnceLock;

use ftmbar::exactq::{int, rat, ParamScalar, Rational};
use ftmbar::strata::Delta;
use ftmbar::verify14::*;

fn cx() -> &'static Context {
    static CX: OnceLock<Context> = OnceLock::new();
    CX.get_or_init(|| Context::new(Params::default()))
}

fn ew(e: Rational, w: Rational) -> ParamScalar {
    ParamScalar::ew(e, w)
}

#[test]
fn eta_23_row_of_first_table() {
    let (t1, _) = cx().tables().unwrap();
    let row = t1.row(0);
    for (j, x) in row.iter().enumerate() {
        let want = match j {
            5 => int(1),
            8 => int(-1),
            _ => int(0),
        };
        assert_eq!(*x, want, "column {}", j + 1);
    }
}

#[test]
fn delta_22_row_and_beta_column_of_second_table() {
    let (_, t2) = cx().tables().unwrap();
    assert_eq!(t2.get(0, 9), &int(2));
    assert_eq!(t2.get(0, 13), &int(6));
    assert_eq!((0..14).filter(|&j| *t2.get(0, j) != int(0)).count(), 2);
    let col: Vec<Rational> = t2.column(13);
    assert_eq!(col, vec![int(6), int(-2), int(3), int(-1), rat(1, 2), rat(1, 2), int(0)]);
}

#[test]
fn tables_match_golden_files_after_csv_round_trip() {
    let (t1, t2) = cx().tables().unwrap();
    let (g1, g2) = golden_matrices();
    assert_eq!(ftmbar::QMatrix::from_csv(&t1.to_csv()).unwrap(), g1);
    assert_eq!(ftmbar::QMatrix::from_csv(&t2.to_csv()).unwrap(), g2);
}

#[test]
fn corolla_value_on_delta_22() {
    let p = Params::default();
    let v = p.t[9].scale(&int(2)) + p.t[13].scale(&int(6));
    assert!(v.is_zero());
}

#[test]
fn one_edge_examples() {
    let p = Params::default();
    let rows = dhat_d_rows().unwrap();
    // λ_1: f_A(Λ_1) = 3e, f(λ_1) = −3e.
    assert_eq!(p.t[0], ew(int(-3), int(0)));
    // λ_11 ↦ ξ_1 + 4ξ_5, worth e/2.
    let f11 = p.f_d[0].clone() + p.f_d[4].scale(&int(4));
    assert_eq!(f11, ew(rat(1, 2), int(0)));
    assert_eq!(rows[0], vec![int(1), int(0), int(0), int(0), int(4)]);
    // λ_13 ↦ ξ_3 + (2/3)ξ_5, worth 0.
    let f13 = p.f_d[2].clone() + p.f_d[4].scale(&rat(2, 3));
    assert!(f13.is_zero());
}

#[test]
fn two_edge_rows() {
    let rows = two_edge_table(&Params::default()).unwrap();
    let row = |d: Delta| rows.iter().find(|r| r.delta == d).unwrap();
    let r22 = row(Delta::D22);
    assert_eq!(r22.nu[0].1, ew(int(6), int(0)));
    assert_eq!(r22.nu[1].1, ew(int(6), int(0)));
    let r04 = row(Delta::D04);
    assert_eq!(r04.nu[0].1, ew(rat(1, 2), int(0)));
    assert_eq!(r04.nu[1].1, ew(rat(1, 2), int(6)));
    let ra = row(Delta::Alpha);
    assert_eq!(ra.nu[0].1, ew(int(0), rat(-3, 2)));
    assert_eq!(ra.coefficient, ew(int(0), int(-3)));
}

#[test]
fn gravity_relation_examples() {
    use TreeSymbol::*;
    let p = Params::default();
    let v = g_d(&p, X(1, 2)) - g_d(&p, Y(3, 4)) - g_d(&p, Y(4, 5)) - g_d(&p, Y(3, 5));
    assert!(v.is_zero());
    let gs = GravitySpace::build();
    assert_eq!(gs.dim(), 9);
    // δ_02: c(e,w) − c(e,w′) = w − w′ = g_D(Y_12).
    let c = &p.massey[&Delta::D02];
    assert_eq!(c.clone() - c.swap_w(), g_d(&p, Y(1, 2)));
    assert_eq!(mu_symbols(&Delta::D22.template()).unwrap(), vec![]);
}

#[test]
fn lambda_1_plus_lambda_5_generates() {
    let mut r = vec![int(0); 14];
    r[0] = int(1);
    r[4] = int(1);
    assert_eq!(norm_functional(&r), ew(int(-6), int(0)));
    assert!(check_normlem(cx()).is_ok());
}

#[test]
fn full_report_passes() {
    let report = run_checks(cx(), &[]);
    assert!(report.all_passed(), "{}", report.render());
    assert_eq!(report.checks.len(), check_names().len());
}

#[test]
fn changing_c22_breaks_the_two_edge_row() {
    let mut p = Params::default();
    p.massey.insert(Delta::D22, ew(int(11), int(0)));
    let m = cx().with_params(p);
    let err = check_two_edge(&m).unwrap_err();
    assert!(err.contains("delta_22"), "{err}");
}

#[test]
fn changing_a_t_value_breaks_a_check() {
    for i in 0..14 {
        let mut p = Params::default();
        p.t[i] = p.t[i].clone() + ParamScalar::w();
        let m = cx().with_params(p);
        let failed = [check_corolla, check_one_edge, check_two_edge, check_normlem].iter().any(|f| f(&m).is_err());
        assert!(failed, "t_{} mutation went unnoticed", i + 1);
    }
}

#[test]
fn every_single_massey_coefficient_matters() {
    for d in Delta::ALL {
        let mut p = Params::default();
        let c = p.massey[&d].clone() + ParamScalar::e();
        p.massey.insert(d, c);
        let m = cx().with_params(p);
        assert!(check_two_edge(&m).is_err() || check_massey_table(&m).is_err(), "{}", d.name());
    }
}

#[test]
fn dropping_orientation_signs_is_detected() {
    let m = Context::new(Params { twisted: false, ..Params::default() });
    let err = check_q_relations(&m).unwrap_err();
    assert!(err.contains("eta for delta_22"), "{err}");
}
