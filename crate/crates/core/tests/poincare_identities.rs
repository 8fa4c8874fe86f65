//! Truncated Poincaré series identities on Γ₀(11).

use hof_core::poincare::{CheckParams, Identity, Lab, SeriesSpec};
use num_complex::Complex64;

fn params(s: f64, k: i32, m: u32) -> CheckParams {
    CheckParams { s: Complex64::new(s, 0.0), k, m, c_max: 200.0, tol: 1e-4 }
}

#[test]
fn lowering_with_m_zero() {
    let r = Lab::level11().check_identity(Identity::Eq3_7, params(3.0, 2, 0)).unwrap();
    assert!(r.passed && r.max_residual.unwrap() <= 1e-4, "{}", r.to_text());
}

#[test]
fn raising_for_both_m() {
    let lab = Lab::level11();
    for m in [0, 1] {
        let r = lab.check_identity(Identity::Eq3_6, params(2.0, 0, m)).unwrap();
        assert!(r.passed, "{}", r.to_text());
    }
}

#[test]
fn first_raising_of_eisenstein() {
    let r = Lab::level11().check_identity(Identity::RnE, params(2.5, 0, 0)).unwrap();
    assert!(r.passed, "{}", r.to_text());
}

#[test]
fn single_term_identities_at_complex_s() {
    let p = CheckParams { s: Complex64::new(2.0, 3.0), ..params(2.0, 4, 1) };
    let r = Lab::level11().check_identity(Identity::Eq3_1, p).unwrap();
    assert!(r.passed, "{}", r.to_text());
}

#[test]
fn constant_term_form() {
    let r = Lab::level11().check_identity(Identity::Eq3_2, params(2.0, 0, 0)).unwrap();
    assert!(r.passed, "{}", r.to_text());
}

#[test]
fn failing_tolerance_gives_failing_report() {
    let p = CheckParams { tol: 1e-18, ..params(3.0, 2, 1) };
    let r = Lab::level11().check_identity(Identity::Eq3_7, p).unwrap();
    assert!(!r.passed && !r.failures.is_empty());
}

#[test]
fn eisenstein_is_u_with_m_zero() {
    let lab = Lab::level11();
    let z = Complex64::new(0.3, 0.9);
    let s = Complex64::new(2.2, 0.4);
    let (e, _) = lab.eval_series(&SeriesSpec::eisenstein(1, s, 120.0), z).unwrap();
    let (u, _) = lab.eval_series(&SeriesSpec::u(1, 0, s, 0, 120.0), z).unwrap();
    assert_eq!(e, u);
}
