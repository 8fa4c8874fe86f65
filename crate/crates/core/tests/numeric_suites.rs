//! Numeric suites across the q-series, periods and group modules.

use hof_core::periods::{self, Workbench};

#[test]
fn modularity_and_cocycles_at_200_terms() {
    let wb = Workbench::level11(200);
    for (t, tol) in [(1, 1e-10), (2, 1e-8), (3, 1e-6)] {
        let r = periods::verify_numeric_cocycle(&wb, t, 10, 42, tol).unwrap();
        assert!(r.passed, "{}", r.to_text());
        assert_eq!(r.cases.iter().filter(|c| c.case.contains("trial")).count() >= 10, true);
    }
}

#[test]
fn residuals_do_not_worsen_with_more_terms() {
    let small = Workbench::level11(100);
    let large = Workbench::level11(200);
    for t in 1..=2 {
        let a = periods::verify_numeric_cocycle(&small, t, 10, 7, 1e-6).unwrap();
        let b = periods::verify_numeric_cocycle(&large, t, 10, 7, 1e-6).unwrap();
        let (ra, rb) = (a.max_residual.unwrap(), b.max_residual.unwrap());
        assert!(rb <= ra.max(1e-14) * 10.0, "t={t}: {rb:e} after {ra:e}");
    }
}

#[test]
fn annihilation_by_two_factors() {
    let wb = Workbench::level11(200);
    let r = periods::verify_annihilation(&wb, 2, 10, 42, 1e-8).unwrap();
    assert!(r.passed, "{}", r.to_text());
}

#[test]
fn annihilation_by_three_factors_with_full_file() {
    let wb = Workbench::level11(1000);
    let r = periods::verify_annihilation(&wb, 3, 10, 42, 1e-6).unwrap();
    assert!(r.passed, "{}", r.to_text());
}

#[test]
fn period_structure_over_words() {
    let wb = Workbench::level11(1000);
    let r = periods::verify_period_structure(&wb, 20, 42, 1e-9, 100).unwrap();
    assert!(r.passed, "{}", r.to_text());
}

#[test]
fn growth_and_boundedness() {
    let wb = Workbench::level11(200);
    for v in [vec![1], vec![1, 1], vec![1, 1, 1]] {
        let r = periods::growth_probe(&wb, &v, 4, 42).unwrap();
        assert!(r.passed, "{}", r.to_text());
    }
    let r = periods::boundedness_probe(&wb, 14, 42).unwrap();
    assert!(r.passed, "{}", r.to_text());
}

#[test]
fn reports_are_deterministic() {
    let wb = Workbench::level11(200);
    let a = periods::verify_numeric_cocycle(&wb, 2, 5, 3, 1e-8).unwrap().to_json();
    let b = periods::verify_numeric_cocycle(&Workbench::level11(200), 2, 5, 3, 1e-8).unwrap().to_json();
    assert_eq!(a, b);
}
