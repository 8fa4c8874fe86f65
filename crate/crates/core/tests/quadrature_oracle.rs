//! Iterated integrals checked against direct Gauss–Legendre quadrature along
//! vertical paths: ∫_{i∞}^z F = −i ∫_0^∞ F(z + is) ds.

use hof_core::periods::Workbench;
use hof_core::qseries::CoeffFile;
use num_complex::Complex64;

/// Nodes and weights of the n-point rule on [−1, 1] by Newton iteration.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// −i ∫_0^L g(z + is) ds on panels of width `panel`.
fn vertical<G: Fn(Complex64) -> Complex64>(g: G, z: Complex64, len: f64, panel: f64, rule: &[(f64, f64)]) -> Complex64 {
    let panels = (len / panel).ceil() as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let (a, b) = (p as f64 * panel, (p as f64 + 1.0) * panel);
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        for &(x, w) in rule {
            acc += w * half * g(z + Complex64::new(0.0, mid + half * x));
        }
    }
    -Complex64::i() * acc
}

fn newform() -> impl Fn(Complex64) -> Complex64 {
    let f = CoeffFile::level11().to_qseries(Some(200));
    move |z| f.evaluate_direct(z)
}

#[test]
fn order_one_antiderivative() {
    let wb = Workbench::level11(200);
    let form = wb.form(&[1]).unwrap();
    let rule = gauss_legendre(24);
    let f = newform();
    for z in [Complex64::new(0.1, 0.3), Complex64::new(-0.37, 0.12), Complex64::new(0.45, 0.05)] {
        let oracle = vertical(&f, z, 8.0, 0.25, &rule);
        let got = form.eval_a(z).unwrap().value;
        assert!((got - oracle).norm() < 1e-10, "z={z}: {got} vs {oracle}");
    }
}

#[test]
fn order_two_and_three_antiderivatives() {
    let wb = Workbench::level11(200);
    let rule = gauss_legendre(16);
    let f = newform();
    let a1 = |w: Complex64| vertical(&f, w, 8.0, 0.5, &rule);
    let f11 = |w: Complex64| f(w) * a1(w);
    for z in [Complex64::new(0.1, 0.3), Complex64::new(-0.2, 0.15)] {
        let oracle = vertical(f11, z, 8.0, 0.5, &rule);
        let got = wb.form(&[1, 1]).unwrap().eval_a(z).unwrap().value;
        assert!((got - oracle).norm() < 1e-8, "F11 at z={z}: {got} vs {oracle}");
    }
    // One more level, with the inner two integrals from the series.
    let a11 = wb.form(&[1, 1]).unwrap();
    let f111 = |w: Complex64| f(w) * a11.eval_a(w).unwrap().value;
    let z = Complex64::new(0.05, 0.2);
    let oracle = vertical(f111, z, 8.0, 0.25, &rule);
    let got = wb.form(&[1, 1, 1]).unwrap().eval_a(z).unwrap().value;
    assert!((got - oracle).norm() < 1e-8, "F111: {got} vs {oracle}");
}

#[test]
fn rule_integrates_polynomials() {
    let rule = gauss_legendre(10);
    let integral: f64 = rule.iter().map(|&(x, w)| w * x.powi(18)).sum();
    assert!((integral - 2.0 / 19.0).abs() < 1e-14);
}
