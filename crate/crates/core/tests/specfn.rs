use hml::specfn::*;
use proptest::prelude::*;

/// Trapezoid rule on `int_0^inf exp(-x (cosh s - 1)) cosh(k s) ds`, which
/// converges geometrically for this entire, rapidly decaying integrand.
fn scaled_oracle(x: f64, k: f64) -> f64 {
    let h = 0.01;
    let mut sum = 0.5;
    let mut i = 1;
    loop {
        let s = h * i as f64;
        let v = (-x * (s.cosh() - 1.0)).exp() * (k * s).cosh();
        sum += v;
        if v < 1e-20 * sum {
            break;
        }
        i += 1;
    }
    sum * h
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn frozen_k0_at_one() {
    assert!(rel(k0(1.0).unwrap(), 0.42102443824070834) < 1e-15);
    assert!(rel(scaled_oracle(1.0, 0.0) * (-1.0f64).exp(), 0.42102443824070834) < 1e-14);
}

#[test]
fn matches_trapezoid_oracle_on_all_branches() {
    for &x in &[0.01, 0.1, 0.5, 1.0, 1.99, 2.0, 2.01, 5.0, 10.0, 24.9, 25.0, 25.1, 40.0, 100.0, 600.0] {
        let (a, b) = (scaled_oracle(x, 0.0), scaled_oracle(x, 1.0));
        let s = x.exp();
        let (v0, v1) = k0k1(x).unwrap();
        assert!(rel(v0 * s, a) < 1e-13, "K0({x}) {:?}", method_for(x));
        assert!(rel(v1 * s, b) < 1e-13, "K1({x})");
        assert!(rel(k0_scaled(x).unwrap(), a) < 1e-13, "scaled K0({x})");
    }
}

#[test]
fn branch_selection() {
    assert_eq!(method_for(SERIES_MAX), Method::Series);
    assert_eq!(method_for(3.0), Method::ContinuedFraction);
    assert_eq!(method_for(CF_MAX), Method::ContinuedFraction);
    assert_eq!(method_for(30.0), Method::Asymptotic);
    assert_eq!(k0_eval(30.0).unwrap().method, Method::Asymptotic);
}

#[test]
fn branches_agree_at_crossovers() {
    for (x, a, b) in [
        (SERIES_MAX, Method::Series, Method::ContinuedFraction),
        (CF_MAX, Method::ContinuedFraction, Method::Asymptotic),
    ] {
        let (p, q) = (k0k1_with(x, a), k0k1_with(x, b));
        assert!(rel(p.0, q.0) < 1e-14 && rel(p.1, q.1) < 1e-14, "x={x}");
    }
}

#[test]
fn independent_references_agree() {
    for &x in &[0.3, 2.5, 7.0, 18.0] {
        let q = k0_quadrature(x);
        assert!(rel(q, k0(x).unwrap()) < 1e-13);
        // the real-axis integral cancels down from O(1) partial sums
        let c = k0_cosine_integral(x).unwrap();
        assert!((c - q).abs() < 1e-13, "x={x} {c} {q}");
    }
}

#[test]
fn rejects_non_positive() {
    for x in [0.0, -1.0, f64::NAN, f64::INFINITY] {
        assert!(k0(x).is_err());
        assert!(k1(x).is_err());
    }
    assert!(k0_ode_residual(0.1, 0.1).is_err());
}

#[test]
fn small_and_large_argument_limits() {
    let x = 1e-8f64;
    let lead = -(x / 2.0).ln() - 0.5772156649015329;
    assert!(rel(k0(x).unwrap(), lead) < 1e-14);
    assert!(rel(k1(x).unwrap() * x, 1.0) < 1e-14);
    assert_eq!(k0(800.0).unwrap(), 0.0);
    let y = 800.0f64;
    let lead = (std::f64::consts::PI / (2.0 * y)).sqrt() * (1.0 - 1.0 / (8.0 * y));
    assert!(rel(k0_scaled(y).unwrap(), lead) < 1e-6);
}

proptest! {
    #[test]
    fn satisfies_bessel_ode(x in 0.5f64..40.0) {
        let y = k0(x).unwrap();
        prop_assert!(k0_ode_residual(x, 1e-3).unwrap() <= 1e-5 * (x * x * y).max(1e-300));
    }

    #[test]
    fn positive_decreasing_convex(x in 0.01f64..200.0) {
        let (a, b) = k0k1(x).unwrap();
        prop_assert!(a > 0.0 && b > a);
        let (c, _) = k0k1(x * 1.01).unwrap();
        prop_assert!(c < a);
    }

    #[test]
    fn wronskian_against_k1_derivative(x in 0.2f64..50.0) {
        // K0' = -K1
        let h = 1e-5 * x;
        let d = (k0(x + h).unwrap() - k0(x - h).unwrap()) / (2.0 * h);
        prop_assert!(rel(-d, k1(x).unwrap()) < 1e-7);
    }
}
