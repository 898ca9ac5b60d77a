use hml::defalg::{max_abs, CMat, FormType, MatrixPolyField};
use hml::localmodel::*;
use hml::painleve::{solve_u1, RadialProfile};
use hml::poly::HolomorphicPoly;
use hml::C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn u1() -> &'static RadialProfile {
    static U: OnceLock<RadialProfile> = OnceLock::new();
    U.get_or_init(|| solve_u1(1e-4, 12.0, 4000).unwrap())
}

fn model(t: f64) -> LocalModel {
    LocalModel::new(u1(), t, Cutoff::default()).unwrap()
}

/// A deformation gauge-equivalent to `[[0, Pdot], [0, 0]] dz`:
/// `eta = -dbar g`, `phidot = [[0, Pdot], [0, 0]] - [phi, g]`.
fn gauged_deformation(seed: u64, pdot: &HolomorphicPoly) -> (MatrixPolyField, MatrixPolyField) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = MatrixPolyField::random_sl(&mut rng, 2, 3, FormType::Scalar);
    let eta = g.d_zbar().scale(C64::new(-1.0, 0.0)).with_form(FormType::Form01);
    let pd = phi_dot_field(pdot).sub(&phi_field().bracket(&g).with_form(FormType::Form10));
    (eta, pd)
}

#[test]
fn cutoff_shape() {
    let c = Cutoff::default();
    assert_eq!(c.eval(0.1), (1.0, 0.0));
    assert_eq!(c.eval(1.0), (0.0, 0.0));
    let mut prev = 1.0;
    for k in 1..100 {
        let r = 0.25 + 0.75 * k as f64 / 100.0;
        let (v, d) = c.eval(r);
        assert!(v < prev && d < 0.0);
        let h = 1e-6;
        let fd = (c.eval(r + h).0 - c.eval(r - h).0) / (2.0 * h);
        assert!((fd - d).abs() < 1e-6 * d.abs().max(1.0));
        prev = v;
    }
    assert!(Cutoff::new(1.0, 0.5).is_err());
    assert!(Cutoff::new(0.0, 1.0).is_err());
}

#[test]
fn weights_by_metric() {
    let m = model(4.0);
    for &r in &[0.05, 0.25, 0.5, 0.9, 1.0, 1.5] {
        let (u, du) = m.u_at(r).unwrap();
        assert_eq!(m.weight(Which::Inf, r).unwrap(), (0.0, 0.0));
        assert_eq!(m.weight(Which::Model, r).unwrap(), (u, du));
        let (c, dc) = m.cutoff.eval(r);
        let (w, dw) = m.weight(Which::App, r).unwrap();
        assert!((w - u * c).abs() < 1e-15 && (dw - (du * c + u * dc)).abs() < 1e-12);
        assert!((m.rho(Which::Model, r).unwrap() - (-2.0 * u).exp() / r).abs() < 1e-12 * (1.0 / r));
    }
    assert!(m.weight(Which::Model, 0.0).is_err());
}

#[test]
fn model_profile_follows_rescaling() {
    let m = model(8.0);
    let (a, _) = m.u_at(0.5).unwrap();
    let (b, _) = u1().eval(0.5 * 8.0f64.powf(2.0 / 3.0)).unwrap();
    assert!((a - b).abs() < 1e-13);
}

#[test]
fn f_x_modes_match_pointwise_formula() {
    let m = model(4.0);
    for n in 0..3 {
        let mut c = vec![C64::new(0.0, 0.0); n + 1];
        c[n] = C64::new(1.0, 0.0);
        let p = HolomorphicPoly::new(c);
        for &(r, th) in &[(0.3, 0.4), (0.7, 2.0), (1.0, -1.0)] {
            let z = C64::from_polar(r, th);
            let full = m.f_x(&p, z).unwrap();
            let mode = m.f_x_mode(n, r).unwrap() * C64::from_polar(1.0, (n as f64 - 1.0) * th);
            assert!((full - mode).norm() < 1e-13 * full.norm().max(1.0), "n={n} r={r}");
        }
    }
}

#[test]
fn f_x_reduces_to_limit_far_out() {
    // beyond the core u_t is negligible and F^X tends to Pdot / (2z)
    let m = model(24.0);
    let p = HolomorphicPoly::from_real(&[1.0, 0.5]);
    let z = C64::from_polar(0.9, 0.3);
    let fx = m.f_x(&p, z).unwrap();
    let chi = chi_series(&p);
    let lim = chi.derivative().eval(z) + chi.eval(z) / (2.0 * z);
    assert!((fx - lim).norm() < 1e-12);
    assert!(m.f_x(&p, C64::new(0.0, 0.0)).is_err());
}

#[test]
fn nu_inf_closed_forms() {
    let p = HolomorphicPoly::from_real(&[0.0, 2.0]);
    let n = nu_inf(&p, C64::new(0.0, 0.0)).unwrap();
    assert!((n[(0, 0)] + C64::new(0.5, 0.0)).norm() < 1e-15);
    assert!(nu_inf(&HolomorphicPoly::from_real(&[1.0]), C64::new(0.0, 0.0)).is_err());
    let z = C64::new(0.3, -0.2);
    let q = HolomorphicPoly::from_real(&[1.0, -1.0, 0.25]);
    let a = nu_inf(&q, z).unwrap();
    let b = nu_inf_field(&q).eval(z).unwrap();
    assert!(max_abs(&(a - b)) < 1e-14);
}

#[test]
fn chi_series_coefficients() {
    let p = HolomorphicPoly::from_real(&[3.0, 3.0, 5.0]);
    let c = chi_series(&p);
    for (k, want) in [3.0, 1.0, 1.0].into_iter().enumerate() {
        assert!((c.coeff(k) - C64::new(want, 0.0)).norm() < 1e-15);
    }
}

#[test]
fn beta_vanishes_outside_core_and_on_radial_vectors() {
    let m = model(4.0);
    let p = HolomorphicPoly::from_real(&[1.0]);
    let z = C64::from_polar(0.6, 0.8);
    // for Pdot = 1 |chi|^2 is constant, and *d|z|^2 annihilates radial vectors
    assert!(m.beta_t(&p, z, z).unwrap().abs() < 1e-15);
    let tangential = z * C64::new(0.0, 1.0);
    let b = m.beta_t(&p, z, tangential).unwrap();
    let (u, _) = m.u_at(0.6).unwrap();
    let want = 16.0 / 0.6 * (-2.0 * u).exp_m1() * 2.0 * 0.36;
    assert!((b - want).abs() < 1e-12 * want.abs());
}

#[test]
fn phi_field_normal_form() {
    let z = C64::new(0.4, 0.1);
    let p = phi_field().eval(z).unwrap();
    let mut want = CMat::zeros(2, 2);
    want[(0, 1)] = z;
    want[(1, 0)] = C64::new(1.0, 0.0);
    assert!(max_abs(&(p - want)) == 0.0);
}

#[test]
fn gauge_normalization_recovers_pdot() {
    for seed in 0..20 {
        let pdot = HolomorphicPoly::new(vec![C64::new(1.0, 0.5), C64::new(-0.3, 0.2), C64::new(0.1, 0.0)]);
        let (eta, pd) = gauged_deformation(seed, &pdot);
        let out = gauge_normalize_su2(&eta, &pd).unwrap();
        assert!(out.eta_residual <= 1e-12, "seed {seed}: {}", out.eta_residual);
        assert!(out.shape_residual <= 1e-12, "seed {seed}: {}", out.shape_residual);
        // tr(phi phidot) is gauge invariant and equals the upper-right entry
        for &z in &hml::defalg::default_samples() {
            let v = out.phi_dot.eval(z).unwrap();
            assert!((v[(0, 1)] - pdot.eval(z)).norm() < 1e-12);
        }
    }
}

#[test]
fn gauge_normalization_rejects_wrong_rank() {
    let e = MatrixPolyField::zero(3, FormType::Form01);
    let p = MatrixPolyField::zero(3, FormType::Form10);
    assert!(gauge_normalize_su2(&e, &p).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn app_weight_interpolates(r in 0.01f64..2.0, t in 2.0f64..16.0) {
        let m = model(t);
        let (u, _) = m.u_at(r).unwrap();
        let (w, _) = m.weight(Which::App, r).unwrap();
        prop_assert!(w >= 0.0 && w <= u + 1e-15);
    }

    #[test]
    fn normalization_is_holomorphic_gauge(seed in 0u64..1000, a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let pdot = HolomorphicPoly::new(vec![C64::new(a, b), C64::new(b, 0.3)]);
        let (eta, pd) = gauged_deformation(seed, &pdot);
        let out = gauge_normalize_su2(&eta, &pd).unwrap();
        prop_assert!(out.eta_residual <= 1e-12 && out.shape_residual <= 1e-12);
    }
}
