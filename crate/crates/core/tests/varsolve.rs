use hml::localmodel::*;
use hml::painleve::{solve_u1, RadialProfile};
use hml::poly::HolomorphicPoly;
use hml::varsolve::*;
use hml::C64;
use proptest::prelude::*;
use std::sync::OnceLock;

fn u1() -> &'static RadialProfile {
    static U: OnceLock<RadialProfile> = OnceLock::new();
    U.get_or_init(|| solve_u1(1e-4, 12.0, 4000).unwrap())
}

fn model(t: f64) -> LocalModel {
    LocalModel::new(u1(), t, Cutoff::default()).unwrap()
}

fn samples() -> Vec<C64> {
    (0..40).map(|k| C64::from_polar(0.02 + 0.97 * k as f64 / 39.0, 0.7 * k as f64)).collect()
}

/// Cell-centred finite volumes for the `m = 0` mode of `Pdot = z`:
/// `(r F')'/r - 16 t^2 r cosh(2w) F = -8 t^2 e^{-2w} r`, `F(R) = 1/2`,
/// regular at the origin through the vanishing inner flux.
fn fv_mode0(m: &LocalModel, which: Which, n: usize, at: f64) -> f64 {
    let big_r = m.radius;
    let h = big_r / n as f64;
    let t2 = m.t * m.t;
    let (mut a, mut b, mut c, mut d) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..n {
        let r = (i as f64 + 0.5) * h;
        let w = m.weight(which, r).unwrap().0;
        let (rl, rr) = (i as f64 * h, (i as f64 + 1.0) * h);
        let k = 1.0 / (r * h * h);
        a[i] = rl * k;
        c[i] = rr * k;
        b[i] = -(rl + rr) * k - 16.0 * t2 * r * (2.0 * w).cosh();
        d[i] = -8.0 * t2 * (-2.0 * w).exp() * r;
    }
    // ghost node across the rim: F_n = 2 F(R) - F_{n-1}
    b[n - 1] -= c[n - 1];
    d[n - 1] -= c[n - 1] * 2.0 * 0.5;
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for i in 1..n {
        let den = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / den;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    let pos = at / h - 0.5;
    let i = pos.floor() as usize;
    let f = pos - i as f64;
    x[i] * (1.0 - f) + x[i + 1] * f
}

#[test]
fn app_mode_matches_finite_volume_oracle() {
    for (t, at) in [(2.0, 0.5), (4.0, 0.3)] {
        let m = model(t);
        let fa = solve_f(&m, &HolomorphicPoly::from_real(&[0.0, 1.0]), Which::App, &VarGrid::default()).unwrap();
        // `at` sits midway between cell centres at both resolutions
        let coarse = fv_mode0(&m, Which::App, 20000, at);
        let fine = fv_mode0(&m, Which::App, 40000, at);
        let oracle = (4.0 * fine - coarse) / 3.0;
        let v = fa.mode_value(0, at).unwrap();
        assert!(v.im.abs() < 1e-15);
        assert!((v.re - oracle).abs() < 1e-7 * oracle.abs(), "t={t} {v} vs {oracle}");
    }
}

#[test]
fn model_solve_reproduces_closed_form() {
    for t in [4.0, 8.0] {
        let m = model(t);
        for p in [HolomorphicPoly::from_real(&[1.0]), HolomorphicPoly::from_real(&[0.5, -1.0, 0.25])] {
            let f = solve_f(&m, &p, Which::Model, &VarGrid::default()).unwrap();
            assert!(f.residual < 1e-8, "{}", f.residual);
            assert!(f.min_singular_value > 0.0);
            for z in samples() {
                let fx = m.f_x(&p, z).unwrap();
                assert!((f.eval(z).unwrap() - fx).norm() < 1e-7 * fx.norm().max(1.0), "t={t} z={z}");
            }
        }
    }
}

#[test]
fn deviation_equals_app_minus_closed_form() {
    let m = model(4.0);
    let p = HolomorphicPoly::from_real(&[1.0, 0.5]);
    let fa = solve_f(&m, &p, Which::App, &VarGrid::default()).unwrap();
    let d = solve_deviation(&m, &p, &VarGrid::default()).unwrap();
    for z in samples() {
        let want = fa.eval(z).unwrap() - m.f_x(&p, z).unwrap();
        assert!((d.eval(z).unwrap() - want).norm() < 1e-8, "z={z}");
    }
}

#[test]
fn only_excited_modes_are_populated() {
    let m = model(4.0);
    let p = HolomorphicPoly::new(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 2.0)]);
    let f = solve_f(&m, &p, Which::App, &VarGrid::default()).unwrap();
    let ms: Vec<i32> = f.modes.iter().map(|x| x.m).collect();
    assert_eq!(ms, vec![-1, 1]);
    assert_eq!(f.mode_value(0, 0.5).unwrap(), C64::new(0.0, 0.0));
    let z = solve_f(&m, &HolomorphicPoly::zero(), Which::App, &VarGrid::default()).unwrap();
    assert_eq!(z.populated(), 0);
}

#[test]
fn field_arithmetic() {
    let m = model(4.0);
    let p = HolomorphicPoly::from_real(&[1.0]);
    let q = HolomorphicPoly::from_real(&[0.0, 1.0]);
    let a = solve_f(&m, &p, Which::App, &VarGrid::default()).unwrap();
    let b = solve_f(&m, &q, Which::App, &VarGrid::default()).unwrap();
    let d = a.sub(&b).unwrap();
    let z = C64::from_polar(0.4, 1.1);
    assert!((d.eval(z).unwrap() - (a.eval(z).unwrap() - b.eval(z).unwrap())).norm() < 1e-15);
    assert!((a.neg().eval(z).unwrap() + a.eval(z).unwrap()).norm() == 0.0);
    assert!(a.eval(C64::new(1.5, 0.0)).is_err());
    let other = solve_f(&m, &p, Which::App, &VarGrid { r_min: 1e-4, n_nodes: 1000 }).unwrap();
    assert!(a.sub(&other).is_err());
}

#[test]
fn rejects_inf_metric() {
    let m = model(4.0);
    assert!(solve_f(&m, &HolomorphicPoly::from_real(&[1.0]), Which::Inf, &VarGrid::default()).is_err());
}

#[test]
fn maximum_principle_bound_holds() {
    let p = HolomorphicPoly::from_real(&[1.0]);
    let mut sups = Vec::new();
    for t in [4.0, 8.0] {
        let m = model(t);
        let d = solve_deviation(&m, &p, &VarGrid::default()).unwrap();
        let f_app = |z: C64| Ok(m.f_x(&p, z)? + d.eval(z)?);
        let diff = |z: C64| Ok(-d.eval(z)?);
        let b = max_principle_bound(&m, &p, &f_app, &diff, 120, 16).unwrap();
        assert!(b.satisfied_typeset && b.satisfied_pde, "{b:?}");
        assert!(b.lhs <= b.rhs_with_rim * (1.0 + 1e-6));
        sups.push(b.lhs);
    }
    assert!(sups[0] / sups[1] >= 1f64.exp(), "{sups:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn linear_in_pdot(a in -2.0f64..2.0, b in -2.0f64..2.0, th in 0.0f64..6.28, r in 0.05f64..0.95) {
        let m = model(4.0);
        let g = VarGrid::default();
        let p = HolomorphicPoly::from_real(&[1.0, 0.0]);
        let q = HolomorphicPoly::from_real(&[0.0, 1.0]);
        let pq = HolomorphicPoly::from_real(&[a, b]);
        let z = C64::from_polar(r, th);
        let fp = solve_f(&m, &p, Which::App, &g).unwrap().eval(z).unwrap();
        let fq = solve_f(&m, &q, Which::App, &g).unwrap().eval(z).unwrap();
        let f = solve_f(&m, &pq, Which::App, &g).unwrap().eval(z).unwrap();
        prop_assert!((f - (fp * a + fq * b)).norm() < 1e-12 * (1.0 + f.norm()));
    }

    #[test]
    fn rotation_covariance(th in 0.0f64..6.28, r in 0.05f64..0.95, n in 0usize..3) {
        // Pdot = z^n gives F(e^{ia} z) = e^{i(n-1)a} F(z)
        let m = model(4.0);
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        let f = solve_f(&m, &HolomorphicPoly::from_real(&c), Which::Model, &VarGrid::default()).unwrap();
        let z = C64::from_polar(r, 0.0);
        let w = C64::from_polar(r, th);
        let lhs = f.eval(w).unwrap();
        let rhs = f.eval(z).unwrap() * C64::from_polar(1.0, (n as f64 - 1.0) * th);
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
    }
}
