use super::{adjoint_h, commutator, max_abs, CMat, FormType, HermitianField, MatrixPolyField};
use crate::quad::{trapezoid_angles, GaussLegendre};
use crate::{Error, Result, C64};
use serde::Serialize;

const I: C64 = C64::new(0.0, 1.0);

/// Coefficient of `dz ^ dzbar` in the graded bracket of the matrix 1-forms
/// `a dz + b dzbar` and `c dz + d dzbar`.
pub fn graded_bracket(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> CMat {
    commutator(a, d) + commutator(c, b)
}

/// Residuals of the real/imaginary decomposition of the Coulomb condition.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    /// `sup |(X + X^*) - line 2|`.
    pub re_residual: f64,
    /// `sup |(X - X^*) + i line 3|`.
    pub im_residual: f64,
    /// Number of sample points.
    pub samples: usize,
    /// `sup |X|`, for scale.
    pub l_norm: f64,
}

/// Sample points on the unit disk away from the origin.
pub fn default_samples() -> Vec<C64> {
    let mut v = Vec::new();
    for &r in &[0.15, 0.4, 0.65, 0.9] {
        for k in 0..7 {
            v.push(C64::from_polar(r, 0.3 + k as f64 * std::f64::consts::TAU / 7.0));
        }
    }
    v
}

fn ev(f: &MatrixPolyField, z: C64) -> Result<CMat> {
    f.eval(z)
}

/// Check that `L = d_A^{h0} Adot^{0,1} + [Phi^dagger, Phidot]` with `h0 = Id`
/// splits as `2 Re L = d_A Adot + [Phi, Phidot^dagger] + [Phidot, Phi^dagger]`
/// and `2i Im L = -i (d_A *Adot - [Phidot - Phidot^dagger, *(Phi - Phi^dagger)])`.
///
/// Inputs are the `dzbar` coefficients of `A^{0,1}`, `Adot^{0,1}` and the `dz`
/// coefficients of `Phi`, `Phidot`. The unitary completion is
/// `A^{1,0} = -(A^{0,1})^*`.
pub fn coulomb_identity_check(
    a01: &MatrixPolyField,
    phi: &MatrixPolyField,
    da01: &MatrixPolyField,
    dphi: &MatrixPolyField,
) -> Result<IdentityReport> {
    let neg = C64::new(-1.0, 0.0);
    let a10 = a01.conj_transpose().scale(neg);
    let da10 = da01.conj_transpose().scale(neg);
    let d_z_da01 = da01.d_z();
    let d_zb_da10 = da10.d_zbar();
    let samples = default_samples();
    let mut re = 0.0f64;
    let mut im = 0.0f64;
    let mut ln = 0.0f64;
    for &z in &samples {
        let az = ev(&a10, z)?;
        let azb = ev(a01, z)?;
        let p = ev(phi, z)?;
        let ps = p.adjoint();
        let dp = ev(dphi, z)?;
        let dps = dp.adjoint();
        let daz = ev(&da10, z)?;
        let dazb = ev(da01, z)?;
        let zero = CMat::zeros(p.nrows(), p.ncols());

        // L = d_z Adot_zbar + [A_z dz, Adot_zbar dzbar] + [Phi^* dzbar, Phidot dz]
        let x = ev(&d_z_da01, z)?
            + graded_bracket(&az, &zero, &zero, &dazb)
            + graded_bracket(&zero, &ps, &dp, &zero);
        ln = ln.max(max_abs(&x));

        // d_A of the 1-form  w_z dz + w_zbar dzbar
        let d_a = |wz: &CMat, wzb: &CMat, dz_wzb: &CMat, dzb_wz: &CMat| -> CMat {
            dz_wzb - dzb_wz + graded_bracket(&az, &azb, wz, wzb)
        };
        let dz_dazb = ev(&d_z_da01, z)?;
        let dzb_daz = ev(&d_zb_da10, z)?;

        let line2 = d_a(&daz, &dazb, &dz_dazb, &dzb_daz)
            + graded_bracket(&p, &zero, &zero, &dps)
            + graded_bracket(&dp, &zero, &zero, &ps);

        // *dz = -i dz, *dzbar = i dzbar
        let star_daz = &daz * (-I);
        let star_dazb = &dazb * I;
        let line3 = d_a(&star_daz, &star_dazb, &(&dz_dazb * I), &(&dzb_daz * (-I)))
            - graded_bracket(&dp, &(-&dps), &(&p * (-I)), &(-(&ps * I)));

        let x_star = x.adjoint();
        re = re.max(max_abs(&(&x + &x_star - line2)));
        im = im.max(max_abs(&(&x - &x_star + line3 * I)));
    }
    Ok(IdentityReport { re_residual: re, im_residual: im, samples: samples.len(), l_norm: ln })
}

/// Coefficient of `dz ^ dzbar` in
/// `d^h dbar nu - d^h eta - [phi^{dagger_h}, phidot + [nu, phi]]` at `z`.
pub fn triple_gauge_residual_at(
    eta_dot: &MatrixPolyField,
    phi_dot: &MatrixPolyField,
    nu_dot: &MatrixPolyField,
    phi: &MatrixPolyField,
    h: &HermitianField,
    z: C64,
) -> Result<CMat> {
    let gam = h.connection(z)?;
    let dzb_nu = ev(&nu_dot.d_zbar(), z)?;
    let dz_dzb_nu = ev(&nu_dot.d_zbar().d_z(), z)?;
    let e = ev(eta_dot, z)?;
    let dz_e = ev(&eta_dot.d_z(), z)?;
    let p = ev(phi, z)?;
    let a = h.adjoint(&p, z)?;
    let nu = ev(nu_dot, z)?;
    let b = ev(phi_dot, z)? + commutator(&nu, &p);
    // [A dzbar, B dz] = (BA - AB) dz^dzbar
    Ok(dz_dzb_nu + commutator(&gam, &dzb_nu) - dz_e - commutator(&gam, &e) - (&b * &a - &a * &b))
}

/// Sup over `sample` of the residual of the metric-deformation Coulomb
/// equation. Inputs: `eta_dot` (0,1), `phi_dot` and `phi` (1,0), `nu_dot` (0,0).
pub fn triple_gauge_residual(
    eta_dot: &MatrixPolyField,
    phi_dot: &MatrixPolyField,
    nu_dot: &MatrixPolyField,
    phi: &MatrixPolyField,
    h: &HermitianField,
    sample: &[C64],
) -> Result<f64> {
    let mut m = 0.0f64;
    for &z in sample {
        let r = triple_gauge_residual_at(eta_dot, phi_dot, nu_dot, phi, h, z)?;
        m = m.max(max_abs(&r));
    }
    Ok(m)
}

/// Complex density `2 (<eta - dbar nu, eta>_h + <phidot + [nu, phi], phidot>_h)`
/// against `dx ^ dy`, with `i dz ^ dzbar = 2 dx ^ dy` applied once here.
pub fn l2_integrand_complex(
    eta_dot: &MatrixPolyField,
    phi_dot: &MatrixPolyField,
    nu_dot: &MatrixPolyField,
    phi: &MatrixPolyField,
    h: &HermitianField,
    z: C64,
) -> Result<C64> {
    let e = ev(eta_dot, z)?;
    let nu = ev(nu_dot, z)?;
    let dzb_nu = ev(&nu_dot.d_zbar(), z)?;
    let pd = ev(phi_dot, z)?;
    let p = ev(phi, z)?;
    let first = (&e - dzb_nu) * h.adjoint(&e, z)?;
    let second = (&pd + commutator(&nu, &p)) * h.adjoint(&pd, z)?;
    Ok((first.trace() + second.trace()) * 4.0)
}

/// The same density from point values: `e = eta`, `dzb_nu = d_zbar nu`,
/// `pd = phidot`, `nu`, `p = phi` and the metric matrix `h`.
pub fn l2_density_point(e: &CMat, dzb_nu: &CMat, pd: &CMat, nu: &CMat, p: &CMat, h: &CMat) -> Result<C64> {
    let first = (e - dzb_nu) * adjoint_h(e, h)?;
    let second = (pd + commutator(nu, p)) * adjoint_h(pd, h)?;
    Ok((first.trace() + second.trace()) * 4.0)
}

/// Real part of [`l2_integrand_complex`]. The imaginary part integrates to
/// zero for Coulomb-gauge representatives but need not vanish pointwise.
pub fn l2_integrand(
    eta_dot: &MatrixPolyField,
    phi_dot: &MatrixPolyField,
    nu_dot: &MatrixPolyField,
    phi: &MatrixPolyField,
    h: &HermitianField,
    z: C64,
) -> Result<f64> {
    Ok(l2_integrand_complex(eta_dot, phi_dot, nu_dot, phi, h, z)?.re)
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    /// `-int tr(K xi^*)` with `K = d_z d_zbar xi - [Phi^*, [Phi, xi]]`.
    pub pairing: f64,
    /// `int |d_zbar xi|^2 + |[Phi, xi]|^2`.
    pub energy: f64,
    /// Imaginary part of the pairing integral.
    pub pairing_imag: f64,
    pub rel_err: f64,
}

/// Integration-by-parts identity on the unit disk for `xi = (1 - |z|^2) m`,
/// `h = Id`, by Gauss-Legendre in radius times trapezoid in angle.
pub fn energy_identity_check(
    phi: &MatrixPolyField,
    m: &MatrixPolyField,
    n_r: usize,
    n_theta: usize,
) -> Result<EnergyReport> {
    if phi.form != FormType::Form10 {
        return Err(Error::Invalid("phi must be a (1,0)-form coefficient".into()));
    }
    let n = m.n;
    let one = MatrixPolyField::constant(CMat::identity(n, n), FormType::Scalar);
    let bump = one.sub(&one.shift(1, 1, C64::new(1.0, 0.0)));
    let xi = bump.mul(m).with_form(FormType::Scalar);
    let lap = xi.d_zbar().d_z();
    let dzb = xi.d_zbar();
    let gl = GaussLegendre::new(n_r);
    let th = trapezoid_angles(n_theta);
    let dth = std::f64::consts::TAU / n_theta as f64;
    let mut pairing = C64::new(0.0, 0.0);
    let mut energy = 0.0;
    for (r, wr) in gl.on(0.0, 1.0) {
        for &t in &th {
            let z = C64::from_polar(r, t);
            let w = wr * r * dth;
            let x = xi.eval(z)?;
            let p = phi.eval(z)?;
            let ps = p.adjoint();
            let c = commutator(&p, &x);
            let k = lap.eval(z)? - commutator(&ps, &c);
            pairing -= (k * x.adjoint()).trace() * w;
            let g = dzb.eval(z)?;
            energy += (g.norm_squared() + c.norm_squared()) * w;
        }
    }
    let rel_err = (pairing.re - energy).abs() / energy.abs().max(1e-300);
    Ok(EnergyReport { pairing: pairing.re, energy, pairing_imag: pairing.im, rel_err })
}

/// Worst residuals over a seeded batch of random Coulomb instances.
#[derive(Debug, Clone, Serialize)]
pub struct CoulombBatch {
    pub seed: u64,
    pub instances: usize,
    pub ranks: Vec<usize>,
    pub degree: i32,
    pub max_re_residual: f64,
    pub max_im_residual: f64,
    /// Index of the instance with the largest residual.
    pub worst: usize,
}

/// Instance `k` has rank `ranks[k % len]` and random trace-free polynomial
/// fields of total degree `degree` drawn from `ChaCha8(seed + k)`.
pub fn coulomb_batch(seed: u64, count: usize, ranks: &[usize], degree: i32) -> Result<CoulombBatch> {
    use rand::SeedableRng;
    use rayon::prelude::*;
    if ranks.is_empty() || count == 0 {
        return Err(Error::Invalid("empty Coulomb batch".into()));
    }
    let reps: Vec<IdentityReport> = (0..count)
        .into_par_iter()
        .map(|k| {
            let n = ranks[k % ranks.len()];
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            let a = MatrixPolyField::random_sl(&mut rng, n, degree, FormType::Form01);
            let p = MatrixPolyField::random_sl(&mut rng, n, degree, FormType::Form10);
            let da = MatrixPolyField::random_sl(&mut rng, n, degree, FormType::Form01);
            let dp = MatrixPolyField::random_sl(&mut rng, n, degree, FormType::Form10);
            coulomb_identity_check(&a, &p, &da, &dp)
        })
        .collect::<Result<_>>()?;
    let worst = (0..count)
        .max_by(|&i, &j| {
            let a = reps[i].re_residual.max(reps[i].im_residual);
            let b = reps[j].re_residual.max(reps[j].im_residual);
            a.partial_cmp(&b).unwrap()
        })
        .unwrap_or(0);
    Ok(CoulombBatch {
        seed,
        instances: count,
        ranks: ranks.to_vec(),
        degree,
        max_re_residual: reps.iter().map(|r| r.re_residual).fold(0.0, f64::max),
        max_im_residual: reps.iter().map(|r| r.im_residual).fold(0.0, f64::max),
        worst,
    })
}
