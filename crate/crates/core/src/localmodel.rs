//! The SU(2) disk model around a simple zero of `q2 = z dz^2`.
//!
//! In the frame where `phi = [[0, z], [1, 0]] dz` every metric is diagonal,
//! `h = diag(|z|^{-1/2} e^{-w}, |z|^{1/2} e^{w})`, with
//! `w = 0` for `h_inf`, `w = u_t` for the model and `w = u_t chi_cut` for the
//! approximate metric. A normal-form deformation is `phidot = [[0, Pdot],
//! [0, 0]] dz` with holomorphic `Pdot`, and diagonal metric variations are
//! written `nu = -F sigma3 / 2`.

use crate::defalg::{sigma3, CMat, FormType, HermitianField, MatrixPolyField, RadialWeight};
use crate::painleve::RadialProfile;
use crate::poly::{HolomorphicPoly, PolyRole};
use crate::sunform::PolyMatrix;
use crate::{Error, Result, C64};
use serde::Serialize;
use std::sync::Arc;

/// Radial cutoff equal to 1 on `[0, r1]`, 0 on `[r2, inf)`, and a quintic
/// smoothstep in `ln r` between.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Cutoff {
    pub r1: f64,
    pub r2: f64,
}

impl Default for Cutoff {
    fn default() -> Self {
        Self { r1: 0.25, r2: 1.0 }
    }
}

impl Cutoff {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        if !(r1 > 0.0 && r2 > r1 && r2.is_finite()) {
            return Err(Error::Invalid(format!("need 0 < r1 < r2, got ({r1}, {r2})")));
        }
        Ok(Self { r1, r2 })
    }

    /// `(chi(r), chi'(r))`.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        if r <= self.r1 {
            return (1.0, 0.0);
        }
        if r >= self.r2 {
            return (0.0, 0.0);
        }
        let l = (self.r2 / self.r1).ln();
        let x = (r / self.r1).ln() / l;
        let s = x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
        let ds = 30.0 * x * x * (1.0 - x) * (1.0 - x);
        (1.0 - s, -ds / (r * l))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Inf,
    Model,
    App,
}

/// Disk data at scale `t`: profile `u_t`, cutoff and disk radius `R = r2`.
#[derive(Debug, Clone)]
pub struct LocalModel {
    pub t: f64,
    /// `u_t`, obtained from a `t = 1` profile by the rescaling law.
    pub u: Arc<RadialProfile>,
    pub cutoff: Cutoff,
    pub radius: f64,
}

impl LocalModel {
    /// Build the model at scale `t` from a converged `u_1`.
    pub fn new(u1: &RadialProfile, t: f64, cutoff: Cutoff) -> Result<Self> {
        let u = u1.rescale(t)?;
        if u.r_max() < cutoff.r2 {
            return Err(Error::Invalid(format!(
                "profile ends at r = {} inside the disk of radius {}",
                u.r_max(),
                cutoff.r2
            )));
        }
        Ok(Self { t, u: Arc::new(u), cutoff, radius: cutoff.r2 })
    }

    /// `(u_t(r), u_t'(r))`, continued analytically outside the stored grid.
    pub fn u_at(&self, r: f64) -> Result<(f64, f64)> {
        self.u.eval_extended(r)
    }

    /// Exponent `w` and `dw/dr` of the chosen diagonal metric.
    pub fn weight(&self, which: Which, r: f64) -> Result<(f64, f64)> {
        if !(r > 0.0) {
            return Err(Error::SingularPoint(format!("metric weight needs r > 0, got {r}")));
        }
        match which {
            Which::Inf => Ok((0.0, 0.0)),
            Which::Model => self.u_at(r),
            Which::App => {
                let (c, dc) = self.cutoff.eval(r);
                if c == 0.0 {
                    return Ok((0.0, 0.0));
                }
                let (u, du) = self.u_at(r)?;
                Ok((u * c, du * c + u * dc))
            }
        }
    }

    /// `w(z)` with `h = diag(|z|^{-1/2} e^{-w}, |z|^{1/2} e^{w})`.
    pub fn metric_weight(&self, which: Which, z: C64) -> Result<f64> {
        Ok(self.weight(which, z.norm())?.0)
    }

    /// `h_1 / h_2 = |z|^{-1} e^{-2w}`.
    pub fn rho(&self, which: Which, r: f64) -> Result<f64> {
        Ok((-2.0 * self.weight(which, r)?.0).exp() / r)
    }

    /// The metric as a [`HermitianField`] for the matrix oracle.
    pub fn hermitian(&self, which: Which) -> HermitianField {
        if which == Which::Inf {
            return HermitianField::su2(None);
        }
        let m = self.clone();
        let w: RadialWeight = Arc::new(move |r| m.weight(which, r).unwrap_or((0.0, 0.0)));
        HermitianField::su2(Some(w))
    }

    /// `F_t^X = d_z chi + 2 chi d_z(1/2 log|z| + u_t)`.
    pub fn f_x(&self, pdot: &HolomorphicPoly, z: C64) -> Result<C64> {
        let r = z.norm();
        if r == 0.0 {
            return Err(Error::SingularPoint("F^X at z = 0".into()));
        }
        let (_, du) = self.u_at(r)?;
        let chi = chi_series(pdot);
        let (c, dc) = chi.eval_d(z);
        Ok(dc + 2.0 * c * (1.0 / (4.0 * z) + du * z.conj() / (2.0 * r)))
    }

    /// Radial part `r^{n-1} (1/2 + r u_t'(r) / (2n + 1))` of `F_t^X` for
    /// `Pdot = z^n`; the angular factor is `e^{i(n-1) theta}`.
    pub fn f_x_mode(&self, n: usize, r: f64) -> Result<f64> {
        let (_, du) = self.u_at(r)?;
        Ok(r.powi(n as i32 - 1) * (0.5 + r * du / (2 * n + 1) as f64))
    }

    /// The 1-form `beta_t = t^2 |z|^{-1}(e^{-2u_t} - 1)(2|z|^2 *d|chi|^2 +
    /// |chi|^2 *d|z|^2)` evaluated on the tangent vector `v`, with the flat
    /// Hodge star `*dx = dy`, `*dy = -dx`.
    pub fn beta_t(&self, pdot: &HolomorphicPoly, z: C64, v: C64) -> Result<f64> {
        let r = z.norm();
        if r == 0.0 {
            return Err(Error::SingularPoint("beta_t at z = 0".into()));
        }
        let (u, _) = self.u_at(r)?;
        let chi = chi_series(pdot);
        let (c, dc) = chi.eval_d(z);
        let g = dc * c.conj(); // d_z |chi|^2
        let (fx, fy) = (2.0 * g.re, -2.0 * g.im);
        let star_dchi = fx * v.im - fy * v.re;
        let star_dz2 = 2.0 * z.re * v.im - 2.0 * z.im * v.re;
        let e = (-2.0 * u).exp_m1();
        Ok(self.t * self.t / r * e * (2.0 * r * r * star_dchi + c.norm_sqr() * star_dz2))
    }
}

/// `nu_inf = -Pdot/(4z) sigma3`.
pub fn nu_inf(pdot: &HolomorphicPoly, z: C64) -> Result<CMat> {
    let a0 = pdot.coeff(0);
    let f = if z == C64::new(0.0, 0.0) {
        if a0 != C64::new(0.0, 0.0) {
            return Err(Error::SingularPoint("nu_inf has a pole at z = 0".into()));
        }
        pdot.coeff(1) / 4.0
    } else {
        pdot.eval(z) / (4.0 * z)
    };
    Ok(sigma3() * (-f))
}

/// `chi = sum a_n z^n / (2n + 1)`.
pub fn chi_series(pdot: &HolomorphicPoly) -> HolomorphicPoly {
    let c = pdot.coeffs.iter().enumerate().map(|(n, a)| a / (2 * n + 1) as f64).collect();
    HolomorphicPoly::new(c).with_role(PolyRole::ChiSeries)
}

/// `phi = [[0, z], [1, 0]] dz` as an exact field.
pub fn phi_field() -> MatrixPolyField {
    let mut lo = CMat::zeros(2, 2);
    lo[(1, 0)] = C64::new(1.0, 0.0);
    let mut up = CMat::zeros(2, 2);
    up[(0, 1)] = C64::new(1.0, 0.0);
    MatrixPolyField::constant(lo, FormType::Form10).add(&MatrixPolyField::monomial(1, 0, up, FormType::Form10))
}

/// `phidot = [[0, Pdot], [0, 0]] dz`.
pub fn phi_dot_field(pdot: &HolomorphicPoly) -> MatrixPolyField {
    let mut out = MatrixPolyField::zero(2, FormType::Form10);
    for (n, a) in pdot.coeffs.iter().enumerate() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = *a;
        out = out.add(&MatrixPolyField::monomial(n as i32, 0, m, FormType::Form10));
    }
    out
}

/// `nu_inf` as an exact Laurent field.
pub fn nu_inf_field(pdot: &HolomorphicPoly) -> MatrixPolyField {
    let mut out = MatrixPolyField::zero(2, FormType::Scalar);
    for (n, a) in pdot.coeffs.iter().enumerate() {
        out = out.add(&MatrixPolyField::monomial(n as i32 - 1, 0, sigma3() * (-a / 4.0), FormType::Scalar));
    }
    out
}

/// Output of [`gauge_normalize_su2`].
#[derive(Debug, Clone)]
pub struct NormalizedDeformation {
    pub gamma: MatrixPolyField,
    /// `phidot + [phi, gamma]`, strictly upper triangular.
    pub phi_dot: MatrixPolyField,
    /// `sup |eta + dbar gamma|` over the sample grid.
    pub eta_residual: f64,
    /// `sup` of the diagonal and lower entries of the new `phidot`.
    pub shape_residual: f64,
}

/// Gauge a deformation `(eta, phidot)` of the model Higgs field into the shape
/// `(0, [[0, Pdot], [0, 0]] dz)`.
///
/// First `gamma_1` with `dbar gamma_1 = -eta` is taken as the termwise
/// `zbar`-antiderivative; then the holomorphic diagonal-block correction
/// `gamma_2 = [[-p3/2, p1], [0, p3/2]]` removes the remaining
/// entries, where `(p1, p3)` are the `(1,1)` and `(2,1)` entries of
/// `phidot + [phi, gamma_1]`. The input must satisfy
/// `dbar phidot + [eta, phi] = 0`.
pub fn gauge_normalize_su2(eta: &MatrixPolyField, phi_dot: &MatrixPolyField) -> Result<NormalizedDeformation> {
    if eta.n != 2 || phi_dot.n != 2 {
        return Err(Error::Invalid("SU(2) normal form needs 2x2 fields".into()));
    }
    let phi = phi_field();
    let mut g1 = MatrixPolyField::zero(2, FormType::Scalar);
    for (&(j, k), m) in &eta.coeffs {
        if k < 0 {
            return Err(Error::Invalid("eta must be polynomial in zbar".into()));
        }
        g1 = g1.add(&MatrixPolyField::monomial(j, k + 1, m * C64::new(-1.0 / (k + 1) as f64, 0.0), FormType::Scalar));
    }
    let p1f = phi_dot.add(&phi.bracket(&g1).with_form(FormType::Form10));
    // `p1f` is holomorphic for a valid deformation; its `zbar`-free part
    // feeds the diagonal-block formula of the SU(n) normal form.
    let mut hol = p1f.clone();
    hol.coeffs.retain(|&(_, k), _| k == 0);
    let (g2, _) = crate::sunform::diagonal_block_gamma(&HolomorphicPoly::z(), &PolyMatrix::from_field(&hol)?);
    let g2 = g2.to_field(FormType::Scalar);
    let gamma = g1.add(&g2);
    let out = phi_dot.add(&phi.bracket(&gamma).with_form(FormType::Form10));
    let eta_res = eta.add(&gamma.d_zbar().with_form(FormType::Form01));
    let samples = crate::defalg::default_samples();
    let mut er = 0.0f64;
    let mut sr = 0.0f64;
    for &z in &samples {
        er = er.max(crate::defalg::max_abs(&eta_res.eval(z)?));
        let v = out.eval(z)?;
        sr = sr.max(v[(0, 0)].norm()).max(v[(1, 0)].norm()).max(v[(1, 1)].norm());
    }
    Ok(NormalizedDeformation { gamma, phi_dot: out, eta_residual: er, shape_residual: sr })
}
