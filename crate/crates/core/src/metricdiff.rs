//! Disk integrals of the metric-difference density `delta`, the Stokes
//! check for the model-versus-limit term, the semiflat disk identity, and
//! the decay scan along a ray `t -> infinity`.
//!
//! With `phi -> t phi`, `phidot -> t phidot` and `nu = -F sigma3 / 2`, the
//! density of `2 <phidot + [nu, phi], phidot>_h` for the diagonal metric with
//! exponent `w` is `4 t^2 |z|^{-1} e^{-2w} Re(conj(Pdot)(Pdot - F z))`. The
//! fast path below evaluates differences of this expression in a form free
//! of cancellation; the matrix path goes through the general density.

use crate::defalg::{l2_density_point, sigma3, CMat};
use crate::fit::{log_fit, LineFit};
use crate::localmodel::{chi_series, phi_dot_field, phi_field, Cutoff, LocalModel, Which};
use crate::painleve::RadialProfile;
use crate::poly::HolomorphicPoly;
use crate::quad::{composite_nodes, trapezoid_angles, GaussLegendre};
use crate::varsolve::{solve_deviation, FourierRadialField, VarGrid};
use crate::{Error, Result, C64};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// Quadrature sizes on the disk.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiskGrid {
    pub n_r: usize,
    pub n_theta: usize,
}

impl Default for DiskGrid {
    fn default() -> Self {
        Self { n_r: 400, n_theta: 32 }
    }
}

impl DiskGrid {
    fn halved(&self) -> Self {
        Self { n_r: (self.n_r / 2).max(100), n_theta: (self.n_theta / 2).max(12) }
    }
}

/// Radial breakpoints `0, R/2^k, ..., R/2, R` plus any `extra` inside.
pub fn radial_breaks(radius: f64, extra: &[f64]) -> Vec<f64> {
    let mut b: Vec<f64> = (0..=10).map(|k| radius / f64::powi(2.0, 10 - k)).collect();
    b.insert(0, 0.0);
    for &e in extra {
        if e > 0.0 && e < radius {
            b.push(e);
        }
    }
    b.sort_by(|a, c| a.partial_cmp(c).unwrap());
    b.dedup_by(|a, c| (*a - *c).abs() < 1e-12 * radius);
    b
}

/// `int_{|z| < R} f dA` by composite Gauss-Legendre in `r` (weight `r dr`)
/// times the trapezoid rule in `theta`.
pub fn integrate_disk(
    f: &(dyn Fn(C64) -> Result<f64> + Sync),
    radius: f64,
    extra_breaks: &[f64],
    grid: DiskGrid,
) -> Result<f64> {
    if grid.n_theta < 4 {
        return Err(Error::Invalid("need at least 4 angles".into()));
    }
    let nodes = composite_nodes(&radial_breaks(radius, extra_breaks), grid.n_r, 8);
    let th = trapezoid_angles(grid.n_theta);
    let dth = TAU / grid.n_theta as f64;
    let parts: Vec<f64> = nodes
        .par_iter()
        .map(|&(r, w)| {
            let mut acc = 0.0;
            for &t in &th {
                acc += f(C64::from_polar(r, t))?;
            }
            Ok(acc * w * r * dth)
        })
        .collect::<Result<_>>()?;
    Ok(parts.iter().sum())
}

/// `int_{|z| < breaks.last} f dA` with `per_panel` Gauss-Legendre nodes on
/// every radial panel between consecutive `breaks`.
pub fn integrate_disk_panels(
    f: &(dyn Fn(C64) -> Result<f64> + Sync),
    breaks: &[f64],
    per_panel: usize,
    n_theta: usize,
) -> Result<f64> {
    let gl = GaussLegendre::new(per_panel);
    let nodes: Vec<(f64, f64)> = breaks.windows(2).flat_map(|w| gl.on(w[0], w[1]).collect::<Vec<_>>()).collect();
    let th = trapezoid_angles(n_theta);
    let dth = TAU / n_theta as f64;
    let parts: Vec<f64> = nodes
        .par_iter()
        .map(|&(r, w)| {
            let mut acc = 0.0;
            for &t in &th {
                acc += f(C64::from_polar(r, t))?;
            }
            Ok(acc * w * r * dth)
        })
        .collect::<Result<_>>()?;
    Ok(parts.iter().sum())
}

/// Panel breaks following the nodes of `u_t` (and of `extra` fields) so that
/// every panel sees a single interpolation cell.
pub fn model_breaks(model: &LocalModel, extra: &[&[f64]]) -> Vec<f64> {
    let radius = model.radius;
    let mut b = vec![0.0, radius, model.cutoff.r1.min(radius)];
    b.extend(model.u.grid.iter().copied().filter(|&r| r < radius));
    for g in extra {
        b.extend(g.iter().copied().filter(|&r| r < radius));
    }
    b.sort_by(|a, c| a.partial_cmp(c).unwrap());
    b.dedup_by(|a, c| (*a - *c).abs() <= 1e-13 * radius);
    b
}

/// Gauss-Legendre points per interpolation cell in the model integrals.
pub const CELL_POINTS: usize = 4;

/// Diagonal metric variation `nu = -F sigma3 / 2`, described by how `F` is
/// obtained so that differences can be formed exactly.
#[derive(Clone, Copy)]
pub enum Nu<'a> {
    /// `F = Pdot / (2z)`.
    Inf,
    /// `F = F_t^X`.
    X,
    /// `F = F_t^X + D` with `D` from [`solve_deviation`].
    App(&'a FourierRadialField),
    /// A directly solved field `F`.
    Field(&'a FourierRadialField),
}

/// A metric together with a variation.
#[derive(Clone, Copy)]
pub struct Pair<'a> {
    pub which: Which,
    pub nu: Nu<'a>,
}

impl<'a> Pair<'a> {
    pub fn new(which: Which, nu: Nu<'a>) -> Self {
        Self { which, nu }
    }
}

/// `F - Pdot/(2z)`. For `F^X` this is `chi u_t' zbar / |z|`, using the
/// termwise identity `d_z chi + chi / (2z) = Pdot / (2z)`.
fn offset(model: &LocalModel, chi: &HolomorphicPoly, pdot: &HolomorphicPoly, nu: Nu, z: C64) -> Result<C64> {
    let r = z.norm();
    let x = || -> Result<C64> { Ok(chi.eval(z) * model.u_at(r)?.1 * z.conj() / r) };
    Ok(match nu {
        Nu::Inf => C64::new(0.0, 0.0),
        Nu::X => x()?,
        Nu::App(d) => x()? + d.eval(z)?,
        Nu::Field(f) => f.eval(z)? - pdot.eval(z) / (2.0 * z),
    })
}

/// `F` itself for the matrix path.
fn f_value(model: &LocalModel, pdot: &HolomorphicPoly, nu: Nu, z: C64) -> Result<C64> {
    Ok(match nu {
        Nu::Inf => pdot.eval(z) / (2.0 * z),
        Nu::X => model.f_x(pdot, z)?,
        Nu::App(d) => model.f_x(pdot, z)? + d.eval(z)?,
        Nu::Field(f) => f.eval(z)?,
    })
}

/// `w_1 - w_2` without cancellation.
fn weight_gap(model: &LocalModel, a: Which, b: Which, r: f64) -> Result<f64> {
    use Which::*;
    Ok(match (a, b) {
        _ if a == b => 0.0,
        (App, Model) => {
            let (u, _) = model.u_at(r)?;
            -u * (1.0 - model.cutoff.eval(r).0)
        }
        (Model, App) => -weight_gap(model, App, Model, r)?,
        _ => model.weight(a, r)?.0 - model.weight(b, r)?.0,
    })
}

/// `delta(z)` through the general matrix density, including `h` as a matrix.
pub fn delta_integrand(model: &LocalModel, pdot: &HolomorphicPoly, p1: Pair, p2: Pair, z: C64) -> Result<f64> {
    let t = C64::new(model.t, 0.0);
    let phi = phi_field().eval(z)? * t;
    let pd = phi_dot_field(pdot).eval(z)? * t;
    let zero = CMat::zeros(2, 2);
    let dens = |p: Pair| -> Result<f64> {
        let f = f_value(model, pdot, p.nu, z)?;
        let nu = sigma3() * (-0.5 * f);
        let h = model.hermitian(p.which).eval(z)?;
        Ok(l2_density_point(&zero, &zero, &pd, &nu, &phi, &h)?.re)
    };
    Ok(dens(p1)? - dens(p2)?)
}

/// `delta(z)` by the diagonal closed form
/// `4 t^2 |z|^{-1} Re conj(Pdot) [(e^{-2w_1} - e^{-2w_2})(Pdot - F_1 z) - e^{-2w_2}(F_1 - F_2) z]`.
pub fn delta_fast(model: &LocalModel, pdot: &HolomorphicPoly, p1: Pair, p2: Pair, z: C64) -> Result<f64> {
    let r = z.norm();
    if r == 0.0 {
        return Err(Error::SingularPoint("delta at z = 0".into()));
    }
    let chi = chi_series(pdot);
    let p = pdot.eval(z);
    let w2 = model.weight(p2.which, r)?.0;
    let e2 = (-2.0 * w2).exp();
    let de = e2 * (-2.0 * weight_gap(model, p1.which, p2.which, r)?).exp_m1();
    let df = match (p1.nu, p2.nu) {
        (Nu::App(d), Nu::X) => d.eval(z)?,
        (Nu::X, Nu::App(d)) => -d.eval(z)?,
        (a, b) => offset(model, &chi, pdot, a, z)? - offset(model, &chi, pdot, b, z)?,
    };
    let f1z = p / 2.0 + offset(model, &chi, pdot, p1.nu, z)? * z;
    let inner = de * (p - f1z) - e2 * df * z;
    Ok(4.0 * model.t * model.t / r * (p.conj() * inner).re)
}

/// `oint_{|z| = R} beta_t`, counter-clockwise, by the trapezoid rule.
pub fn boundary_integral(model: &LocalModel, pdot: &HolomorphicPoly, n_theta: usize) -> Result<f64> {
    let radius = model.radius;
    let mut acc = 0.0;
    for &th in &trapezoid_angles(n_theta) {
        let z = C64::from_polar(radius, th);
        acc += model.beta_t(pdot, z, C64::new(0.0, 1.0) * z)?;
    }
    Ok(acc * TAU / n_theta as f64)
}

#[derive(Debug, Clone, Serialize)]
pub struct StokesReport {
    pub t: f64,
    /// `int_D delta(model, X; inf, inf)`.
    pub lhs: f64,
    /// `oint beta_t`.
    pub rhs: f64,
    pub rel_err: f64,
    /// Relative change of `lhs` on the half grid.
    pub drift: f64,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Compare the disk integral of the model-versus-limit density with the
/// boundary integral of `beta_t`.
pub fn stokes_check(model: &LocalModel, pdot: &HolomorphicPoly, grid: DiskGrid) -> Result<StokesReport> {
    let p1 = Pair::new(Which::Model, Nu::X);
    let p2 = Pair::new(Which::Inf, Nu::Inf);
    let f = |z: C64| delta_fast(model, pdot, p1, p2, z);
    let breaks = model_breaks(model, &[]);
    let lhs = integrate_disk_panels(&f, &breaks, CELL_POINTS, grid.n_theta)?;
    let half = integrate_disk_panels(&f, &breaks, CELL_POINTS / 2, grid.halved().n_theta)?;
    let rhs = boundary_integral(model, pdot, grid.n_theta.max(64))?;
    let zero = lhs == 0.0 && rhs == 0.0;
    Ok(StokesReport {
        t: model.t,
        lhs,
        rhs,
        rel_err: if zero { 0.0 } else { rel(lhs, rhs) },
        drift: if lhs == 0.0 { 0.0 } else { rel(lhs, half) },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaDecomposition {
    pub t: f64,
    pub term_app_vs_model: f64,
    pub term_model_vs_inf: f64,
    /// Direct `int delta(app; inf)`.
    pub total: f64,
    /// `term_model_vs_inf` computed as a disk integral, for comparison with
    /// the boundary form.
    pub term_model_vs_inf_disk: f64,
    pub drift: f64,
}

/// Telescoped and direct disk integrals of `delta` at one `t`.
pub fn decompose(model: &LocalModel, pdot: &HolomorphicPoly, dev: &FourierRadialField, grid: DiskGrid) -> Result<DeltaDecomposition> {
    let app = Pair::new(Which::App, Nu::App(dev));
    let mdl = Pair::new(Which::Model, Nu::X);
    let inf = Pair::new(Which::Inf, Nu::Inf);
    let breaks = model_breaks(model, &[]);
    let nt = grid.n_theta;
    let a = integrate_disk_panels(&|z| delta_fast(model, pdot, app, mdl, z), &breaks, CELL_POINTS, nt)?;
    let a_half =
        integrate_disk_panels(&|z| delta_fast(model, pdot, app, mdl, z), &breaks, CELL_POINTS / 2, grid.halved().n_theta)?;
    let b = boundary_integral(model, pdot, nt.max(64))?;
    let b_disk = integrate_disk_panels(&|z| delta_fast(model, pdot, mdl, inf, z), &breaks, CELL_POINTS, nt)?;
    let total = integrate_disk_panels(&|z| delta_fast(model, pdot, app, inf, z), &breaks, CELL_POINTS, nt)?;
    Ok(DeltaDecomposition {
        t: model.t,
        term_app_vs_model: a,
        term_model_vs_inf: b,
        total,
        term_model_vs_inf_disk: b_disk,
        drift: if a == 0.0 { 0.0 } else { rel(a, a_half) },
    })
}

/// One row of a decay scan.
#[derive(Debug, Clone, Serialize)]
pub struct DecayRow {
    pub t: f64,
    pub g_app: f64,
    pub g_sf: f64,
    pub diff: f64,
    pub term_app_model: f64,
    pub term_model_inf: f64,
    pub drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelFit {
    pub gamma_fit: f64,
    pub gamma_predicted: f64,
    pub r_squared: f64,
    pub fit_window: (f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct GridInfo {
    pub n_r: usize,
    pub n_theta: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Annulus {
    pub r1: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub t_values: Vec<f64>,
    pub diff_values: Vec<f64>,
    pub gamma_fit: f64,
    pub gamma_predicted: f64,
    pub fit_window: (f64, f64),
    pub r_squared: f64,
    pub grid: GridInfo,
    pub annulus: Annulus,
    /// `(8/3) R^{3/2}` for `R = r1, r2`.
    pub gamma_candidates: Vec<(f64, f64)>,
    /// Radius whose boundary rate is nearest to `gamma_fit`.
    pub mechanism_radius: f64,
    pub strictly_decreasing: bool,
    /// Fit of the model-versus-limit term against the rate at `R = r2`.
    pub model_inf: ChannelFit,
    /// Fit of the app-versus-model term against the rate at `R = r1`.
    pub app_model: ChannelFit,
    pub rows: Vec<DecayRow>,
}

/// `(8/3) R^{3/2}`: the `t`-rate of `e^{-2u_t} - 1` at `|z| = R`.
pub fn boundary_rate(radius: f64) -> f64 {
    8.0 / 3.0 * radius.powf(1.5)
}

/// Semiflat disk value `int 2 t^2 |Pdot|^2 / |z| dA`.
pub fn g_sf_disk(pdot: &HolomorphicPoly, t: f64, radius: f64, grid: DiskGrid) -> Result<f64> {
    let f = |z: C64| Ok(2.0 * t * t * pdot.eval(z).norm_sqr() / z.norm());
    integrate_disk(&f, radius, &[], grid)
}

fn window_fit(t: &[f64], y: &[f64], floor: f64, gamma_predicted: f64) -> Result<ChannelFit> {
    let idx: Vec<usize> = (0..t.len()).filter(|&i| y[i].abs() > floor && y[i].is_finite()).collect();
    if idx.len() < 3 {
        return Err(Error::DegenerateFit(format!("only {} points above the noise floor {floor:.2e}", idx.len())));
    }
    // keep the leading contiguous run
    let mut run = vec![idx[0]];
    for w in idx.windows(2) {
        if w[1] != w[0] + 1 {
            break;
        }
        run.push(w[1]);
    }
    let x: Vec<f64> = run.iter().map(|&i| t[i]).collect();
    let v: Vec<f64> = run.iter().map(|&i| y[i]).collect();
    let LineFit { slope, r_squared, .. } = log_fit(&x, &v)?;
    Ok(ChannelFit { gamma_fit: -slope, gamma_predicted, r_squared, fit_window: (x[0], x[x.len() - 1]) })
}

/// Default ray: 12 log-spaced values in `[3, 24]`.
pub fn default_t_grid() -> Vec<f64> {
    (0..12).map(|i| 3.0 * 8f64.powf(i as f64 / 11.0)).collect()
}

/// Compute `g_app - g_sf` on the disk along `t_grid` and fit the decay.
pub fn decay_scan(
    u1: &RadialProfile,
    cutoff: Cutoff,
    pdot: &HolomorphicPoly,
    t_grid: &[f64],
    grid: DiskGrid,
    var: VarGrid,
) -> Result<DecayReport> {
    if t_grid.len() < 6 {
        return Err(Error::Invalid(format!("need at least 6 values of t, got {}", t_grid.len())));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) || t_grid[0] < 2.0 {
        return Err(Error::Invalid("t grid must be increasing with t >= 2".into()));
    }
    let rows: Vec<DecayRow> = t_grid
        .par_iter()
        .map(|&t| {
            let model = LocalModel::new(u1, t, cutoff)?;
            let dev = solve_deviation(&model, pdot, &var)?;
            let dd = decompose(&model, pdot, &dev, grid)?;
            let g_sf = g_sf_disk(pdot, t, model.radius, grid)?;
            let diff = dd.term_app_vs_model + dd.term_model_vs_inf;
            Ok(DecayRow {
                t,
                g_app: g_sf + diff,
                g_sf,
                diff,
                term_app_model: dd.term_app_vs_model,
                term_model_inf: dd.term_model_vs_inf,
                drift: dd.drift,
            })
        })
        .collect::<Result<_>>()?;
    let t: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let diff: Vec<f64> = rows.iter().map(|r| r.diff).collect();
    let floor = 1e3 * f64::EPSILON * rows.iter().map(|r| r.g_sf.abs()).fold(0.0, f64::max);
    let cands = vec![(cutoff.r1, boundary_rate(cutoff.r1)), (cutoff.r2, boundary_rate(cutoff.r2))];
    let total = window_fit(&t, &diff, floor, f64::NAN)?;
    let (mech, pred) = cands
        .iter()
        .copied()
        .min_by(|a, b| {
            let da = (total.gamma_fit / a.1).ln().abs();
            let db = (total.gamma_fit / b.1).ln().abs();
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    let mi: Vec<f64> = rows.iter().map(|r| r.term_model_inf).collect();
    let am: Vec<f64> = rows.iter().map(|r| r.term_app_model).collect();
    // the boundary form has no cancellation, so only underflow limits it
    let model_inf = window_fit(&t, &mi, f64::MIN_POSITIVE, boundary_rate(cutoff.r2))?;
    let app_model = window_fit(&t, &am, floor, boundary_rate(cutoff.r1))?;
    let strictly_decreasing = diff.windows(2).all(|w| w[1].abs() < w[0].abs());
    Ok(DecayReport {
        t_values: t,
        diff_values: diff,
        gamma_fit: total.gamma_fit,
        gamma_predicted: pred,
        fit_window: total.fit_window,
        r_squared: total.r_squared,
        grid: GridInfo { n_r: grid.n_r, n_theta: grid.n_theta },
        annulus: Annulus { r1: cutoff.r1, r2: cutoff.r2 },
        gamma_candidates: cands,
        mechanism_radius: mech,
        strictly_decreasing,
        model_inf,
        app_model,
        rows,
    })
}

impl DecayReport {
    /// `t,g_app,g_sf,diff,term_app_model,term_model_inf` rows.
    pub fn csv_rows(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| vec![r.t, r.g_app, r.g_sf, r.diff, r.term_app_model, r.term_model_inf])
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SfConsistency {
    /// Disk value of the semiflat density with `nu_inf` (matrix path).
    pub lhs: f64,
    /// `2 int |tau|^2` over the double cover, in the cover coordinate
    /// `w^2 = z` where `tau = Pdot(w^2) dw`.
    pub rhs: f64,
    pub rel_err: f64,
    pub drift: f64,
}

/// Semiflat metric on the unit disk against twice the cover integral of
/// `|Pdot / (2 sqrt z) dz|^2`, both with `<a, a> = i a ^ conj(a) = 2 |a|^2 dA`.
pub fn sf_disk_consistency(pdot: &HolomorphicPoly, grid: DiskGrid) -> Result<SfConsistency> {
    let h = crate::defalg::HermitianField::su2(None);
    let phi_f = phi_field();
    let pd_f = phi_dot_field(pdot);
    let zero = CMat::zeros(2, 2);
    let lhs_fn = |z: C64| -> Result<f64> {
        let f = pdot.eval(z) / (2.0 * z);
        let nu = sigma3() * (-0.5 * f);
        Ok(l2_density_point(&zero, &zero, &pd_f.eval(z)?, &nu, &phi_f.eval(z)?, &h.eval(z)?)?.re)
    };
    let lhs = integrate_disk(&lhs_fn, 1.0, &[], grid)?;
    let lhs_half = integrate_disk(&lhs_fn, 1.0, &[], grid.halved())?;
    let rhs_fn = |w: C64| Ok(2.0 * 2.0 * pdot.eval(w * w).norm_sqr());
    let rhs = integrate_disk(&rhs_fn, 1.0, &[], grid)?;
    let zero_case = lhs == 0.0 && rhs == 0.0;
    Ok(SfConsistency {
        lhs,
        rhs,
        rel_err: if zero_case { 0.0 } else { rel(lhs, rhs) },
        drift: if lhs == 0.0 { 0.0 } else { rel(lhs, lhs_half) },
    })
}

/// Closed form of `int_D |Pdot|^2 / |z| dA` for `Pdot = sum a_n z^n` on the
/// unit disk: `2 pi sum |a_n|^2 / (2n + 1)`.
pub fn weighted_norm_closed_form(pdot: &HolomorphicPoly) -> f64 {
    pdot.coeffs.iter().enumerate().map(|(n, a)| 2.0 * PI * a.norm_sqr() / (2 * n + 1) as f64).sum()
}

/// Largest ratio `|e^{-2u} - e^{-2u chi}| / |e^{-2u} - 1|` on the annulus.
pub fn subclaim_5a_ratio(model: &LocalModel, n: usize) -> Result<f64> {
    let (r1, r2) = (model.cutoff.r1, model.cutoff.r2);
    let mut worst = 0.0f64;
    for i in 0..n {
        let r = r1 * (r2 / r1).powf((i as f64 + 0.5) / n as f64);
        let (u, _) = model.u_at(r)?;
        let c = model.cutoff.eval(r).0;
        let num = ((-2.0 * u * c).exp() * (-2.0 * u * (1.0 - c)).exp_m1()).abs();
        let den = (-2.0 * u).exp_m1().abs();
        worst = worst.max(num / den);
    }
    Ok(worst)
}
