//! The radial model ODE `u'' + u'/r = 8 t^2 r sinh(2u)` with a `-1/2 log r`
//! singularity at the origin and Bessel decay `u ~ K0(8 t r^{3/2}/3)/pi`.
//!
//! In the log variable `s = ln r` the equation reads `u_ss = 8 t^2 e^{3s}
//! sinh(2u)`, which has no first-derivative term. It is discretised with
//! Numerov's fourth-order three-point scheme on a uniform `s` grid and
//! solved by damped Newton iteration on the tridiagonal Jacobian.

use crate::interp::{locate, quintic_hermite};
use crate::linalg::Tridiagonal;
use crate::report::write_csv;
use crate::specfn;
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;
use std::path::Path;

/// Newton tolerance on the scaled discrete residual.
pub const NEWTON_TOL: f64 = 1e-12;
const MAX_NEWTON: usize = 200;
/// Residual accepted when Newton steps have reached round-off size.
const ROUNDOFF_ACCEPT: f64 = 1e-9;

/// A sampled solution `u_t` on a log-uniform radial grid.
#[derive(Debug, Clone, Serialize)]
pub struct RadialProfile {
    /// Radii `r_0 < ... < r_N`, uniform in `ln r`.
    pub grid: Vec<f64>,
    /// `u(r_i)`.
    pub values: Vec<f64>,
    /// `u'(r_i)` with respect to `r`.
    pub derivs: Vec<f64>,
    pub t: f64,
    /// Connection constant: `u(r) + 1/2 log r -> c0` as `r -> 0`.
    pub c0: f64,
    /// Scaled residual of the discrete Numerov equations.
    pub newton_residual: f64,
    /// Scaled ODE residual of the solution measured with a five-point
    /// fourth-order stencil independent of the scheme.
    pub residual: f64,
    pub iterations: usize,
}

/// Right side `u_ss = 8 t^2 e^{3s} sinh(2u)` and its `u`-derivative.
#[inline]
fn rhs(t2r3: f64, u: f64) -> (f64, f64) {
    (8.0 * t2r3 * (2.0 * u).sinh(), 16.0 * t2r3 * (2.0 * u).cosh())
}

/// Bessel tail `K0(8 t r^{3/2}/3)/pi` and its `s`-derivative.
pub fn bessel_tail(t: f64, r: f64) -> Result<(f64, f64)> {
    let x = 8.0 * t * r.powf(1.5) / 3.0;
    let (k0, k1) = specfn::k0k1(x)?;
    Ok((k0 / PI, -1.5 * x * k1 / PI))
}

/// Solve for `u_1` on `[r_min, r_max]` with `n_nodes` log-spaced nodes.
pub fn solve_u1(r_min: f64, r_max: f64, n_nodes: usize) -> Result<RadialProfile> {
    solve_at_t(1.0, r_min, r_max, n_nodes)
}

/// Solve the model ODE directly at scale `t` (used to check the rescaling law).
pub fn solve_at_t(t: f64, r_min: f64, r_max: f64, n_nodes: usize) -> Result<RadialProfile> {
    if !(r_min > 0.0 && r_min < 1.0 && r_max > 1.0) {
        return Err(Error::Invalid(format!(
            "need 0 < r_min < 1 < r_max, got [{r_min}, {r_max}]"
        )));
    }
    if n_nodes < 200 {
        return Err(Error::Invalid(format!("need at least 200 nodes, got {n_nodes}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Invalid(format!("scale t must be positive, got {t}")));
    }
    let n = n_nodes;
    let s0 = r_min.ln();
    let h = (r_max.ln() - s0) / (n - 1) as f64;
    let s: Vec<f64> = (0..n).map(|i| s0 + h * i as f64).collect();
    let r: Vec<f64> = s.iter().map(|v| v.exp()).collect();
    let t2 = t * t;
    let w: Vec<f64> = r.iter().map(|ri| t2 * ri * ri * ri).collect();
    let tail_last = bessel_tail(t, r[n - 1])?.0;

    let mut u: Vec<f64> = r
        .iter()
        .map(|&ri| {
            let tail = bessel_tail(t, ri).map(|v| v.0).unwrap_or(0.0);
            (-0.5 * ri.ln()).max(tail)
        })
        .collect();

    let h2 = h * h;
    let residuals = |u: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let f: Vec<f64> = u.iter().zip(&w).map(|(&ui, &wi)| rhs(wi, ui).0).collect();
        let mut e = vec![0.0; n];
        e[0] = (u[1] + 0.5 * s[1]) - (u[0] + 0.5 * s[0])
            - t2 * (2.0 * u[0]).exp() * r[0] * (r[1] * r[1] - r[0] * r[0]);
        for i in 1..n - 1 {
            e[i] = u[i + 1] - 2.0 * u[i] + u[i - 1] - h2 / 12.0 * (f[i + 1] + 10.0 * f[i] + f[i - 1]);
        }
        e[n - 1] = u[n - 1] - tail_last;
        (e, f)
    };
    let scaled = |e: &[f64], f: &[f64]| -> f64 {
        let mut m = (e[0] / h2).abs().max(e[n - 1].abs());
        for i in 1..n - 1 {
            m = m.max((e[i] / h2).abs() / (1.0 + f[i].abs()));
        }
        m
    };

    let (mut e, mut f) = residuals(&u);
    let mut res = scaled(&e, &f);
    let mut iterations = 0;
    while res > NEWTON_TOL {
        if iterations >= MAX_NEWTON {
            return Err(Error::NonConvergence("model ODE Newton".into(), res));
        }
        iterations += 1;
        let mut jac = Tridiagonal::<f64>::zeros(n);
        jac.diag[0] = -1.0 - 2.0 * t2 * (2.0 * u[0]).exp() * r[0] * (r[1] * r[1] - r[0] * r[0]);
        jac.upper[0] = 1.0;
        for i in 1..n - 1 {
            let dm = rhs(w[i - 1], u[i - 1]).1;
            let d0 = rhs(w[i], u[i]).1;
            let dp = rhs(w[i + 1], u[i + 1]).1;
            jac.lower[i] = 1.0 - h2 / 12.0 * dm;
            jac.diag[i] = -2.0 - h2 / 12.0 * 10.0 * d0;
            jac.upper[i] = 1.0 - h2 / 12.0 * dp;
        }
        jac.diag[n - 1] = 1.0;
        let neg: Vec<f64> = e.iter().map(|v| -v).collect();
        let du = jac.solve(&neg)?;
        let big = du.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        // Backtracking on the scaled residual; also cap steps in u.
        let mut lam = if big > 1.0 { 1.0 / big } else { 1.0 };
        let mut stalled = false;
        loop {
            let trial: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a + lam * b).collect();
            let (et, ft) = residuals(&trial);
            let rt = scaled(&et, &ft);
            if rt.is_finite() && rt < res {
                u = trial;
                e = et;
                f = ft;
                res = rt;
                break;
            }
            lam *= 0.5;
            if lam < 1e-8 {
                stalled = true;
                break;
            }
        }
        if stalled {
            // No descent direction left: accept if already at round-off level.
            if res <= ROUNDOFF_ACCEPT {
                break;
            }
            return Err(Error::NonConvergence("model ODE line search".into(), res));
        }
    }

    let us = node_slopes(&u, &f, &r, h, t)?;
    let derivs: Vec<f64> = us.iter().zip(&r).map(|(a, b)| a / b).collect();
    let v0 = u[0] + 0.5 * s[0];
    let c0 = v0 - t2 * (2.0 * v0).exp() * r[0] * r[0];
    let residual = five_point_residual(&u, &f, h);
    Ok(RadialProfile {
        grid: r,
        values: u,
        derivs,
        t,
        c0,
        newton_residual: res,
        residual,
        iterations,
    })
}

/// Fourth-order node slopes `u_s` consistent with the Numerov scheme.
fn node_slopes(u: &[f64], f: &[f64], r: &[f64], h: f64, t: f64) -> Result<Vec<f64>> {
    let n = u.len();
    let mut us = vec![0.0; n];
    let v0 = u[0] + 0.5 * r[0].ln();
    us[0] = -0.5 + 2.0 * t * t * (2.0 * v0).exp() * r[0] * r[0];
    for i in 1..n - 1 {
        us[i] = (u[i + 1] - u[i - 1]) / (2.0 * h) - h / 12.0 * (f[i + 1] - f[i - 1]);
    }
    let (tv, td) = bessel_tail(t, r[n - 1])?;
    us[n - 1] = if tv > 0.0 { u[n - 1] * td / tv } else { 0.0 };
    Ok(us)
}

fn five_point_residual(u: &[f64], f: &[f64], h: f64) -> f64 {
    let n = u.len();
    let mut m = 0.0f64;
    for i in 2..n - 2 {
        let d2 = (-u[i + 2] + 16.0 * u[i + 1] - 30.0 * u[i] + 16.0 * u[i - 1] - u[i - 2])
            / (12.0 * h * h);
        m = m.max((d2 - f[i]).abs() / (1.0 + f[i].abs()));
    }
    m
}

impl RadialProfile {
    pub fn r_min(&self) -> f64 {
        self.grid[0]
    }

    pub fn r_max(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// `u_t(r) = u_1(t^{2/3} r)` from a `t = 1` profile.
    pub fn rescale(&self, t: f64) -> Result<RadialProfile> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Invalid(format!("scale t must be positive, got {t}")));
        }
        if (self.t - 1.0).abs() > 1e-15 {
            return Err(Error::Invalid("rescale expects a t = 1 profile".into()));
        }
        let k = t.powf(2.0 / 3.0);
        Ok(RadialProfile {
            grid: self.grid.iter().map(|r| r / k).collect(),
            values: self.values.clone(),
            derivs: self.derivs.iter().map(|d| d * k).collect(),
            t,
            c0: self.c0 - t.ln() / 3.0,
            ..self.clone()
        })
    }

    /// Second `s`-derivative from the ODE at node `i`.
    fn uss(&self, i: usize) -> f64 {
        let r = self.grid[i];
        8.0 * self.t * self.t * r * r * r * (2.0 * self.values[i]).sinh()
    }

    /// `(u(r), u'(r))` by quintic Hermite interpolation in `ln r` using the
    /// stored values, slopes and the ODE's second derivative.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        let (lo, hi) = (self.r_min(), self.r_max());
        if !(r >= lo * (1.0 - 1e-14) && r <= hi * (1.0 + 1e-14)) {
            return Err(Error::OutOfRange { x: r, lo, hi });
        }
        let r = r.clamp(lo, hi);
        let i = match locate(&self.grid, r) {
            Ok(i) => return Ok((self.values[i], self.derivs[i])),
            Err(i) => i,
        };
        let (sa, sb) = (self.grid[i].ln(), self.grid[i + 1].ln());
        let d = sb - sa;
        let tau = (r.ln() - sa) / d;
        let a = [self.values[i], self.derivs[i] * self.grid[i], self.uss(i)];
        let b = [self.values[i + 1], self.derivs[i + 1] * self.grid[i + 1], self.uss(i + 1)];
        let (u, us) = quintic_hermite(tau, d, a, b);
        Ok((u, us / r))
    }

    /// Like [`eval`](Self::eval) but continues past the grid: below `r_min`
    /// with the regular expansion `-1/2 log r + c0 + t^2 e^{2 c0} r^2`, above
    /// `r_max` with the Bessel tail matched to the last node.
    pub fn eval_extended(&self, r: f64) -> Result<(f64, f64)> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("u_t needs r > 0, got {r}")));
        }
        if r < self.r_min() {
            let a = self.t * self.t * (2.0 * self.c0).exp();
            let u = -0.5 * r.ln() + self.c0 + a * r * r;
            let du = -0.5 / r + 2.0 * a * r;
            return Ok((u, du));
        }
        if r > self.r_max() {
            let (tn, _) = bessel_tail(self.t, self.r_max())?;
            let amp = if tn > 0.0 { self.values[self.len() - 1] / tn } else { 1.0 };
            let (v, ds) = bessel_tail(self.t, r)?;
            return Ok((amp * v, amp * ds / r));
        }
        self.eval(r)
    }

    /// Write `r,u,du_dr` rows with 17 significant digits.
    pub fn write_csv(&self, path: &Path, preamble: &[String]) -> std::io::Result<()> {
        write_csv(
            path,
            preamble,
            "r,u,du_dr",
            (0..self.len()).map(|i| vec![self.grid[i], self.values[i], self.derivs[i]]),
        )
    }

    /// Largest `|pi u(r) / K0(8 t r^{3/2}/3) - 1|` over grid nodes in `[a, b]`.
    pub fn bessel_match(&self, a: f64, b: f64) -> Result<f64> {
        let mut worst = 0.0f64;
        for (i, &r) in self.grid.iter().enumerate() {
            if r < a || r > b {
                continue;
            }
            let k = bessel_tail(self.t, r)?.0;
            worst = worst.max((self.values[i] / k - 1.0).abs());
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_solve_converges() {
        let p = solve_u1(1e-3, 8.0, 400).unwrap();
        assert!(p.newton_residual <= ROUNDOFF_ACCEPT);
        assert!(p.residual <= 1e-6);
        assert!(p.values.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn eval_hits_nodes() {
        let p = solve_u1(1e-3, 8.0, 400).unwrap();
        for i in [0, 17, 200, 399] {
            let (u, _) = p.eval(p.grid[i]).unwrap();
            assert_eq!(u, p.values[i]);
        }
        assert!(p.eval(1e-4).is_err());
    }

    #[test]
    fn bad_arguments() {
        assert!(solve_u1(2.0, 12.0, 400).is_err());
        assert!(solve_u1(1e-4, 0.5, 400).is_err());
        assert!(solve_u1(1e-4, 12.0, 100).is_err());
    }
}
