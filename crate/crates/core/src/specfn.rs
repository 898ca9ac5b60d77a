//! Modified Bessel functions `K0` and `K1` of real positive argument.
//!
//! Three evaluation branches cover `(0, inf)`:
//! power series for `x <= 2`, Steed's continued fraction for `2 < x <= 25`
//! and the Hankel asymptotic series beyond. A quadrature of
//! `int_0^inf exp(-x cosh s) ds` serves as an independent reference.

use crate::quad;
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Upper end of the power-series branch.
pub const SERIES_MAX: f64 = 2.0;
/// Upper end of the continued-fraction branch.
pub const CF_MAX: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Series,
    ContinuedFraction,
    Asymptotic,
    Quadrature,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BesselEval {
    pub x: f64,
    pub value: f64,
    pub method: Method,
}

fn check(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("K0 needs x > 0, got {x}")))
    }
}

/// Branch selected by [`k0`] for a given argument.
pub fn method_for(x: f64) -> Method {
    if x <= SERIES_MAX {
        Method::Series
    } else if x <= CF_MAX {
        Method::ContinuedFraction
    } else {
        Method::Asymptotic
    }
}

/// `K0(x)` with the branch that produced it.
pub fn k0_eval(x: f64) -> Result<BesselEval> {
    check(x)?;
    let method = method_for(x);
    let value = k0k1_with(x, method).0;
    Ok(BesselEval { x, value, method })
}

/// `K0(x)`. Underflows to zero for `x` above roughly 700.
pub fn k0(x: f64) -> Result<f64> {
    check(x)?;
    Ok(k0k1_with(x, method_for(x)).0)
}

/// `K1(x) = -K0'(x)`.
pub fn k1(x: f64) -> Result<f64> {
    check(x)?;
    Ok(k0k1_with(x, method_for(x)).1)
}

/// `(K0(x), K1(x))` from one evaluation.
pub fn k0k1(x: f64) -> Result<(f64, f64)> {
    check(x)?;
    Ok(k0k1_with(x, method_for(x)))
}

/// `exp(x) K0(x)`, finite for all large `x`.
pub fn k0_scaled(x: f64) -> Result<f64> {
    check(x)?;
    Ok(match method_for(x) {
        Method::Series => series(x).0 * x.exp(),
        Method::ContinuedFraction => steed_scaled(x).0,
        _ => asymptotic_scaled(x).0,
    })
}

/// Evaluate with an explicit branch. Used for crossover checks.
///
/// `Method::Quadrature` returns the reference integral for `K0` and a
/// difference quotient of it for `K1`.
pub fn k0k1_with(x: f64, method: Method) -> (f64, f64) {
    match method {
        Method::Series => series(x),
        Method::ContinuedFraction => {
            let (a, b) = steed_scaled(x);
            let e = (-x).exp();
            (a * e, b * e)
        }
        Method::Asymptotic => {
            let (a, b) = asymptotic_scaled(x);
            let e = (-x).exp();
            (a * e, b * e)
        }
        Method::Quadrature => {
            let k = k0_quadrature(x);
            let k1 = quad::adaptive(
                |s| (-x * (s.cosh() - 1.0)).exp() * s.cosh(),
                0.0,
                quadrature_cutoff(x),
                0.0,
                1e-14,
            ) * (-x).exp();
            (k, k1)
        }
    }
}

fn series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let lg = (0.5 * x).ln();
    // K0 = -(ln(x/2) + gamma) I0 + sum y^k/(k!)^2 H_k
    let mut term = 1.0; // y^k / (k!)^2
    let mut i0 = 1.0;
    let mut hsum = 0.0;
    let mut harm = 0.0;
    // K1 pieces: I1 = (x/2) sum y^k/(k!(k+1)!)
    let mut term1 = 1.0; // y^k / (k! (k+1)!)
    let mut i1s = 1.0;
    let mut psi_sum = (-EULER_GAMMA) + (1.0 - EULER_GAMMA);
    let mut k1s = psi_sum;
    for k in 1..60 {
        let kf = k as f64;
        term *= y / (kf * kf);
        term1 *= y / (kf * (kf + 1.0));
        harm += 1.0 / kf;
        i0 += term;
        hsum += term * harm;
        i1s += term1;
        // psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
        psi_sum = -2.0 * EULER_GAMMA + 2.0 * harm + 1.0 / (kf + 1.0);
        k1s += term1 * psi_sum;
        if term < 1e-18 * i0 && term1 < 1e-18 * i1s {
            break;
        }
    }
    let k0 = -(lg + EULER_GAMMA) * i0 + hsum;
    let i1 = 0.5 * x * i1s;
    let k1 = 1.0 / x + lg * i1 - 0.25 * x * k1s;
    (k0, k1)
}

/// Steed's continued fraction for `K_nu` at `nu = 0`, scaled by `exp(x)`.
fn steed_scaled(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

fn asymptotic_scaled(x: f64) -> (f64, f64) {
    let pre = (PI / (2.0 * x)).sqrt();
    let sum = |mu: f64| {
        let mut t = 1.0;
        let mut s = 1.0;
        let mut last = f64::INFINITY;
        for k in 1..200 {
            let odd = (2 * k - 1) as f64;
            t *= (mu - odd * odd) / (k as f64 * 8.0 * x);
            if t.abs() >= last {
                break;
            }
            s += t;
            last = t.abs();
            if last < 1e-17 * s.abs() {
                break;
            }
        }
        s
    };
    (pre * sum(0.0), pre * sum(4.0))
}

fn quadrature_cutoff(x: f64) -> f64 {
    (1.0 + 745.0 / x).acosh()
}

/// Reference value `K0(x) = int_0^inf exp(-x cosh s) ds` by adaptive
/// Gauss-Kronrod quadrature.
///
/// This is the cosine integral `int_0^inf cos(x t)/sqrt(t^2+1) dt` with the
/// contour rotated off the real axis, so the integrand decays doubly
/// exponentially and no cancellation occurs.
pub fn k0_quadrature(x: f64) -> f64 {
    let cut = quadrature_cutoff(x);
    // Split near the bulk so the adaptive rule does not skip it for large x.
    let knee = (1.0 + 40.0 / x).acosh().min(cut);
    let f = |s: f64| (-x * (s.cosh() - 1.0)).exp();
    let v = quad::adaptive(f, 0.0, knee, 0.0, 1e-15) + quad::adaptive(f, knee, cut, 0.0, 1e-15);
    v * (-x).exp()
}

/// The cosine integral `int_0^inf cos(x t)/sqrt(t^2+1) dt` evaluated on the
/// real axis: integrals between consecutive zeros of `cos(x t)` summed as an
/// alternating series and accelerated with Wynn's epsilon algorithm.
pub fn k0_cosine_integral(x: f64) -> Result<f64> {
    check(x)?;
    let f = |t: f64| (x * t).cos() / (t * t + 1.0).sqrt();
    let zero = |k: usize| (k as f64 + 0.5) * PI / x;
    let mut partial = Vec::with_capacity(64);
    let mut acc = quad::adaptive(f, 0.0, zero(0), 0.0, 1e-15);
    partial.push(acc);
    for k in 0..48 {
        acc += quad::adaptive(f, zero(k), zero(k + 1), 0.0, 1e-15);
        partial.push(acc);
    }
    Ok(wynn_epsilon(&partial))
}

/// Wynn's epsilon extrapolation of a sequence of partial sums.
fn wynn_epsilon(s: &[f64]) -> f64 {
    let n = s.len();
    let mut e0 = vec![0.0; n + 1];
    let mut e1: Vec<f64> = s.to_vec();
    let mut best = s[n - 1];
    let mut best_gap = f64::INFINITY;
    let mut col = 0;
    while e1.len() > 1 {
        let mut e2 = Vec::with_capacity(e1.len() - 1);
        for i in 0..e1.len() - 1 {
            let d = e1[i + 1] - e1[i];
            let v = if d == 0.0 { f64::INFINITY } else { e0[i + 1] + 1.0 / d };
            e2.push(v);
        }
        col += 1;
        if col % 2 == 0 && e2.len() >= 2 {
            let m = e2.len();
            let gap = (e2[m - 1] - e2[m - 2]).abs();
            if gap.is_finite() && gap < best_gap {
                best_gap = gap;
                best = e2[m - 1];
            }
        }
        if e2.iter().any(|v| !v.is_finite()) {
            break;
        }
        e0 = e1;
        e1 = e2;
    }
    best
}

/// `|x^2 y'' + x y' - x^2 y|` for `y = K0` by central differences of step `h`.
pub fn k0_ode_residual(x: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) || x - 2.0 * h <= 0.0 {
        return Err(Error::Domain(format!(
            "residual needs x > 2h > 0, got x = {x}, h = {h}"
        )));
    }
    let ym = k0(x - h)?;
    let y0 = k0(x)?;
    let yp = k0(x + h)?;
    let d2 = (yp - 2.0 * y0 + ym) / (h * h);
    let d1 = (yp - ym) / (2.0 * h);
    Ok((x * x * d2 + x * d1 - x * x * y0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches_meet_at_crossovers() {
        for &(x, a, b) in &[
            (SERIES_MAX, Method::Series, Method::ContinuedFraction),
            (CF_MAX, Method::ContinuedFraction, Method::Asymptotic),
        ] {
            let (ka, ja) = k0k1_with(x, a);
            let (kb, jb) = k0k1_with(x, b);
            assert!(((ka - kb) / kb).abs() < 1e-12, "K0 at {x}: {ka} vs {kb}");
            assert!(((ja - jb) / jb).abs() < 1e-12, "K1 at {x}: {ja} vs {jb}");
        }
    }

    #[test]
    fn k1_is_minus_derivative() {
        for &x in &[0.3f64, 1.5, 4.0, 12.0, 40.0] {
            let h = 1e-5 * x.min(1.0);
            let d = (k0(x + h).unwrap() - k0(x - h).unwrap()) / (2.0 * h);
            let k = k1(x).unwrap();
            assert!(((d + k) / k).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(k0(0.0).is_err());
        assert!(k0(-1.0).is_err());
        assert!(k0_ode_residual(1e-3, 1e-3).is_err());
    }
}
