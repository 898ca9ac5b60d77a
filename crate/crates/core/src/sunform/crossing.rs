//! Discriminants, the simple-crossing test and the root-to-coefficient map.

use super::rational::PolyMatrix;
use crate::defalg::CMat;
use crate::poly::HolomorphicPoly;
use crate::{Error, Result, C64};
use std::f64::consts::TAU;

/// Characteristic polynomial `det(x - M)` by Faddeev-LeVerrier, as a
/// polynomial in `x` with ascending coefficients.
pub fn char_poly(m: &CMat) -> HolomorphicPoly {
    let n = m.nrows();
    let mut c = vec![C64::new(0.0, 0.0); n + 1];
    c[n] = C64::new(1.0, 0.0);
    let mut mk = CMat::zeros(n, n);
    for k in 1..=n {
        mk = m * &mk + CMat::identity(n, n) * c[n - k + 1];
        c[n - k] = -(m * &mk).trace() / k as f64;
    }
    HolomorphicPoly::new(c)
}

fn eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    match m.clone().eigenvalues() {
        Some(v) => Ok(v.iter().copied().collect()),
        None => char_poly(m).roots(),
    }
}

/// `prod_{i<j} (lambda_i - lambda_j)^2` of the matrix value `m`.
pub fn discriminant(m: &CMat) -> Result<C64> {
    let ev = eigenvalues(m)?;
    let mut d = C64::new(1.0, 0.0);
    for i in 0..ev.len() {
        for j in i + 1..ev.len() {
            let e = ev[i] - ev[j];
            d *= e * e;
        }
    }
    Ok(d)
}

/// The discriminant of a polynomial matrix as a polynomial in `z`, by exact
/// interpolation at roots of unity on the circle `|z| = radius`.
pub fn discriminant_poly(phi: &PolyMatrix, radius: f64) -> Result<HolomorphicPoly> {
    let n = phi.rows;
    let d = phi.entries.iter().filter_map(|e| e.degree()).max().unwrap_or(0);
    let deg = n * n.saturating_sub(1) * d;
    let m = deg + 1;
    let vals: Vec<C64> = (0..m)
        .map(|j| discriminant(&phi.eval(C64::from_polar(radius, TAU * j as f64 / m as f64))))
        .collect::<Result<_>>()?;
    let coeffs = (0..m)
        .map(|k| {
            let s: C64 = vals
                .iter()
                .enumerate()
                .map(|(j, v)| v * C64::from_polar(1.0, -TAU * (j * k) as f64 / m as f64))
                .sum();
            s / (m as f64 * radius.powi(k as i32))
        })
        .collect::<Vec<_>>();
    let scale = coeffs.iter().fold(0.0f64, |a, c| a.max(c.norm()));
    let clean = coeffs.into_iter().map(|c| if c.norm() <= 1e-13 * scale { C64::new(0.0, 0.0) } else { c }).collect();
    Ok(HolomorphicPoly::new(clean))
}

/// Scaled distance of the characteristic polynomial at `m` from having a
/// root of multiplicity three or more: the minimum over roots `mu` of
/// `p''` of `max(|p(mu)|, |p'(mu)|)`, each relative to the polynomial's
/// coefficient sum at the root-size scale `max(1, |mu|, max |a_k|^(1/(n-k)))`.
pub fn triple_root_indicator(m: &CMat) -> Result<f64> {
    let n = m.nrows();
    if n < 3 {
        return Ok(f64::INFINITY);
    }
    let p = char_poly(m);
    let root_scale = (0..n).fold(1.0f64, |a, k| a.max(p.coeff(k).norm().powf(1.0 / (n - k) as f64)));
    let rel = |q: &HolomorphicPoly, mu: C64| {
        let s = root_scale.max(mu.norm());
        let den: f64 = q.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c.norm());
        if den == 0.0 {
            0.0
        } else {
            q.eval(mu).norm() / den
        }
    };
    let d1 = p.derivative();
    let d2 = d1.derivative();
    let mut best = f64::INFINITY;
    for mu in d2.roots()? {
        best = best.min(rel(&p, mu).max(rel(&d1, mu)));
    }
    Ok(best)
}

/// Tolerance on [`triple_root_indicator`].
pub const TRIPLE_TOL: f64 = 1e-9;

/// Centre plus a polar grid of the disk.
pub fn crossing_samples(radius: f64) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0)];
    for i in 1..=8 {
        for k in 0..16 {
            v.push(C64::from_polar(radius * i as f64 / 8.0, TAU * (k as f64 + 0.5 * (i % 2) as f64) / 16.0));
        }
    }
    v
}

/// Whether only pairs of eigenvalues come together on the disk.
///
/// Tests the sample set and every zero of the discriminant inside the
/// disk containing the samples (clustered roots are averaged before the
/// test) for a characteristic root of multiplicity three or more.
pub fn check_simple_crossing(phi: &PolyMatrix, samples: &[C64]) -> bool {
    if phi.rows < 3 {
        return true;
    }
    let radius = samples.iter().fold(0.0f64, |a, z| a.max(z.norm())).max(1e-3);
    let mut points: Vec<C64> = samples.to_vec();
    if let Ok(dp) = discriminant_poly(phi, radius) {
        if dp.degree().unwrap_or(0) > 0 {
            if let Ok(roots) = dp.roots() {
                points.extend(cluster_means(&roots, 1e-5).into_iter().filter(|z| z.norm() <= radius * (1.0 + 1e-9)));
            }
        }
    }
    points.iter().all(|&z| matches!(triple_root_indicator(&phi.eval(z)), Ok(t) if t > TRIPLE_TOL))
}

fn cluster_means(roots: &[C64], tol: f64) -> Vec<C64> {
    let mut used = vec![false; roots.len()];
    let mut out = Vec::new();
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        let mut members = vec![roots[i]];
        used[i] = true;
        for j in i + 1..roots.len() {
            if !used[j] && (roots[j] - roots[i]).norm() <= tol * (1.0 + roots[i].norm()) {
                used[j] = true;
                members.push(roots[j]);
            }
        }
        out.push(members.iter().sum::<C64>() / members.len() as f64);
    }
    out
}

/// First-order variation of the coefficients of `prod (x - lambda_i)` when
/// the roots move by `lambda_dots`, in descending order `(x^n, ..., 1)`.
pub fn roots_to_coeffs_deriv(lambdas: &[C64], lambda_dots: &[C64]) -> Result<Vec<C64>> {
    if lambdas.len() != lambda_dots.len() {
        return Err(Error::Invalid("root and variation lengths differ".into()));
    }
    let n = lambdas.len();
    let mut acc = HolomorphicPoly::zero();
    for i in 0..n {
        let term = (0..n)
            .filter(|&k| k != i)
            .fold(HolomorphicPoly::constant(C64::new(1.0, 0.0)), |p, k| {
                p.mul(&HolomorphicPoly::new(vec![-lambdas[k], C64::new(1.0, 0.0)]))
            });
        acc = acc.add(&term.scale(lambda_dots[i]));
    }
    let mut v: Vec<C64> = (0..=n).map(|k| -acc.coeff(k)).collect();
    v.reverse();
    Ok(v)
}

/// `[prod_{k != i} (x_j - lambda_k)]_{j,i}` at the probe points `x_j`; the
/// linear map `lambda_dot -> variation` evaluated there.
pub fn vertical_matrix(lambdas: &[C64], probes: &[C64]) -> CMat {
    CMat::from_fn(probes.len(), lambdas.len(), |j, i| {
        (0..lambdas.len()).filter(|&k| k != i).map(|k| probes[j] - lambdas[k]).product()
    })
}
