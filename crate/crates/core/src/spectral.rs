//! Periods of planar quadratic differentials `q2(z) dz^2` and the leading
//! first-correction envelope built from the shortest saddle connection.
//!
//! Saddle connections are approximated by straight segments between zeros.
//! A segment stores `int sqrt(q2) dz` from zero `i` to zero `j`; the period
//! of the corresponding odd cycle on `y^2 = q2` is twice that value.

use crate::fit::{line_fit, LineFit};
use crate::poly::{HolomorphicPoly, PolyRole};
use crate::quad::GaussLegendre;
use crate::specfn::k0;
use crate::{Error, Result, C64};
use serde::Serialize;
use std::f64::consts::{FRAC_PI_4, PI};

/// Zeros closer than this are considered coincident.
pub const SIMPLE_TOL: f64 = 1e-8;
/// Radius within which approximate roots are tested for being one multiple
/// root.
pub const CLUSTER_TOL: f64 = 1e-5;
/// Segments passing closer than this to a third zero are not integrated.
pub const OBSTRUCTION_TOL: f64 = 1e-6;
/// Multiplier from a segment integral to the period of its cycle.
pub const CYCLE_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Zero {
    pub z: C64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadraticDifferential {
    #[serde(skip)]
    pub q2: HolomorphicPoly,
    pub zeros: Vec<Zero>,
    pub simple: bool,
    /// Worst relative backward error of the polished roots.
    pub backward_error: f64,
}

impl QuadraticDifferential {
    pub fn new(q2: HolomorphicPoly) -> Result<Self> {
        let q2 = q2.with_role(PolyRole::Q2);
        let roots = match q2.degree() {
            None => return Err(Error::Invalid("q2 is identically zero".into())),
            Some(0) => Vec::new(),
            Some(_) => q2.roots()?,
        };
        let backward_error = roots.iter().fold(0.0f64, |a, &z| a.max(q2.backward_error(z)));
        // Aberth separates a multiple root into a cluster of radius about
        // eps^(1/m); merge a cluster when `q2'` also vanishes at its mean.
        let dq = q2.derivative();
        let mut zeros: Vec<Zero> = Vec::new();
        let mut used = vec![false; roots.len()];
        for i in 0..roots.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let mut members = vec![roots[i]];
            for j in i + 1..roots.len() {
                if !used[j] && (roots[j] - roots[i]).norm() <= CLUSTER_TOL * (1.0 + roots[i].norm()) {
                    used[j] = true;
                    members.push(roots[j]);
                }
            }
            let mean = members.iter().sum::<C64>() / members.len() as f64;
            let merge = members.len() > 1
                && (members.iter().all(|r| (r - mean).norm() <= SIMPLE_TOL) || dq.backward_error(mean) <= 1e-9);
            if merge {
                zeros.push(Zero { z: mean, multiplicity: members.len() });
            } else {
                zeros.extend(members.into_iter().map(|z| Zero { z, multiplicity: 1 }));
            }
        }
        zeros.sort_by(|a, b| (a.z.re, a.z.im).partial_cmp(&(b.z.re, b.z.im)).unwrap());
        let simple = zeros.iter().all(|z| z.multiplicity == 1);
        Ok(Self { q2, zeros, simple, backward_error })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(HolomorphicPoly::from_real(coeffs))
    }
}

/// One straight saddle-connection candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegmentPeriod {
    pub i: usize,
    pub j: usize,
    /// `int_{z_i}^{z_j} sqrt(q2) dz` on the branch fixed at the midpoint.
    pub z: C64,
    /// `int |sqrt(q2)| |dz|`.
    pub m: f64,
    /// Largest phase change of the tracked root between consecutive nodes.
    pub max_phase_step: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Obstruction {
    pub i: usize,
    pub j: usize,
    /// The zero lying near the segment.
    pub k: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodTable {
    pub zeros: Vec<C64>,
    pub pairs: Vec<SegmentPeriod>,
    pub obstructed: Vec<Obstruction>,
    /// Shortest segment length.
    pub m: f64,
    pub argmin: (usize, usize),
    pub cycle_factor: f64,
}

impl PeriodTable {
    /// `|Z_gamma0| = 2 M`.
    pub fn z_gamma0(&self) -> f64 {
        CYCLE_FACTOR * self.m
    }

    /// Rows `i, j, re_Z, im_Z, M_ij`.
    pub fn csv_rows(&self) -> Vec<Vec<f64>> {
        self.pairs.iter().map(|p| vec![p.i as f64, p.j as f64, p.z.re, p.z.im, p.m]).collect()
    }
}

fn distance_to_segment(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let s = ((p - a) * d.conj()).re / d.norm_sqr();
    (p - (a + d * s.clamp(0.0, 1.0))).norm()
}

/// Integrate along the segment from zero `i` to zero `j`.
pub fn segment_period(q: &QuadraticDifferential, i: usize, j: usize) -> Result<SegmentPeriod> {
    let n = q.zeros.len();
    if i >= n || j >= n || i == j {
        return Err(Error::Invalid(format!("bad zero pair ({i}, {j})")));
    }
    let (a, b) = (q.zeros[i].z, q.zeros[j].z);
    for (k, zk) in q.zeros.iter().enumerate() {
        if k != i && k != j {
            let d = distance_to_segment(zk.z, a, b);
            if d < OBSTRUCTION_TOL {
                return Err(Error::BranchTracking(format!(
                    "zero {k} at {} lies {d:.2e} from segment ({i}, {j})",
                    zk.z
                )));
            }
        }
    }
    let mut nodes = 32;
    let mut prev = integrate_segment(&q.q2, a, b, nodes)?;
    loop {
        nodes *= 2;
        let cur = integrate_segment(&q.q2, a, b, nodes)?;
        let dz = (cur.0 - prev.0).norm();
        let dm = (cur.1 - prev.1).abs();
        if cur.2 < FRAC_PI_4 && dz <= 1e-13 * (1.0 + cur.0.norm()) && dm <= 1e-13 * (1.0 + cur.1) {
            return Ok(SegmentPeriod { i, j, z: cur.0, m: cur.1, max_phase_step: cur.2, nodes });
        }
        if nodes >= 8192 {
            return Err(Error::NonConvergence(format!("segment ({i}, {j}) quadrature"), dz.max(dm)));
        }
        prev = cur;
    }
}

/// Gauss-Legendre in `theta` with `s = (1 - cos theta)/2`, which removes
/// the square-root endpoint singularities. The root is continued by
/// nearest sign outward from the principal value at the midpoint.
fn integrate_segment(q2: &HolomorphicPoly, a: C64, b: C64, nodes: usize) -> Result<(C64, f64, f64)> {
    let gl = GaussLegendre::new(nodes);
    let pts: Vec<(f64, f64)> = gl.on(0.0, PI).collect();
    let d = b - a;
    let vals: Vec<(f64, C64, f64)> = pts
        .iter()
        .map(|&(th, w)| {
            let s = 0.5 * (1.0 - th.cos());
            (s, q2.eval(a + d * s).sqrt(), w * 0.5 * th.sin())
        })
        .collect();
    let mid = q2.eval(a + d * 0.5).sqrt();
    if mid.norm() == 0.0 {
        return Err(Error::BranchTracking("q2 vanishes at the segment midpoint".into()));
    }
    let split = vals.partition_point(|v| v.0 < 0.5);
    let mut roots = vec![C64::new(0.0, 0.0); vals.len()];
    let mut max_step = 0.0f64;
    let mut follow = |idx: &mut dyn Iterator<Item = usize>| {
        let mut prev = mid;
        for k in idx {
            let w = vals[k].1;
            let w = if (w - prev).norm() <= (w + prev).norm() { w } else { -w };
            if prev.norm() > 0.0 && w.norm() > 0.0 {
                max_step = max_step.max((w / prev).arg().abs());
            }
            roots[k] = w;
            prev = w;
        }
    };
    follow(&mut (split..vals.len()));
    follow(&mut (0..split).rev());
    let mut zsum = C64::new(0.0, 0.0);
    let mut msum = 0.0;
    for (k, &(_, _, w)) in vals.iter().enumerate() {
        zsum += roots[k] * w;
        msum += roots[k].norm() * w;
    }
    Ok((zsum * d, msum * d.norm(), max_step))
}

/// All zero pairs `i < j` with straight segments.
pub fn periods(q: &QuadraticDifferential) -> Result<PeriodTable> {
    if !q.simple {
        return Err(Error::Invalid("q2 has a repeated zero".into()));
    }
    let n = q.zeros.len();
    if n < 2 {
        return Err(Error::Domain("no saddle connections".into()));
    }
    let mut pairs = Vec::new();
    let mut obstructed = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            match segment_period(q, i, j) {
                Ok(p) => pairs.push(p),
                Err(Error::BranchTracking(_)) => {
                    let (a, b) = (q.zeros[i].z, q.zeros[j].z);
                    let (k, distance) = (0..n)
                        .filter(|&k| k != i && k != j)
                        .map(|k| (k, distance_to_segment(q.zeros[k].z, a, b)))
                        .fold((0, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
                    obstructed.push(Obstruction { i, j, k, distance });
                }
                Err(e) => return Err(e),
            }
        }
    }
    let best = pairs
        .iter()
        .min_by(|x, y| x.m.partial_cmp(&y.m).unwrap())
        .ok_or_else(|| Error::Domain("every segment is obstructed".into()))?;
    let (m, argmin) = (best.m, (best.i, best.j));
    Ok(PeriodTable {
        zeros: q.zeros.iter().map(|z| z.z).collect(),
        pairs,
        obstructed,
        m,
        argmin,
        cycle_factor: CYCLE_FACTOR,
    })
}

/// `(2 t^2 / pi) K0(2 t |Z_gamma0|)`: the scalar prefactor of the leading
/// correction, without the invariant `Omega` or the tensor `d|Z|^2`.
pub fn gmn_envelope(table: &PeriodTable, t: f64) -> Result<f64> {
    if table.pairs.is_empty() {
        return Err(Error::Domain("empty period table".into()));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    Ok(2.0 * t * t / PI * k0(2.0 * t * table.z_gamma0())?)
}

/// Slopes of the envelope's logarithm against `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeFit {
    pub t_values: Vec<f64>,
    pub envelope: Vec<f64>,
    /// `-2 |Z_gamma0|`.
    pub slope_predicted: f64,
    /// Fit of `log env`.
    pub raw: LineFit,
    /// Fit of `log env + log t / 2`, undoing only the `K0` prefactor.
    pub half_log: LineFit,
    /// Fit of `log env - 3 log t / 2`, undoing the `K0` prefactor and `t^2`.
    pub full_log: LineFit,
}

pub fn envelope_fit(table: &PeriodTable, t_values: &[f64]) -> Result<EnvelopeFit> {
    let env: Vec<f64> = t_values.iter().map(|&t| gmn_envelope(table, t)).collect::<Result<_>>()?;
    let ly: Vec<f64> = env.iter().map(|e| e.ln()).collect();
    let adj = |c: f64| -> Vec<f64> { ly.iter().zip(t_values).map(|(y, t)| y + c * t.ln()).collect() };
    Ok(EnvelopeFit {
        t_values: t_values.to_vec(),
        envelope: env.clone(),
        slope_predicted: -2.0 * table.z_gamma0(),
        raw: line_fit(t_values, &ly)?,
        half_log: line_fit(t_values, &adj(0.5))?,
        full_log: line_fit(t_values, &adj(-1.5))?,
    })
}
