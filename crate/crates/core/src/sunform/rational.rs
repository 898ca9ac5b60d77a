//! Matrices of holomorphic polynomials and rational entries with certified
//! denominators.

use crate::defalg::{CMat, FormType, MatrixPolyField};
use crate::poly::HolomorphicPoly;
use crate::{Error, Result, C64};
use serde::Serialize;
use std::f64::consts::TAU;

/// Smallest admissible denominator modulus on the closed disk.
pub const MIN_MODULUS: f64 = 1e-6;

/// Row-major `rows x cols` matrix of polynomials in `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<HolomorphicPoly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![HolomorphicPoly::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, HolomorphicPoly::constant(C64::new(1.0, 0.0)));
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &HolomorphicPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: HolomorphicPoly) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut b = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                b.set(i, j, self.get(r0 + i, c0 + j).clone());
            }
        }
        b
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }

    pub fn eval(&self, z: C64) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval(z))
    }

    fn zip(&self, o: &Self, f: impl Fn(&HolomorphicPoly, &HolomorphicPoly) -> HolomorphicPoly) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| f(a, b)).collect();
        Self { rows: self.rows, cols: self.cols, entries }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = HolomorphicPoly::zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(o.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Entrywise product with a scalar polynomial.
    pub fn scale(&self, p: &HolomorphicPoly) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|e| e.mul(p)).collect() }
    }

    pub fn trace(&self) -> HolomorphicPoly {
        (0..self.rows.min(self.cols)).fold(HolomorphicPoly::zero(), |acc, i| acc.add(self.get(i, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Conversion from a field with no `zbar` dependence and no poles.
    pub fn from_field(f: &MatrixPolyField) -> Result<Self> {
        let mut m = Self::zeros(f.n, f.n);
        for (&(j, k), c) in &f.coeffs {
            if k != 0 || j < 0 {
                return Err(Error::Invalid(format!("field is not a holomorphic polynomial (term z^{j} zbar^{k})")));
            }
            for r in 0..f.n {
                for s in 0..f.n {
                    let p = HolomorphicPoly::monomial(j as usize, c[(r, s)]);
                    let cur = m.get(r, s).add(&p);
                    m.set(r, s, cur);
                }
            }
        }
        Ok(m)
    }

    pub fn to_field(&self, form: FormType) -> MatrixPolyField {
        assert_eq!(self.rows, self.cols, "square matrix expected");
        let n = self.rows;
        let deg = self.entries.iter().filter_map(|e| e.degree()).max();
        let mut f = MatrixPolyField::zero(n, form);
        if let Some(d) = deg {
            for p in 0..=d {
                let m = CMat::from_fn(n, n, |i, j| self.get(i, j).coeff(p));
                f = f.add(&MatrixPolyField::monomial(p as i32, 0, m, form));
            }
        }
        f
    }

    /// Determinant by cofactor expansion; intended for sizes up to four.
    pub fn det(&self) -> HolomorphicPoly {
        assert_eq!(self.rows, self.cols, "square matrix expected");
        let n = self.rows;
        match n {
            0 => HolomorphicPoly::constant(C64::new(1.0, 0.0)),
            1 => self.get(0, 0).clone(),
            _ => {
                let mut acc = HolomorphicPoly::zero();
                for j in 0..n {
                    if self.get(0, j).is_zero() {
                        continue;
                    }
                    let term = self.get(0, j).mul(&self.minor(0, j).det());
                    acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                }
                acc
            }
        }
    }

    fn minor(&self, r: usize, c: usize) -> Self {
        let n = self.rows;
        let mut m = Self::zeros(n - 1, n - 1);
        for (ii, i) in (0..n).filter(|&i| i != r).enumerate() {
            for (jj, j) in (0..n).filter(|&j| j != c).enumerate() {
                m.set(ii, jj, self.get(i, j).clone());
            }
        }
        m
    }

    /// Classical adjugate: `adj(M) M = det(M) I`.
    pub fn adjugate(&self) -> Self {
        let n = self.rows;
        let mut a = Self::zeros(n, n);
        if n == 1 {
            a.set(0, 0, HolomorphicPoly::constant(C64::new(1.0, 0.0)));
            return a;
        }
        for i in 0..n {
            for j in 0..n {
                let d = self.minor(j, i).det();
                a.set(i, j, if (i + j) % 2 == 0 { d } else { d.scale(C64::new(-1.0, 0.0)) });
            }
        }
        a
    }
}

/// Zero-free certificate of a polynomial on the closed disk `|z| <= radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate {
    pub radius: f64,
    /// Sampled minimum of `|den|`.
    pub min_modulus: f64,
    pub witness: C64,
    /// Winding number of `den` along the boundary circle.
    pub winding: i64,
}

impl Certificate {
    pub fn ok(&self) -> bool {
        self.min_modulus > MIN_MODULUS && self.winding == 0
    }
}

/// Sampled minimum modulus plus an argument-principle zero count.
pub fn certify(den: &HolomorphicPoly, radius: f64) -> Certificate {
    let mut best = (den.eval(C64::new(0.0, 0.0)).norm(), C64::new(0.0, 0.0));
    let (n_r, n_theta) = (32, 128);
    for i in 1..=n_r {
        let r = radius * i as f64 / n_r as f64;
        for k in 0..n_theta {
            let z = C64::from_polar(r, TAU * k as f64 / n_theta as f64);
            let m = den.eval(z).norm();
            if m < best.0 {
                best = (m, z);
            }
        }
    }
    Certificate { radius, min_modulus: best.0, witness: best.1, winding: winding_number(den, radius) }
}

/// Number of zeros inside `|z| < radius` from the total change of argument,
/// refining the boundary sampling until every phase step is below `pi/4`.
pub fn winding_number(p: &HolomorphicPoly, radius: f64) -> i64 {
    let mut m = 256usize;
    loop {
        let vals: Vec<C64> = (0..=m).map(|k| p.eval(C64::from_polar(radius, TAU * k as f64 / m as f64))).collect();
        if vals.iter().any(|v| v.norm() == 0.0) {
            return i64::MAX;
        }
        let steps: Vec<f64> = vals.windows(2).map(|w| (w[1] / w[0]).arg()).collect();
        let max_step = steps.iter().fold(0.0f64, |a, s| a.max(s.abs()));
        if max_step < std::f64::consts::FRAC_PI_4 || m >= 1 << 18 {
            return (steps.iter().sum::<f64>() / TAU).round() as i64;
        }
        m *= 4;
    }
}

/// `num / den` with holomorphic polynomial numerator and denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct Rational {
    pub num: HolomorphicPoly,
    pub den: HolomorphicPoly,
}

impl Rational {
    pub fn zero() -> Self {
        Self::poly(HolomorphicPoly::zero())
    }

    pub fn poly(num: HolomorphicPoly) -> Self {
        Self { num, den: HolomorphicPoly::constant(C64::new(1.0, 0.0)) }
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.num.eval(z) / self.den.eval(z)
    }
}

/// Square matrix of rational entries.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMatrix {
    pub n: usize,
    pub entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, entries: vec![Rational::zero(); n * n] }
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, r: Rational) {
        self.entries[i * self.n + j] = r;
    }

    /// Writes `num / den` blockwise with a shared denominator.
    pub fn set_block(&mut self, r0: usize, c0: usize, num: &PolyMatrix, den: &HolomorphicPoly) {
        for i in 0..num.rows {
            for j in 0..num.cols {
                self.set(r0 + i, c0 + j, Rational { num: num.get(i, j).clone(), den: den.clone() });
            }
        }
    }

    pub fn eval(&self, z: C64) -> CMat {
        CMat::from_fn(self.n, self.n, |i, j| self.get(i, j).eval(z))
    }

    /// Distinct non-constant denominators.
    pub fn denominators(&self) -> Vec<HolomorphicPoly> {
        let mut out: Vec<HolomorphicPoly> = Vec::new();
        for e in &self.entries {
            if e.num.is_zero() || e.den.degree() == Some(0) && e.den.coeff(0) == C64::new(1.0, 0.0) {
                continue;
            }
            if !out.iter().any(|d| d.coeffs == e.den.coeffs) {
                out.push(e.den.clone());
            }
        }
        out
    }
}
