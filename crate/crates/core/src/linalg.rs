//! Banded linear algebra used by the radial solvers.

use crate::{Error, Result};
use std::ops::{Add, Div, Mul, Sub};

/// A tridiagonal matrix: `lower[i] = A[i][i-1]`, `diag[i] = A[i][i]`,
/// `upper[i] = A[i][i+1]`. `lower[0]` and `upper[n-1]` are ignored.
#[derive(Debug, Clone)]
pub struct Tridiagonal<T> {
    pub lower: Vec<T>,
    pub diag: Vec<T>,
    pub upper: Vec<T>,
}

impl<T> Tridiagonal<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Div<Output = T> + Default,
    f64: Into<T>,
{
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![T::default(); n],
            diag: vec![T::default(); n],
            upper: vec![T::default(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v = v + self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    v = v + self.upper[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.len();
        let mut t = Self::zeros(n);
        for i in 0..n {
            t.diag[i] = self.diag[i];
            if i + 1 < n {
                t.upper[i] = self.lower[i + 1];
                t.lower[i + 1] = self.upper[i];
            }
        }
        t
    }

    /// Solve by the Thomas algorithm. `norm` measures pivot size.
    pub fn solve_with(&self, rhs: &[T], norm: impl Fn(T) -> f64) -> Result<Vec<T>> {
        let n = self.len();
        let mut c = vec![T::default(); n];
        let mut d = vec![T::default(); n];
        let scale = self.diag.iter().map(|&v| norm(v)).fold(0.0, f64::max).max(1e-300);
        let mut piv = self.diag[0];
        if norm(piv) <= 1e-14 * scale {
            return Err(Error::SingularOperator("zero pivot at row 0".into()));
        }
        c[0] = if n > 1 { self.upper[0] / piv } else { T::default() };
        d[0] = rhs[0] / piv;
        for i in 1..n {
            piv = self.diag[i] - self.lower[i] * c[i - 1];
            if norm(piv) <= 1e-14 * scale {
                return Err(Error::SingularOperator(format!("zero pivot at row {i}")));
            }
            if i + 1 < n {
                c[i] = self.upper[i] / piv;
            }
            d[i] = (rhs[i] - self.lower[i] * d[i - 1]) / piv;
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            x[i] = x[i] - c[i] * x[i + 1];
        }
        Ok(x)
    }
}

impl Tridiagonal<f64> {
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.solve_with(rhs, f64::abs)
    }

    /// Smallest singular value by power iteration on `(A^T A)^{-1}`.
    pub fn smallest_singular_value(&self, iters: usize) -> Result<f64> {
        let n = self.len();
        let at = self.transpose();
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
        let mut lam = 0.0;
        for _ in 0..iters {
            let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= nrm);
            let y = at.solve(&x)?;
            let z = self.solve(&y)?;
            let new = x.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>();
            let done = ((new - lam) / new).abs() < 1e-10;
            lam = new;
            x = z;
            if done {
                break;
            }
        }
        Ok(1.0 / lam.sqrt())
    }
}
