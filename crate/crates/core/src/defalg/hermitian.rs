use super::CMat;
use crate::{Error, Result, C64};
use nalgebra::DVector;
use std::fmt;
use std::sync::Arc;

/// A radial function `r -> (w(r), w'(r))`.
pub type RadialWeight = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// Hermitian metric `h = S^* D S` with
/// `D = diag(|z|^{p_i} exp(s_i w(|z|)))` and a constant invertible frame `S`.
#[derive(Clone)]
pub struct HermitianField {
    pub n: usize,
    pub powers: Vec<f64>,
    pub exps: Vec<f64>,
    pub weight: Option<RadialWeight>,
    pub frame: Option<CMat>,
}

impl fmt::Debug for HermitianField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HermitianField")
            .field("n", &self.n)
            .field("powers", &self.powers)
            .field("exps", &self.exps)
            .field("weight", &self.weight.as_ref().map(|_| "radial"))
            .field("frame", &self.frame)
            .finish()
    }
}

impl HermitianField {
    pub fn identity(n: usize) -> Self {
        Self { n, powers: vec![0.0; n], exps: vec![0.0; n], weight: None, frame: None }
    }

    /// `diag(|z|^{p_i})`.
    pub fn diagonal_powers(powers: Vec<f64>) -> Self {
        let n = powers.len();
        Self { n, powers, exps: vec![0.0; n], weight: None, frame: None }
    }

    /// Attach `exp(s_i w(|z|))` factors.
    pub fn with_radial(mut self, exps: Vec<f64>, weight: RadialWeight) -> Self {
        assert_eq!(exps.len(), self.n);
        self.exps = exps;
        self.weight = Some(weight);
        self
    }

    pub fn with_frame(mut self, s: CMat) -> Self {
        assert_eq!(s.nrows(), self.n);
        self.frame = Some(s);
        self
    }

    /// `SU(2)` metric `diag(|z|^{-1/2} e^{-w}, |z|^{1/2} e^{w})`.
    pub fn su2(weight: Option<RadialWeight>) -> Self {
        let h = Self::diagonal_powers(vec![-0.5, 0.5]);
        match weight {
            Some(w) => h.with_radial(vec![-1.0, 1.0], w),
            None => h,
        }
    }

    /// `det h = 1` identically.
    pub fn is_sl_normalized(&self) -> bool {
        let p: f64 = self.powers.iter().sum();
        let s: f64 = self.exps.iter().sum();
        let d = self.frame.as_ref().map(|m| m.determinant().norm()).unwrap_or(1.0);
        p.abs() < 1e-14 && s.abs() < 1e-14 && (d - 1.0).abs() < 1e-12
    }

    fn singular_at_origin(&self) -> bool {
        self.powers.iter().any(|&p| p != 0.0) || self.weight.is_some()
    }

    fn radial(&self, r: f64) -> (f64, f64) {
        self.weight.as_ref().map(|w| w(r)).unwrap_or((0.0, 0.0))
    }

    fn check(&self, z: C64) -> Result<f64> {
        let r = z.norm();
        if r == 0.0 && self.singular_at_origin() {
            return Err(Error::SingularPoint(format!("{z}")));
        }
        Ok(r)
    }

    /// Diagonal entries of `D(z)`.
    pub fn diag_entries(&self, z: C64) -> Result<Vec<f64>> {
        let r = self.check(z)?;
        let (w, _) = self.radial(r);
        Ok((0..self.n)
            .map(|i| {
                let rp = if self.powers[i] == 0.0 { 1.0 } else { r.powf(self.powers[i]) };
                rp * (self.exps[i] * w).exp()
            })
            .collect())
    }

    /// The matrix `h(z)`.
    pub fn eval(&self, z: C64) -> Result<CMat> {
        let d = self.diag_entries(z)?;
        let dm = CMat::from_diagonal(&DVector::from_iterator(self.n, d.iter().map(|&v| C64::new(v, 0.0))));
        Ok(match &self.frame {
            Some(s) => s.adjoint() * dm * s,
            None => dm,
        })
    }

    /// `h(z)^{-1}`.
    pub fn inverse(&self, z: C64) -> Result<CMat> {
        let d = self.diag_entries(z)?;
        let dm = CMat::from_diagonal(&DVector::from_iterator(self.n, d.iter().map(|&v| C64::new(1.0 / v, 0.0))));
        Ok(match &self.frame {
            Some(s) => {
                let si = s
                    .clone()
                    .try_inverse()
                    .ok_or_else(|| Error::Invalid("frame matrix is singular".into()))?;
                &si * dm * si.adjoint()
            }
            None => dm,
        })
    }

    /// Chern connection coefficient `h^{-1} d_z h`.
    pub fn connection(&self, z: C64) -> Result<CMat> {
        let r = self.check(z)?;
        let (_, dw) = self.radial(r);
        let entries: Vec<C64> = (0..self.n)
            .map(|i| {
                let mut v = C64::new(0.0, 0.0);
                if self.powers[i] != 0.0 {
                    v += self.powers[i] / (2.0 * z);
                }
                if self.exps[i] != 0.0 {
                    v += self.exps[i] * dw * z.conj() / (2.0 * r);
                }
                v
            })
            .collect();
        let g = CMat::from_diagonal(&DVector::from_vec(entries));
        Ok(match &self.frame {
            Some(s) => {
                let si = s
                    .clone()
                    .try_inverse()
                    .ok_or_else(|| Error::Invalid("frame matrix is singular".into()))?;
                si * g * s
            }
            None => g,
        })
    }

    /// `h^{-1} M^* h` at `z`.
    pub fn adjoint(&self, m: &CMat, z: C64) -> Result<CMat> {
        Ok(self.inverse(z)? * m.adjoint() * self.eval(z)?)
    }
}

/// `h^{-1} M^* h` for point values `M` and `h`.
pub fn adjoint_h(m: &CMat, h: &CMat) -> Result<CMat> {
    let hi = h
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularPoint("metric matrix not invertible".into()))?;
    Ok(hi * m.adjoint() * h)
}
