//! Univariate complex polynomials in the chart coordinate `z`.

use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Default degree bound for polynomial inputs.
pub const MAX_DEGREE: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PolyRole {
    /// The variation `P_dot` of the normal form.
    PDot,
    /// The holomorphic series `chi`.
    ChiSeries,
    /// A quadratic differential representative.
    Q2,
    #[default]
    Generic,
}

/// `a_0 + a_1 z + ... + a_d z^d` with complex coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct HolomorphicPoly {
    pub coeffs: Vec<C64>,
    pub role: PolyRole,
}

impl HolomorphicPoly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        let mut p = Self { coeffs, role: PolyRole::Generic };
        p.trim();
        p
    }

    pub fn with_role(mut self, role: PolyRole) -> Self {
        self.role = role;
        self
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    /// Parse ascending coefficients such as `1,0.5-2i,3i`.
    pub fn parse(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|tok| {
                let t: String = tok.chars().filter(|c| !c.is_whitespace()).collect();
                t.parse::<C64>().map_err(|_| Error::Invalid(format!("bad coefficient '{tok}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        if coeffs.is_empty() {
            return Err(Error::Invalid("empty coefficient list".into()));
        }
        Ok(Self::new(coeffs))
    }

    pub fn zero() -> Self {
        Self::new(Vec::new())
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// `c z^n`.
    pub fn monomial(n: usize, c: C64) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); n + 1];
        v[n] = c;
        Self::new(v)
    }

    /// `z`.
    pub fn z() -> Self {
        Self::monomial(1, C64::new(1.0, 0.0))
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if *c == C64::new(0.0, 0.0)) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `z^n` (zero past the end).
    pub fn coeff(&self, n: usize) -> C64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn check_degree(&self, max: usize) -> Result<()> {
        match self.degree() {
            Some(d) if d > max => Err(Error::Invalid(format!("degree {d} exceeds bound {max}"))),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by Horner's scheme.
    pub fn eval_d(&self, z: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut d = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            d = d * z + p;
            p = p * z + c;
        }
        (p, d)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut v = vec![C64::new(0.0, 0.0); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::new(v)
    }

    /// Composition `self(g(z))`.
    pub fn compose(&self, g: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, &c| acc.mul(g).add(&Self::constant(c)))
    }

    /// All complex roots by Aberth iteration followed by Newton polishing.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let d = match self.degree() {
            None => return Err(Error::Invalid("roots of the zero polynomial".into())),
            Some(d) => d,
        };
        if d == 0 {
            return Ok(Vec::new());
        }
        let lead = self.coeffs[d];
        let monic: Vec<C64> = self.coeffs.iter().map(|&c| c / lead).collect();
        let mp = Self::new(monic);
        // Initial guesses on a circle of Cauchy-bound radius, slightly rotated.
        let radius = 1.0
            + mp.coeffs[..d]
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max);
        let mut z: Vec<C64> = (0..d)
            .map(|k| C64::from_polar(0.5 * radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / d as f64))
            .collect();
        for _ in 0..500 {
            let mut moved = 0.0f64;
            for i in 0..d {
                let (p, dp) = mp.eval_d(z[i]);
                if p == C64::new(0.0, 0.0) {
                    continue;
                }
                let ratio = p / dp;
                let s: C64 = (0..d)
                    .filter(|&j| j != i)
                    .map(|j| C64::new(1.0, 0.0) / (z[i] - z[j]))
                    .sum();
                let w = ratio / (C64::new(1.0, 0.0) - ratio * s);
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
            if moved < 1e-15 {
                break;
            }
        }
        for zi in z.iter_mut() {
            *zi = mp.polish(*zi);
        }
        Ok(z)
    }

    /// Newton polishing of an approximate root.
    pub fn polish(&self, mut z: C64) -> C64 {
        for _ in 0..8 {
            let (p, dp) = self.eval_d(z);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            z -= step;
            if step.norm() <= 1e-17 * (1.0 + z.norm()) {
                break;
            }
        }
        z
    }

    /// Relative backward error `|p(z)| / sum |a_k||z|^k` of a root.
    pub fn backward_error(&self, z: C64) -> f64 {
        let num = self.eval(z).norm();
        let r = z.norm();
        let den: f64 = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }
}
