use super::CMat;
use crate::{Error, Result, C64};
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormType {
    /// A (0,0)-form.
    Scalar,
    /// Coefficient of `dz`.
    Form10,
    /// Coefficient of `dzbar`.
    Form01,
    /// Coefficient of `dz ^ dzbar`.
    Form11,
}

/// An `n x n` matrix of polynomials in `(z, zbar)`.
///
/// Coefficients are kept sparsely by exponent pair `(j, k)` of
/// `z^j zbar^k`. Negative exponents are allowed so that meromorphic
/// diagonal terms such as `P(z)/(4z)` can be represented exactly; `eval`
/// then requires `z != 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolyField {
    pub n: usize,
    pub coeffs: BTreeMap<(i32, i32), CMat>,
    pub form: FormType,
    /// Marked `sl(n)`-valued.
    pub trace_free: bool,
}

impl MatrixPolyField {
    pub fn zero(n: usize, form: FormType) -> Self {
        Self { n, coeffs: BTreeMap::new(), form, trace_free: false }
    }

    /// `m z^j zbar^k`.
    pub fn monomial(j: i32, k: i32, m: CMat, form: FormType) -> Self {
        let n = m.nrows();
        let mut f = Self::zero(n, form);
        f.coeffs.insert((j, k), m);
        f.prune();
        f
    }

    /// A constant matrix field.
    pub fn constant(m: CMat, form: FormType) -> Self {
        Self::monomial(0, 0, m, form)
    }

    pub fn with_form(mut self, form: FormType) -> Self {
        self.form = form;
        self
    }

    /// Mark as `sl(n)`-valued after checking every coefficient is trace-free.
    pub fn mark_trace_free(mut self) -> Result<Self> {
        for (jk, c) in &self.coeffs {
            if c.trace().norm() > 1e-14 * (1.0 + super::max_abs(c)) {
                return Err(Error::Invalid(format!("coefficient {jk:?} is not trace-free")));
            }
        }
        self.trace_free = true;
        Ok(self)
    }

    /// Random `sl(n)` field with entries uniform in the unit square and
    /// bidegree `j + k <= d`.
    pub fn random_sl<R: Rng>(rng: &mut R, n: usize, d: i32, form: FormType) -> Self {
        let mut f = Self::zero(n, form);
        for j in 0..=d {
            for k in 0..=(d - j) {
                let mut m = CMat::from_fn(n, n, |_, _| {
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                });
                let tr = m.trace() / n as f64;
                for i in 0..n {
                    m[(i, i)] -= tr;
                }
                f.coeffs.insert((j, k), m);
            }
        }
        f.trace_free = true;
        f
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, m| m.iter().any(|v| *v != C64::new(0.0, 0.0)));
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest exponent appearing in either variable.
    pub fn degree_bound(&self) -> i32 {
        self.coeffs.keys().map(|&(j, k)| j.max(k)).max().unwrap_or(0)
    }

    /// Largest total degree `j + k`.
    pub fn total_degree(&self) -> i32 {
        self.coeffs.keys().map(|&(j, k)| j + k).max().unwrap_or(0)
    }

    pub fn has_negative_powers(&self) -> bool {
        self.coeffs.keys().any(|&(j, k)| j < 0 || k < 0)
    }

    fn combine(&self, o: &Self, sign: f64) -> Self {
        assert_eq!(self.n, o.n, "size mismatch");
        let mut out = self.clone();
        for (jk, c) in &o.coeffs {
            let e = out.coeffs.entry(*jk).or_insert_with(|| CMat::zeros(self.n, self.n));
            *e += c * C64::new(sign, 0.0);
        }
        out.trace_free = self.trace_free && o.trace_free;
        out.prune();
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, 1.0)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, -1.0)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c *= s;
        }
        out.prune();
        out
    }

    /// Coefficient-function product `self * o`. The form type is taken from
    /// `self`; callers combine form degrees themselves.
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n, "size mismatch");
        let mut out = Self::zero(self.n, self.form);
        for (&(a, b), x) in &self.coeffs {
            for (&(c, d), y) in &o.coeffs {
                let e = out.coeffs.entry((a + c, b + d)).or_insert_with(|| CMat::zeros(self.n, self.n));
                *e += x * y;
            }
        }
        out.prune();
        out
    }

    /// Coefficientwise commutator `self o - o self`.
    pub fn bracket(&self, o: &Self) -> Self {
        let mut out = self.mul(o).sub(&o.mul(self));
        out.form = self.form;
        out.trace_free = true;
        out
    }

    /// Multiply by the scalar monomial `c z^j zbar^k`.
    pub fn shift(&self, j: i32, k: i32, c: C64) -> Self {
        let mut out = Self::zero(self.n, self.form);
        out.trace_free = self.trace_free;
        for (&(a, b), m) in &self.coeffs {
            out.coeffs.insert((a + j, b + k), m * c);
        }
        out.prune();
        out
    }

    /// `d/dz` of every coefficient.
    pub fn d_z(&self) -> Self {
        let mut out = Self::zero(self.n, self.form);
        out.trace_free = self.trace_free;
        for (&(j, k), m) in &self.coeffs {
            if j != 0 {
                out.coeffs.insert((j - 1, k), m * C64::new(j as f64, 0.0));
            }
        }
        out.prune();
        out
    }

    /// `d/dzbar` of every coefficient.
    pub fn d_zbar(&self) -> Self {
        let mut out = Self::zero(self.n, self.form);
        out.trace_free = self.trace_free;
        for (&(j, k), m) in &self.coeffs {
            if k != 0 {
                out.coeffs.insert((j, k - 1), m * C64::new(k as f64, 0.0));
            }
        }
        out.prune();
        out
    }

    /// The operator `dbar` on (0,0)- and (1,0)-forms.
    pub fn dbar(&self) -> Result<Self> {
        match self.form {
            FormType::Scalar => Ok(self.d_zbar().with_form(FormType::Form01)),
            FormType::Form10 => Ok(self.d_zbar().scale(C64::new(-1.0, 0.0)).with_form(FormType::Form11)),
            f => Err(Error::Invalid(format!("dbar is not defined here on {f:?}"))),
        }
    }

    /// The operator `d` (the `dz` part) on (0,0)- and (0,1)-forms.
    pub fn partial(&self) -> Result<Self> {
        match self.form {
            FormType::Scalar => Ok(self.d_z().with_form(FormType::Form10)),
            FormType::Form01 => Ok(self.d_z().with_form(FormType::Form11)),
            f => Err(Error::Invalid(format!("partial is not defined here on {f:?}"))),
        }
    }

    /// Pointwise conjugate transpose as a field: `(c z^j zbar^k)^* =
    /// c^* z^k zbar^j`. Swaps (1,0) and (0,1); on (1,1)-forms includes the
    /// sign from `dzbar ^ dz = -dz ^ dzbar`.
    pub fn conj_transpose(&self) -> Self {
        let (form, sign) = match self.form {
            FormType::Scalar => (FormType::Scalar, 1.0),
            FormType::Form10 => (FormType::Form01, 1.0),
            FormType::Form01 => (FormType::Form10, 1.0),
            FormType::Form11 => (FormType::Form11, -1.0),
        };
        let mut out = Self::zero(self.n, form);
        out.trace_free = self.trace_free;
        for (&(j, k), m) in &self.coeffs {
            out.coeffs.insert((k, j), m.adjoint() * C64::new(sign, 0.0));
        }
        out
    }

    /// Point value of the coefficient matrix.
    pub fn eval(&self, z: C64) -> Result<CMat> {
        if z == C64::new(0.0, 0.0) && self.has_negative_powers() {
            return Err(Error::SingularPoint("0 (negative powers present)".into()));
        }
        let zb = z.conj();
        let mut out = CMat::zeros(self.n, self.n);
        for (&(j, k), m) in &self.coeffs {
            out += m * (z.powi(j) * zb.powi(k));
        }
        Ok(out)
    }

    /// Largest trace modulus over the coefficients.
    pub fn trace_defect(&self) -> f64 {
        self.coeffs.values().map(|m| m.trace().norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id2() -> CMat {
        CMat::identity(2, 2)
    }

    #[test]
    fn dbar_examples() {
        let f = MatrixPolyField::monomial(0, 1, id2(), FormType::Scalar);
        let g = f.dbar().unwrap();
        assert_eq!(g.form, FormType::Form01);
        assert_eq!(g.coeffs.get(&(0, 0)), Some(&id2()));
        let h = MatrixPolyField::monomial(2, 0, id2(), FormType::Scalar);
        assert!(h.dbar().unwrap().is_zero());
        let m = CMat::from_fn(2, 2, |i, j| C64::new((i + 2 * j) as f64, 1.0));
        let k = MatrixPolyField::monomial(1, 1, m.clone(), FormType::Scalar).dbar().unwrap();
        assert_eq!(k.coeffs.len(), 1);
        assert_eq!(k.coeffs.get(&(1, 0)), Some(&m));
    }

    #[test]
    fn conj_transpose_is_pointwise() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        use rand::SeedableRng;
        let f = MatrixPolyField::random_sl(&mut rng, 3, 2, FormType::Scalar);
        let z = C64::new(0.4, -0.3);
        let a = f.conj_transpose().eval(z).unwrap();
        let b = f.eval(z).unwrap().adjoint();
        assert!(super::super::max_abs(&(a - b)) < 1e-14);
    }
}
