//! Exact algebra of matrix-valued fields `sum c_jk z^j zbar^k` on a chart,
//! hermitian metrics of diagonal radial type, and pointwise evaluation of the
//! deformation identities and metric densities built from them.
//!
//! Conventions used throughout:
//!
//! - A field of type [`FormType::Form11`] stores `X` for the 2-form
//!   `X dz ^ dzbar`.
//! - `d(G dzbar) = (d_z G) dz^dzbar` and `dbar(G dz) = -(d_zbar G) dz^dzbar`.
//! - The bracket of matrix 1-forms is graded:
//!   `[a dz + b dzbar, c dz + d dzbar] = ([a, d] + [c, b]) dz^dzbar`.
//! - The `h`-adjoint of a matrix is `h^{-1} M^* h`.

mod field;
mod hermitian;
mod identities;

pub use field::{FormType, MatrixPolyField};
pub use hermitian::{adjoint_h, HermitianField, RadialWeight};
pub use identities::{
    coulomb_batch, coulomb_identity_check, default_samples, CoulombBatch, energy_identity_check, graded_bracket, l2_density_point, l2_integrand,
    l2_integrand_complex, triple_gauge_residual, triple_gauge_residual_at, EnergyReport,
    IdentityReport,
};

use crate::C64;
use nalgebra::DMatrix;

/// Dense complex matrix used for coefficients and point values.
pub type CMat = DMatrix<C64>;

/// Entrywise maximum modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.norm()))
}

/// Pauli `sigma_3 = diag(1, -1)`.
pub fn sigma3() -> CMat {
    CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]))
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}
