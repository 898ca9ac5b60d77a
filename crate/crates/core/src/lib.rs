//! Numerical laboratory for the SU(2) and SU(n) local models of the Hitchin
//! metric near simple branch points.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfn`]: the modified Bessel function `K0` and `K1`.
//! - [`painleve`]: the radial sinh-Gordon profile `u_t` and its rescaling law.
//! - [`defalg`]: exact algebra of matrix-valued polynomial fields in `(z, zbar)`.
//! - [`localmodel`]: the disk model (metrics, cutoff, `F^X`, boundary form).
//! - [`varsolve`]: the complex-variation PDE solved mode by mode.
//! - [`metricdiff`]: disk quadrature, Stokes check, decay scan.
//! - [`sunform`]: SU(n) block normal forms and infinitesimal gauge fixing.
//! - [`spectral`]: periods of planar quadratic differentials.
//!
//! The `hml` binary wraps one operation per subcommand; the `examples/`
//! directory of this crate has one runnable program per capability.

pub mod defalg;
pub mod error;
pub mod fit;
pub mod interp;
pub mod linalg;
pub mod localmodel;
pub mod metricdiff;
pub mod painleve;
pub mod poly;
pub mod quad;
pub mod report;
pub mod specfn;
pub mod spectral;
pub mod sunform;
pub mod varsolve;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
