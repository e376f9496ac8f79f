//! Products of two orthogonal projections on `C^n`.
//!
//! The library answers, for finite-dimensional operators, which matrices are
//! products `PQ` or `PQP` of orthogonal projections, enumerates all such
//! factorizations, and exposes the polar, pseudoinverse and two-projections
//! canonical-form structure of those products.
//!
//! Every routine is generic over the real field `R: Real` (`f64` or `f32`) with
//! complex entries; the aliases at the crate root fix `R = f64`, which is what
//! the default tolerances are calibrated for.
//!
//! ```
//! use twoproj::{numeric, products, Tol};
//!
//! let t: twoproj::Mat = numeric::from_real_rows(&[&[0.36, 0.48], &[0.0, 0.0]]);
//! let tol = Tol::default();
//! assert!(products::is_in_x(&t, &tol, products::Criterion::Crimmins).unwrap().member);
//! let pair = products::canonical_factorization(&t, &tol).unwrap();
//! assert!(numeric::dist(&(&pair.p * &pair.q), &t) < 1e-12);
//! ```

mod error;
mod scalar;

pub mod dagger;
pub mod halmos;
pub mod numeric;
pub mod polar;
pub mod products;
pub mod random;
pub mod subspace;

pub use error::{Error, Result};
pub use scalar::{CMat, CVec, Real, Tolerance, C};

/// Complex double-precision matrix.
pub type Mat = CMat<f64>;
/// Tolerance policy at double precision.
pub type Tol = Tolerance<f64>;
pub type Subspace = subspace::Subspace<f64>;
pub type FactorPair = products::FactorPair<f64>;
pub type AndoData = products::AndoData<f64>;
pub type PartialIsometry = polar::PartialIsometry<f64>;
pub type ObliqueProj = dagger::ObliqueProj<f64>;
pub type HalmosForm = halmos::HalmosForm<f64>;

/// Single-precision counterparts.
pub type Mat32 = CMat<f32>;
pub type Tol32 = Tolerance<f32>;
