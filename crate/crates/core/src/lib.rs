//! Polynomial first integrals and symmetry fields of quadratic homogeneous
//! ODE systems `ẋᵢ = Σ aᵢⱼₖ xⱼ xₖ`.
//!
//! The pipeline: find balances (`f(c) + c = 0`), compute Kovalevskaya
//! exponents, test the resonance conditions, move to the balance-adapted
//! normal form, build the base-function space of a given degree and extract
//! the first integrals it contains. The planar case has a closed-form
//! classification in [`planar`]; [`oracle`] holds brute-force checks.

pub mod base_functions;
pub mod error;
pub mod linalg;
pub mod normal_form;
pub mod oracle;
pub mod planar;
pub mod poly;
pub mod resonance;
pub mod scalar;
pub mod spectral;
pub mod system;

pub use error::{Error, ParseError, Result};
pub use linalg::Matrix;
pub use poly::{Homogeneity, Monomial, MultiPoly};
pub use scalar::{GaussianRational, Mode, Scalar};
pub use spectral::{BalanceData, SpectralOptions};
pub use system::{catalog, QuadraticSystem};
