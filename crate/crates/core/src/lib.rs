//! Numerics laboratory for the geometry of finite-dimensional normed
//! spaces: bordered determinants and k-dimensional volumes, rotundity
//! moduli, quotient and product constructions, and best-approximation
//! (Chebyshev-type) diagnostics.

pub mod approximation;
pub mod dd;
pub mod determinant;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod optim;
pub mod presets;
pub mod report;
pub mod rotundity;
pub mod space;
pub mod suites;
pub mod tol;
pub mod volume;

pub use error::{Error, Result};
pub use space::{DualNormEval, Functional, NormDescriptor, PValue, Space, SubspaceDistance, WeightRule};
pub use tol::Tolerances;
