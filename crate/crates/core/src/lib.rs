//! Coherence quantifiers, qubit measurement families and the numerical
//! experiments built on them.
//!
//! All states are finite-dimensional density matrices in a fixed
//! computational basis, and coherence is always measured in that basis.

pub mod coherence;
pub mod dilation;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod measurement;
pub mod optimize;
pub mod random;
pub mod state;

pub use error::{Error, Result};
pub use linalg::{c64, ComplexMatrix, C64};
pub use state::{BlochVector, DensityMatrix};
