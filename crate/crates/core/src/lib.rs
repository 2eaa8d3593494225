//! Extreme eigenvalues of principal minors of Wishart and Wigner matrices:
//! sampling, exact and bounded search over minors, asymptotic predictors,
//! tail bounds, density evaluation and a Monte Carlo harness.

pub mod asymptotics;
pub mod csmatrix;
pub mod densities;
pub mod ensembles;
pub mod error;
pub mod linalg;
pub mod minors;
pub mod montecarlo;
pub mod rng;
pub mod special;

pub use ensembles::EnsembleSpec;
pub use error::{Error, Result};
pub use linalg::{Matrix, Spectrum, SymMatrix};
pub use minors::{Mode, Strategy, SubsetExtremeResult};
pub use rng::RngStream;
