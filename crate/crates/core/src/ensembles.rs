//! Samplers for Gaussian data matrices, white Wishart matrices and
//! generalized Wigner matrices.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::linalg::{Matrix, SymMatrix};
use crate::rng::RngStream;

/// One of the two random-matrix ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EnsembleSpec {
    /// `W = XᵀX` with `X` an `n×p` standard Gaussian matrix.
    Wishart { n: usize, p: usize },
    /// Symmetric `p×p`, diagonal `N(0, eta)`, off-diagonal `N(0, 1)`.
    Wigner { p: usize, eta: f64 },
}

impl EnsembleSpec {
    pub fn wishart(n: usize, p: usize) -> Result<Self> {
        let spec = EnsembleSpec::Wishart { n, p };
        spec.validate()?;
        Ok(spec)
    }

    pub fn wigner(p: usize, eta: f64) -> Result<Self> {
        let spec = EnsembleSpec::Wigner { p, eta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            EnsembleSpec::Wishart { n, p } => {
                ensure!(n >= 1 && p >= 1, Input, "wishart needs n >= 1 and p >= 1 (got n={n}, p={p})");
            }
            EnsembleSpec::Wigner { p, eta } => {
                ensure!(p >= 1, Input, "wigner needs p >= 1");
                ensure!(
                    (0.0..=2.0).contains(&eta),
                    Input,
                    "eta must lie in [0, 2], got {eta}"
                );
            }
        }
        Ok(())
    }

    pub fn p(&self) -> usize {
        match *self {
            EnsembleSpec::Wishart { p, .. } | EnsembleSpec::Wigner { p, .. } => p,
        }
    }

    pub fn sample(&self, rng: &mut RngStream) -> Result<SymMatrix> {
        match *self {
            EnsembleSpec::Wishart { n, p } => sample_wishart(n, p, rng),
            EnsembleSpec::Wigner { p, eta } => sample_wigner(p, eta, rng),
        }
    }
}

/// `n×p` matrix of i.i.d. standard normals, filled row by row.
pub fn sample_gaussian_matrix(n: usize, p: usize, rng: &mut RngStream) -> Result<Matrix> {
    ensure!(n >= 1 && p >= 1, Input, "need n >= 1 and p >= 1");
    let data = (0..n * p).map(|_| rng.next_normal()).collect();
    Matrix::from_row_major(n, p, data)
}

pub fn sample_wishart(n: usize, p: usize, rng: &mut RngStream) -> Result<SymMatrix> {
    Ok(sample_gaussian_matrix(n, p, rng)?.gram())
}

/// Upper triangle drawn row by row; the diagonal is scaled by `sqrt(eta)`,
/// so `eta = 0` gives an exactly zero diagonal.
pub fn sample_wigner(p: usize, eta: f64, rng: &mut RngStream) -> Result<SymMatrix> {
    EnsembleSpec::Wigner { p, eta }.validate()?;
    let sd = eta.sqrt();
    SymMatrix::from_fn(p, |i, j| {
        let z = rng.next_normal();
        if i == j {
            sd * z
        } else {
            z
        }
    })
}
