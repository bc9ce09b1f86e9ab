//! Fourier pseudospectral check of operator identities on the torus.
//!
//! Every `DiffOp` is sampled on an `N x N` grid and applied by spectral
//! differentiation. Residual norms are taken on the band `|mode| <= N/4`,
//! where aliasing from the truncation edge stays out of the measurement.

mod grid;
mod matrix;
mod norms;
mod sweep;

use thiserror::Error;

use crate::symcore::SymError;

pub use grid::Grid;
pub use matrix::{discretize, sample_expr, OpMatrix};
pub use norms::{
    band_matrix, band_modes, commutator_residual, commutator_residual_with, hermiticity_defect,
    hermiticity_defect_with, measure_conjugate, mode, operator_norm, operator_norm_to, Residual,
};
pub use sweep::{convergence_sweep, Check, Identity, Sweep, SweepRow, ROUNDOFF_FLOOR};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error("half-integer phase left in coefficient {0}")]
    HalfPhaseResidue(String),
    #[error("coefficient has a pole on the grid: {0}")]
    PoleOnGrid(String),
    #[error("coefficient is not periodic: {0}")]
    NonPeriodic(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// How independent column and grid computations are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon data parallelism; sequential when built without `parallel`.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// `(0..n).map(f)` in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }
}
