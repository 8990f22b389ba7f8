//! Self-adjoint 2×2 block operator matrices
//! `M = [[A, B], [B*, C]]` with `A` bounded below and `C` bounded above:
//! eigenvalue enclosures, spectral subspaces as graphs, angular operators and
//! basis properties, plus a discretized plasma model.

pub mod basis;
pub mod block;
pub mod enclosure;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod mhd;
pub mod pipeline;
pub mod report;
pub mod selftest;
pub mod subspace;
pub mod tolerance;

pub use block::{BlockOperatorMatrix, MinimalBound, RelativeBound, SpectralLandmarks};
pub use error::{Error, Result};
pub use linalg::{CMatrix, HermitianMatrix, Interval, SpectralDecomposition, C64};
pub use report::{Check, Outcome, Tally, Value};
