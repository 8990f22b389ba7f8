//! Finite-difference model of a stratified plasma slab as a block operator
//! matrix.

mod discretize;
mod pipeline;
mod profile;

pub use discretize::{
    b_derivative_term, constants, discretize, essential_bands, BandVariant, MhdConstants, MhdDiscretization,
    MIN_POINTS,
};
pub use pipeline::{discretization_slack, ratio_test, run_report, MhdReport};
pub use profile::{builtin, Coefficient, PlasmaProfile, Point, BUILTINS};
