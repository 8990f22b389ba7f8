//! Global tolerance convention.
//!
//! Exact statements (strict inequalities, "λ ∉ σ(C)") are realized as
//! comparisons guarded by `base × dim × scale`, where `scale` is the largest
//! entry magnitude of the matrix involved.

use std::sync::OnceLock;

/// Default base tolerance.
pub const DEFAULT_BASE: f64 = 1e-10;

/// Environment variable overriding [`DEFAULT_BASE`].
pub const TOL_ENV: &str = "SPECBLOCK_TOL";

/// Threshold below which the smallest singular value of the first-component
/// block classifies a subspace as not a graph.
pub const GRAPH_TOL: f64 = 1e-8;

/// Lower edge of the band `[GRAPH_INDETERMINATE, GRAPH_TOL]` reported as
/// indeterminate.
pub const GRAPH_INDETERMINATE: f64 = 1e-10;

static BASE: OnceLock<f64> = OnceLock::new();

/// Base tolerance, read once from `SPECBLOCK_TOL` if set and valid.
pub fn base() -> f64 {
    *BASE.get_or_init(|| {
        std::env::var(TOL_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0)
            .unwrap_or(DEFAULT_BASE)
    })
}

/// `base × dim × scale`, floored so that an all-zero matrix still gets a
/// usable absolute tolerance.
pub fn scaled(dim: usize, scale: f64) -> f64 {
    base() * (dim.max(1) as f64) * scale.max(1.0)
}
