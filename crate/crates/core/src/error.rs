//! Error type shared by all solver and measurement modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A query point lies outside the closed cylinder it was classified against.
    #[error("point outside the closed cylinder: {0}")]
    OutsideCylinder(String),

    /// A measurement region does not intersect the grid.
    #[error("region does not intersect the grid: {0}")]
    EmptyRegion(String),

    /// `|p|^gamma` requested at `p = 0` with `gamma < 0`; only the regularized
    /// cascade may approach this configuration.
    #[error("singular evaluation: |Du|^gamma with gamma < 0 at Du = 0; use the regularized cascade")]
    SingularEvaluation,

    /// Invalid argument or geometry for the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested time step violates the stability bound.
    #[error("step rejected: dt = {dt} exceeds the stability bound; suggested dt = {suggested}")]
    StepRejected { dt: f64, suggested: f64 },

    /// Substepping could not satisfy the stability bound within the retry budget.
    #[error("CFL failure: {0}")]
    CflFailure(String),

    /// A NaN or infinity appeared in the marched solution.
    #[error("non-finite value detected: {0}")]
    NonFinite(String),

    /// Oscillations are below resolution; an exponent fit would be meaningless.
    #[error("flat field: oscillations below resolution, no exponent fit")]
    FlatField,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed grid dump or report file.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<V> = std::result::Result<V, Error>;
