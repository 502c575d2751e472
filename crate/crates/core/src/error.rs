use thiserror::Error;

/// Errors produced by the analysis, integration and quadrature routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Evaluation at or beyond the electrostatic singularity `x = xi + 1`.
    #[error("displacement {x} is at or beyond the singularity at {limit}")]
    Singularity { x: f64, limit: f64 },

    #[error("voltage {v} is not below the pull-in voltage {v_dpi}; use classify_regime")]
    Supercritical { v: f64, v_dpi: f64 },

    #[error("voltage {v} does not exceed the pull-in voltage {v_dpi}; no touch-down")]
    Subcritical { v: f64, v_dpi: f64 },

    #[error("cubic stiffness {kappa} violates the convexity bound {bound}")]
    ConvexityViolation { kappa: f64, bound: f64 },

    #[error("regime mismatch: expected {expected}, found {found}")]
    RegimeMismatch { expected: String, found: String },

    #[error("integrator failure: {0}")]
    IntegratorFailure(String),

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),
}

pub type Result<T> = std::result::Result<T, Error>;
