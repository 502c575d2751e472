use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const INVALID_INPUT: i32 = 2;
    pub const CONVEXITY: i32 = 3;
    pub const INTEGRATOR: i32 = 4;
    pub const REGIME: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Model(#[from] pullin_dyn::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        use pullin_dyn::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io { .. } => exit::INVALID_INPUT,
            CliError::Model(e) => match e {
                E::InvalidParameter(_) => exit::INVALID_INPUT,
                E::ConvexityViolation { .. } => exit::CONVEXITY,
                E::Supercritical { .. } | E::Subcritical { .. } | E::RegimeMismatch { .. } | E::NotApplicable(_) => {
                    exit::REGIME
                }
                E::Singularity { .. } | E::IntegratorFailure(_) | E::QuadratureFailure(_) | E::RootFinding(_) => {
                    exit::INTEGRATOR
                }
            },
        }
    }
}
