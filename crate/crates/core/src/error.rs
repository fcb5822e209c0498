use thiserror::Error;

/// Failure modes of the simulator, grouped by the stage that raises them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid cutoff {0}: every mode needs at least two Fock levels")]
    InvalidCutoff(usize),

    #[error("joint dimension {dim} exceeds the configured ceiling {ceiling}")]
    DimensionCeiling { dim: usize, ceiling: usize },

    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("outside the stationary domain: Delta_b = {delta_b}, 2 Omega_p = {two_omega}")]
    OutsideStationaryDomain { delta_b: f64, two_omega: f64 },

    #[error("steady displacement is singular (Delta_b = 2 Omega_p with kappa_b = 0)")]
    SingularDisplacement,

    #[error("coth(2r) is singular at r = {0}")]
    CothSingularity(f64),

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StiffFailure { t: f64, h: f64 },

    #[error("integration failed after t = {last_good_time}: {reason}")]
    Integration { last_good_time: f64, reason: String },

    #[error("unphysical bath: |M|^2 = {m_sq} exceeds N(N+1) = {bound}")]
    UnphysicalBath { m_sq: f64, bound: f64 },

    #[error("cutoff insufficient: tail mass {tail:e} exceeds {limit:e}")]
    CutoffInsufficient { tail: f64, limit: f64 },

    #[error("measurement outcome has negligible probability {0:e}")]
    ZeroProbabilityOutcome(f64),
}

impl Error {
    /// Stable machine-readable identifier for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidCutoff(_) => "invalid-cutoff",
            Error::DimensionCeiling { .. } => "dimension-ceiling",
            Error::InvalidComposition(_) => "invalid-composition",
            Error::InvalidSpace(_) => "invalid-space",
            Error::DimensionMismatch { .. } => "invalid-input",
            Error::Numeric(_) => "numeric-error",
            Error::NotPositiveSemidefinite(_) => "not-positive-semidefinite",
            Error::InvalidParams(_) => "invalid-params",
            Error::OutsideStationaryDomain { .. } => "outside-stationary-domain",
            Error::SingularDisplacement => "singular-displacement",
            Error::CothSingularity(_) => "coth-singularity",
            Error::StiffFailure { .. } => "stiff-failure",
            Error::Integration { .. } => "integration-error",
            Error::UnphysicalBath { .. } => "unphysical-bath",
            Error::CutoffInsufficient { .. } => "cutoff-insufficient",
            Error::ZeroProbabilityOutcome(_) => "zero-probability-outcome",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
