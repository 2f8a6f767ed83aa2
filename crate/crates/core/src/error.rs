use thiserror::Error;

/// Errors raised anywhere in the solver pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QesError {
    #[error("power sum {which} has imaginary part {imag:e} above the conjugation tolerance")]
    NonRealCoefficients { which: &'static str, imag: f64 },

    #[error("BAE denominator vanishes at root {index}: {detail}")]
    DenominatorBlowup { index: usize, detail: String },

    #[error("no BAE solution found after {starts} starts (degree {n})")]
    NoSolutionFound { n: usize, starts: usize },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("leading exponent {name} = {value} must be > 0")]
    InvalidExponent { name: &'static str, value: f64 },

    #[error("unsupported family/case combination: {0}")]
    InvalidCase(String),

    #[error("constraint infeasible: {0}")]
    ConstraintInfeasible(String),

    #[error("wavefunction derivative is singular at node r = {r}")]
    NodeSingularity { r: f64 },

    #[error("integrand does not decay: {0}")]
    NotIntegrable(String),

    #[error("no closed form for this integral kind (use quadrature)")]
    UnsupportedKind,

    #[error("coupling `{0}` is not assigned")]
    MissingCoupling(String),

    #[error("no eigenvalue in window ({lo}, {hi})")]
    WindowEmpty { lo: f64, hi: f64 },

    #[error("grid insufficient: {0}")]
    GridInsufficient(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl QesError {
    /// Variant name, for tables and exit-code mapping.
    pub fn kind(&self) -> &'static str {
        match self {
            QesError::NonRealCoefficients { .. } => "NonRealCoefficients",
            QesError::DenominatorBlowup { .. } => "DenominatorBlowup",
            QesError::NoSolutionFound { .. } => "NoSolutionFound",
            QesError::InvalidProblem(_) => "InvalidProblem",
            QesError::InvalidExponent { .. } => "InvalidExponent",
            QesError::InvalidCase(_) => "InvalidCase",
            QesError::ConstraintInfeasible(_) => "ConstraintInfeasible",
            QesError::NodeSingularity { .. } => "NodeSingularity",
            QesError::NotIntegrable(_) => "NotIntegrable",
            QesError::UnsupportedKind => "UnsupportedKind",
            QesError::MissingCoupling(_) => "MissingCoupling",
            QesError::WindowEmpty { .. } => "WindowEmpty",
            QesError::GridInsufficient(_) => "GridInsufficient",
            QesError::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, QesError>;
