use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("spectral coefficients are not Hermitian (max defect {defect:e})")]
    NonHermitianInput { defect: f64 },

    #[error("multiplier `{label}` is singular at zero frequency and declares no value there")]
    SymbolSingularAtZero { label: String },

    #[error("mollifier width {eps} is below two grid spacings ({min})")]
    KernelUnresolved { eps: f64, min: f64 },

    #[error("homogeneous operator applied to a field with mean {mean:e}")]
    HomogeneousNonzeroMean { mean: f64 },

    #[error("sampled diffeomorphism is not invertible (slope {slope:e} at node {node})")]
    NonInvertibleDiffeo { node: usize, slope: f64 },

    #[error("sample list is empty")]
    EmptySamples,

    #[error("flow lines crossed at t = {t} (grid under-resolved)")]
    MonotonicityLost { t: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("{n_points} grid points cannot resolve {scales} dyadic scales (need {required})")]
    UnresolvedScale { n_points: usize, scales: usize, required: usize },

    #[error("shift integrand is singular: lambda * max f = {peak}")]
    SingularIntegrand { peak: f64 },

    #[error("could not bracket shift {target}: I(lambda_max) = {reached}")]
    BracketFailure { target: f64, reached: f64 },

    #[error("endpoint correction did not converge after {iterations} iterations (error {error:e})")]
    EndpointCorrectionDiverged { iterations: usize, error: f64 },

    #[error("CFL guard tripped at t = {t}: courant number {courant}")]
    CflViolation { t: f64, courant: f64 },

    #[error("quadrature did not converge: {0}")]
    QuadratureNonconvergent(String),

    #[error("argument outside the domain of {0}")]
    DomainError(String),

    #[error("oscillatory integral converges too slowly (current estimate {estimate:e})")]
    SlowDecayWarning { estimate: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Variant name, stable for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::NonHermitianInput { .. } => "NonHermitianInput",
            Error::SymbolSingularAtZero { .. } => "SymbolSingularAtZero",
            Error::KernelUnresolved { .. } => "KernelUnresolved",
            Error::HomogeneousNonzeroMean { .. } => "HomogeneousNonzeroMean",
            Error::NonInvertibleDiffeo { .. } => "NonInvertibleDiffeo",
            Error::EmptySamples => "EmptySamples",
            Error::MonotonicityLost { .. } => "MonotonicityLost",
            Error::GridMismatch => "GridMismatch",
            Error::UnresolvedScale { .. } => "UnresolvedScale",
            Error::SingularIntegrand { .. } => "SingularIntegrand",
            Error::BracketFailure { .. } => "BracketFailure",
            Error::EndpointCorrectionDiverged { .. } => "EndpointCorrectionDiverged",
            Error::CflViolation { .. } => "CflViolation",
            Error::QuadratureNonconvergent(_) => "QuadratureNonconvergent",
            Error::DomainError(_) => "DomainError",
            Error::SlowDecayWarning { .. } => "SlowDecayWarning",
        }
    }

    /// Whether the error reports violated preconditions of the inputs rather
    /// than a failure of the computation itself.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::HomogeneousNonzeroMean { .. }
                | Error::KernelUnresolved { .. }
                | Error::GridMismatch
                | Error::UnresolvedScale { .. }
                | Error::DomainError(_)
                | Error::EmptySamples
                | Error::SymbolSingularAtZero { .. }
        )
    }
}
