//! Error type shared across the crate: input validation, physics-regime
//! rejections (broken phase, lost positivity), and integrator diagnostics.

use num_complex::Complex64;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A matrix input was not square.
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    /// NaN or infinity found where finite data is required.
    #[error("non-finite entries in {what}")]
    NonFinite { what: &'static str },

    /// Operands of incompatible dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Eigenvector matrix too ill-conditioned to trust a diagonalization.
    #[error(
        "matrix is numerically defective: right-eigenvector condition {cond:.3e} \
         exceeds the 1/{tol:.1e} threshold"
    )]
    DefectiveMatrix { cond: f64, tol: f64 },

    /// Hermiticity check failed.
    #[error("matrix is not Hermitian: relative residual {residual:.3e} > {tol:.1e}")]
    NotHermitian { residual: f64, tol: f64 },

    /// Positive-definiteness check failed; carries the offending eigenvalue.
    #[error("matrix is not positive definite: minimal eigenvalue {min_eig:.6e}")]
    NotPositiveDefinite { min_eig: f64 },

    /// The spectrum has imaginary parts beyond tolerance, so no positive
    /// metric exists (broken phase). Carries the offending eigenvalues.
    #[error("spectrum is not real (broken phase): offending eigenvalues [{}]", fmt_eigs(.eigenvalues))]
    ComplexSpectrum { eigenvalues: Vec<Complex64> },

    /// Metric weight vector rejected.
    #[error("bad metric weights: {reason}")]
    BadWeights { reason: String },

    /// A map lost invertibility; carries the condition number at failure.
    #[error("map is numerically singular: condition number {cond:.3e}")]
    SingularMap { cond: f64 },

    /// The similarity transform did not produce a Hermitian partner, i.e. the
    /// supplied map is inconsistent with the Hamiltonian.
    #[error(
        "hermitization failed: residual {residual:.3e} > {tol:.1e}; \
         the map is inconsistent with the Hamiltonian"
    )]
    HermitizationFailed { residual: f64, tol: f64 },

    /// State/observable/metric/map inputs that do not belong together.
    #[error("inconsistent inputs: {reason}")]
    InconsistentTriple { reason: String },

    /// Too few grid points for the requested stencil.
    #[error("need at least {needed} grid points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    /// The Hamiltonian is not an observable of the initial metric.
    #[error(
        "initial observability violated: intertwining residual {residual:.3e} > {tol:.1e} at t0"
    )]
    InitialObservabilityViolated { residual: f64, tol: f64 },

    /// The initial observable is not coupled to the initial metric.
    #[error("initial coupling violated: residual {residual:.3e} > {tol:.1e} at t0")]
    InitialCouplingViolated { residual: f64, tol: f64 },

    /// The evolved metric stopped being positive definite.
    #[error("metric positivity lost at t = {t}: minimal eigenvalue {min_eig:.6e}")]
    PositivityLost { t: f64, min_eig: f64 },

    /// Step-doubling error estimate exceeded the configured budget.
    #[error("integration step rejected at t = {t}: error estimate {estimate:.3e} exceeds budget {budget:.3e}")]
    StepRejected { t: f64, estimate: f64, budget: f64 },

    /// Model or grid parameters outside the valid domain.
    #[error("bad parameters: {reason}")]
    BadParams { reason: String },

    /// Observable preset name not recognized.
    #[error("unknown observable preset `{name}`")]
    UnknownPreset { name: String },

    /// Failure inside the LAPACK-backed kernels.
    #[error("linear-algebra backend failure: {0}")]
    Linalg(String),
}

impl Error {
    /// Stable variant name, used by callers that map errors to exit codes or
    /// want the kind in a report without parsing the message.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "NotSquare",
            Error::NonFinite { .. } => "NonFinite",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DefectiveMatrix { .. } => "DefectiveMatrix",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::ComplexSpectrum { .. } => "ComplexSpectrum",
            Error::BadWeights { .. } => "BadWeights",
            Error::SingularMap { .. } => "SingularMap",
            Error::HermitizationFailed { .. } => "HermitizationFailed",
            Error::InconsistentTriple { .. } => "InconsistentTriple",
            Error::InsufficientPoints { .. } => "InsufficientPoints",
            Error::InitialObservabilityViolated { .. } => "InitialObservabilityViolated",
            Error::InitialCouplingViolated { .. } => "InitialCouplingViolated",
            Error::PositivityLost { .. } => "PositivityLost",
            Error::StepRejected { .. } => "StepRejected",
            Error::BadParams { .. } => "BadParams",
            Error::UnknownPreset { .. } => "UnknownPreset",
            Error::Linalg(_) => "Linalg",
        }
    }
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}

fn fmt_eigs(eigs: &[Complex64]) -> String {
    eigs.iter()
        .map(|z| format!("{:+.9}{:+.9}i", z.re, z.im))
        .collect::<Vec<_>>()
        .join(", ")
}
