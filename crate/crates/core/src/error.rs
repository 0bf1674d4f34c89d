//! Error type shared by every module.

use alloc::string::String;

use thiserror::Error;

/// Errors raised by the analysis and simulation kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A distribution or model parameter violates its invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A map was evaluated outside its domain.
    #[error("domain violation at x = {x}: {detail}")]
    DomainViolation {
        /// Argument that was rejected.
        x: f64,
        /// Which constraint failed.
        detail: &'static str,
    },
    /// `θ` lies outside the moment domain of one of the slope laws.
    #[error("moment divergence at theta = {0}")]
    MomentDivergence(f64),
    /// The requested moment method cannot be used for this law.
    #[error("moment method unavailable: {0}")]
    MethodUnavailable(&'static str),
    /// Quadrature failed to reach its tolerance.
    #[error("quadrature did not converge (estimate {value}, error {error})")]
    QuadratureFailed {
        /// Best available estimate.
        value: f64,
        /// Its error estimate.
        error: f64,
    },
    /// Spectral radius is zero, the eigen-structure is undefined.
    #[error("spectral radius is zero")]
    ZeroSpectralRadius,
    /// Eigenvector normalization `uᵀv = 1` is impossible.
    #[error("eigen-pair is degenerate (orthogonal boundary case)")]
    EigenDegenerate,
    /// `P̂(θ)` needs both right eigenvector components positive.
    #[error("tilted transition matrix is not definable (vanishing eigenvector component)")]
    NotDefinable,
    /// Matrix at `θ = 0` is not stochastic.
    #[error("matrix is not stochastic")]
    NotStochastic,
    /// Driving chain is not irreducible.
    #[error("driving chain is not irreducible")]
    NotIrreducible,
    /// Monte Carlo entry too close to zero to decide a structural zero.
    #[error("ambiguous classification: Monte Carlo entry within tolerance of zero")]
    AmbiguousClassification,
    /// `ρ ≡ 1` on the probe grid.
    #[error("degenerate spectrum: rho is identically one on the probe grid")]
    DegenerateSpectrum,
    /// Log-moment diverges at the requested point.
    #[error("infinite drift at theta = {0}")]
    InfiniteDrift(f64),
    /// The estimator requires a different case of the taxonomy.
    #[error("wrong case: expected {expected}")]
    WrongCase {
        /// Case the operation requires.
        expected: &'static str,
    },
    /// A theorem hypothesis needed for the prediction failed.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    /// Boundary configuration the theory does not cover.
    #[error("unsupported configuration: {0}")]
    Unsupported(&'static str),
    /// No finite envelope for acceptance-rejection.
    #[error("no finite envelope for acceptance-rejection")]
    EnvelopeUnavailable,
    /// Not enough tail observations for the requested order statistic.
    #[error("insufficient tail: {available} positive magnitudes, need {needed}")]
    InsufficientTail {
        /// Positive magnitudes on the requested side.
        available: usize,
        /// Required count (`k + 1`).
        needed: usize,
    },
    /// Coupled chains failed to meet.
    #[error("no contraction certificate after {0} steps")]
    NoContractionCertificate(u64),
}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
