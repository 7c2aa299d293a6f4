use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("operator is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator has non-finite entries")]
    NonFinite,

    #[error("state is not Hermitian (max |rho - rho^dag| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("state trace is {trace:e}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("state is not positive (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("degenerate uncoupled dimer: omega_a == omega_b with zero coupling")]
    DegenerateModel,

    #[error("coupling matrix is not symmetric (max deviation {deviation:e})")]
    NonSymmetricCouplings { deviation: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),

    #[error("negative time interval {0}")]
    NegativeTime(f64),

    #[error("integration step too large: state drifted by {drift:e}")]
    StepSize { drift: f64 },

    #[error("response order {0} is not supported (expected 1, 2 or 3)")]
    InvalidOrder(usize),

    #[error("sign pattern has {found} entries, expected {expected}")]
    PatternArity { expected: usize, found: usize },

    #[error("detection time {detection} precedes the last pulse at {last_pulse}")]
    DetectionBeforePulse { detection: f64, last_pulse: f64 },

    #[error("pulses are not strictly ordered in time")]
    UnorderedPulses,

    #[error("quadrature not converged: step halving changed the result by {relative_change:e} (relative)")]
    Quadrature { relative_change: f64 },

    #[error("grid is not uniform")]
    NonUniformGrid,

    #[error("input state is not classical (max exciton-basis coherence {coherence:e})")]
    InputNotClassical { coherence: f64 },

    #[error("control system is ill-conditioned (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("need at least {needed} observations, got {found}")]
    InsufficientObservations { needed: usize, found: usize },

    #[error("no control values supplied")]
    EmptyControls,
}
