//! Certification of completely positive qubit dynamics generated by
//! hierarchy equations of motion (HEOMs).
//!
//! A HEOM couples the system density operator to a stack of auxiliary
//! operators through a constant generator. This crate represents the
//! induced extended dynamical map in Bloch coordinates, reduces it to the
//! few scalar degrees of freedom that govern complete positivity, and
//! searches for a quadratic monotone that certifies positivity of the
//! process matrix — either for all times, after an initial violation
//! window, or down to a proven eigenvalue floor.
//!
//! The main entry points are [`models::build_model`],
//! [`propagator::propagate`], and [`certifier::certify`].

pub mod bloch;
pub mod certifier;
pub mod lifting;
mod linalg;
pub mod models;
pub mod nonmarkov;
pub mod poly;
pub mod propagator;
pub mod sdp;
pub mod series;
pub mod synthesis;

pub use bloch::{ChiMatrix, ExtendedGenerator, PauliTransfer, SandwichTerm};
pub use certifier::{Certificate, CertStatus};
pub use models::{HeomModel, ReducedSystem};
pub use propagator::Trajectory;

/// Library error type shared across modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("argument out of range: {0}")]
    Argument(String),
    #[error("superoperator is not Hermiticity-preserving (max imaginary part {0:.3e})")]
    NotHermiticityPreserving(f64),
    #[error("unknown model '{0}'")]
    UnknownModel(String),
    #[error("missing parameter '{0}'")]
    MissingParameter(String),
    #[error("model reduction failed: {0}")]
    Reduction(String),
    #[error("target is not quadratic on the reachable set (residual {0:.3e}); use lift_polynomial")]
    NotQuadratic(f64),
    #[error("no finite asymptote: reduced generator has eigenvalues with nonnegative real part")]
    NoAsymptote,
    #[error("SDP failure: {0}")]
    Sdp(String),
    #[error("synthesis failed at level {level}: constraint residual {residual:.3e}")]
    Synthesis { level: usize, residual: f64 },
    #[error("invalid model specification: {0}")]
    ModelSpec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
