use crate::solver::TraceEntry;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad caller input: point outside the domain closure, negative argument,
    /// shape mismatch, malformed file.
    #[error("input: {0}")]
    Input(String),

    /// A family violated a structural assumption (non-monotone derivative,
    /// vanishing values where positivity is required, indices out of range).
    #[error("invalid family: {0}")]
    InvalidFamily(String),

    /// Quadrature failure: non-finite integrand, pair budget exceeded.
    #[error("quadrature: {0}")]
    Quadrature(String),

    /// An operation precondition does not hold (support touching the
    /// boundary, asymmetric grid for a reflection, cutoff out of range).
    #[error("precondition: {0}")]
    Precondition(String),

    /// Inconsistent or incomplete configuration.
    #[error("config: {0}")]
    Config(String),

    /// Bracketing or bisection failed to converge.
    #[error("divergence: {0}")]
    Divergence(String),

    /// The defining improper integral of the Sobolev conjugate diverges
    /// at zero; the conjugate is not defined for this family/order.
    #[error("integrability condition violated: {0}")]
    IntegrabilityCondition(String),

    /// Mountain-pass geometry could not be certified.
    #[error("geometry: {0}")]
    Geometry(String),

    /// Solver stopped above its residual tolerance; the iteration trace is
    /// attached for post-mortem.
    #[error("non-convergence: {message}")]
    NonConvergence {
        message: String,
        trace: Vec<TraceEntry>,
    },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
