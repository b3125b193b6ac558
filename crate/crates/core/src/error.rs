use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} must be finite and in range, got {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound}")]
    Convergence { estimate: f64, error_bound: f64 },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("non-finite value: {0}")]
    NonFinite(&'static str),

    /// The conditioning event has (numerically) zero probability.
    #[error("conditioning event has probability e^{log_probability} (below 1e-300)")]
    DegenerateConditioning { log_probability: f64 },

    #[error("only {retained} draws landed in the conditioning event, need at least {required}")]
    InsufficientConditioning { retained: u64, required: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}
