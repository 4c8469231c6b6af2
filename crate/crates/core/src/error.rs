use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("negative argument {0} (must be >= 0)")]
    NegativeArgument(String),

    #[error("invalid piecewise polynomial: {0}")]
    InvalidPiecewise(String),

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),

    #[error("invalid Jacobi data: {0}")]
    InvalidJacobi(String),

    /// A Jacobi coefficient beyond the stored depth was requested.
    #[error("Jacobi depth {depth} exceeded: {symbol}_{index} is not available")]
    DepthExceeded {
        symbol: char,
        index: usize,
        depth: usize,
    },

    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),

    #[error("arity {got} too small, need at least {need}")]
    ArityTooSmall { got: usize, need: usize },

    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("moment order {order} too large for depth {depth}")]
    MomentOrder { order: usize, depth: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
