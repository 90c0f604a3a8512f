use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("chain is reducible: state {to} is not reachable from state {from}")]
    Reducible { from: usize, to: usize },

    #[error("Fourier grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("no convergence after {iterations} iterations: {detail}")]
    NonConvergence { iterations: usize, detail: String },

    #[error("price {price} is outside the attainable range [{lo}, {hi}]")]
    Unattainable { price: f64, lo: f64, hi: f64 },

    #[error("{operation} does not support option style {style}")]
    UnsupportedStyle {
        operation: &'static str,
        style: String,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for failures caused by the numerics rather than by the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::GridTooCoarse(_)
                | Error::NonConvergence { .. }
                | Error::Numerical(_)
                | Error::Unattainable { .. }
        )
    }
}
