use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A lattice mapping had no value at a site the caller needed.
    #[error("{field} is not defined at (n={n}, t={t})")]
    Totality { field: &'static str, n: i64, t: i64 },

    #[error("(n={n}, t={t}) violates the parity constraint n + t even")]
    Parity { n: i64, t: i64 },

    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
