use thiserror::Error;

/// Library-wide error type.
///
/// The CLI maps variants to exit codes: `Argument`, `Parse`, and `Degenerate`
/// are caller mistakes or documented refusals (exit 2), `Range`, `Numeric`,
/// and `Eval` are evaluation failures (exit 3).
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument: a precondition on inputs was violated.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Query outside the closure of a function's range.
    #[error("value {value} outside range [{lo}, {hi}]")]
    Range { value: f64, lo: f64, hi: f64 },

    /// A numerical routine failed to converge; carries its best estimate.
    #[error("numerical failure: {message} (best estimate {best})")]
    Numeric { message: String, best: f64 },

    /// A user-supplied function produced a non-finite value where a finite
    /// one is required.
    #[error("evaluation error: {0}")]
    Eval(String),

    /// The requested conversion exists only as a degenerate object; the
    /// message describes the structure instead of fake values.
    #[error("degenerate: {0}")]
    Degenerate(String),

    /// Malformed spec file or manifest.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub fn numeric(msg: impl Into<String>, best: f64) -> Self {
        Error::Numeric {
            message: msg.into(),
            best,
        }
    }
}
