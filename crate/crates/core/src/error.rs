use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("infeasible starting point: {0}")]
    Infeasible(String),

    #[error("codebook needs at least as many beams as transmit elements (L = {beams} < N_t = {n_tx}); the probing covariance is only a scaled identity when L >= N_t")]
    TooFewBeams { beams: usize, n_tx: usize },

    #[error("sensing response vanishes at {theta} rad; Cramér-Rao bound is not finite")]
    DegenerateResponse { theta: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown scheme tag `{0}`")]
    UnknownScheme(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
