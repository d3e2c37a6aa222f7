use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Lambert {branch} is undefined at x = {x:e}")]
    LambertDomain { branch: &'static str, x: f64 },

    #[error("invalid search interval [{lb}, {ub}]")]
    InvalidInterval { lb: f64, ub: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time allocation outside the feasible region: {0}")]
    TimeDomain(String),

    #[error("pair {pair}: {reason}")]
    Pair { pair: usize, reason: String },

    #[error("exhaustive oracle supports at most {max} pairs, got {got}")]
    TooManyPairs { max: usize, got: usize },

    #[error("no cellular-mode pair in the campaign; uplink/downlink split is undefined")]
    NoCellularPairs,

    #[error("trial {trial} (cell {cell}) failed: {source}")]
    Trial {
        cell: usize,
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn pair(pair: usize, source: Error) -> Error {
        match source {
            e @ Error::Pair { .. } => e,
            other => Error::Pair {
                pair,
                reason: other.to_string(),
            },
        }
    }

    /// True for failures that come from the numerics rather than the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::LambertDomain { .. }
            | Error::InvalidInterval { .. }
            | Error::TimeDomain(_)
            | Error::Pair { .. }
            | Error::NoCellularPairs => true,
            Error::Trial { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
