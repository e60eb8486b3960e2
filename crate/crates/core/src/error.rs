use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{quantity} = {value} is outside the domain {domain}")]
    Domain {
        quantity: &'static str,
        value: f64,
        domain: String,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("events are not chronologically related")]
    NotChronological,

    #[error("degenerate region: rejection acceptance rate {rate:.3e}")]
    DegenerateRegion { rate: f64 },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("hypothesis check failed: {0}")]
    Hypothesis(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn domain(quantity: &'static str, value: f64, domain: impl Into<String>) -> Self {
        Error::Domain {
            quantity,
            value,
            domain: domain.into(),
        }
    }
}
