use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input outside the domain of an operation (non-positive distance,
    /// empty cluster, fraction outside (0, 1), ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Strong-user power fraction at or above one half: no distance separates
    /// the dominance regimes.
    #[error("infeasible power fraction a1 = {0} (must be below 0.5)")]
    InfeasiblePowerFraction(f64),

    /// Users were not labeled strong/weak by ascending distance.
    #[error("ordering error: {0}")]
    Ordering(String),

    /// The bisection bracket does not straddle a sign change.
    #[error("bracket error: f({lo}) = {f_lo}, f({hi}) = {f_hi} have the same sign")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("config parse error: {0}")]
    ConfigSyntax(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
