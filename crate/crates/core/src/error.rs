use std::path::PathBuf;

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("argument {value} outside the support of {what}")]
    Domain { what: &'static str, value: f64 },

    /// The two-parameter CDF as originally written, `1 - (1/(shape + x))^scale`,
    /// is negative at the origin whenever `shape < 1`.
    #[error(
        "the as-written two-parameter CDF requires shape >= 1 (got {shape}); \
         below that 1 - (1/(shape + x))^scale is negative at x = 0"
    )]
    FidelityDomain { shape: f64 },

    #[error("invalid window ({t0}, {t1}] for horizon {horizon}")]
    InvalidWindow { t0: f64, t1: f64, horizon: f64 },

    #[error("invalid search interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("precondition violated: {0}")]
    Precondition(&'static str),

    #[error("quantile level {0} outside (0, 1)")]
    InvalidQuantile(f64),

    #[error("empty sample")]
    EmptySample,

    #[error("occupancy series has an empty observation window")]
    EmptySeries,

    #[error("blocking fraction undefined: the driving trace had no arrivals")]
    NoArrivals,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn positive_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}
