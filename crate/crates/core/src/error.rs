use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument lies outside the domain of the operation.
    #[error("{name} = {value} is out of domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The quadrature window or resolution could not reach the requested accuracy.
    #[error("quadrature residual {residual:e} exceeds tolerance {tolerance:e}")]
    Accuracy { residual: f64, tolerance: f64 },

    #[error("no uncertainty crossover: s_p1 * s_p2 = {product} <= (noise / learning_rate)^2 = {bound}")]
    NoCrossover { product: f64, bound: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    /// The Wundt curve cannot produce a non-negative acceptable range.
    #[error("invalid Wundt shape: {0}")]
    Shape(String),

    #[error("unknown figure id `{0}` (expected fig1, fig2, fig3 or fig4)")]
    UnknownFigure(String),

    #[error("invalid override `{key}`: {reason}")]
    InvalidOverride { key: String, reason: String },

    #[error("metric `{metric}` cannot be used with this sweep: {reason}")]
    MetricMismatch { metric: String, reason: String },

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            reason,
        }
    }
}

/// Requires `value` to be finite and strictly positive.
pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::domain(name, value, "must be finite and > 0"))
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::domain(name, value, "must be finite and >= 0"))
    }
}

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::domain(name, value, "must be finite"))
    }
}
