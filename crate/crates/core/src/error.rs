use thiserror::Error;

/// Errors raised by the numerical engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid field configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported unit conversion: {from} -> {to}")]
    UnknownUnits { from: String, to: String },

    #[error("no saddle points found: {0}")]
    NoSaddles(String),

    #[error("degenerate saddle at wt = {re_wt:.6} + {im_wt:.6}i (|S''| = {d2s:.3e})")]
    DegenerateSaddle { re_wt: f64, im_wt: f64, d2s: f64 },

    #[error("Newton iteration failed: {0}")]
    Newton(String),

    #[error("path tracing failed after {steps} steps: {reason}")]
    Trace { reason: String, steps: usize },

    #[error("no consistent integration contour: {0}")]
    Topology(String),

    #[error("saddle continuation failed: {0}")]
    Continuation(String),

    #[error("coalescence search failed: {0}")]
    Coalescence(String),

    #[error("table error: {0}")]
    Table(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
