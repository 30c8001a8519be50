use thiserror::Error;

/// Crate-wide error type.
///
/// Math-domain failures carry enough context to point at the offending
/// subexpression or point; they map to exit code 2 in the CLI.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    #[error("domain error in `{subexpr}`: {msg}")]
    EvalDomain { subexpr: String, msg: String },

    #[error("unknown symbol `{0}` (not a chart coordinate or declared parameter)")]
    UnknownSymbol(String),

    #[error("metric `{name}` invalid at point {point:?}: {msg}")]
    MetricInvalid {
        name: String,
        point: [f64; 4],
        msg: String,
    },

    #[error("degenerate frame at point {point:?}: {msg}")]
    DegenerateFrame { point: [f64; 4], msg: String },

    #[error("root tracking became ambiguous at s = {s}: {msg}")]
    AmbiguousRoot { s: f64, msg: String },

    #[error("root solver: {0}")]
    Roots(String),

    #[error("geodesic integration failed: {0}")]
    Geodesic(String),

    #[error("hypersurface check failed: {0}")]
    Surface(String),

    #[error("catalog error at line {line}: {msg}")]
    Catalog { line: usize, msg: String },

    #[error("report error: {0}")]
    Report(String),
}

pub type Result<T> = std::result::Result<T, Error>;
