use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("component mismatch: {0}")]
    ComponentMismatch(String),

    #[error("invalid exponent {0}: expected a value in [1, inf]")]
    InvalidExponent(f64),

    #[error("exponent {0} outside the open interval (1, inf)")]
    ExponentNotInterior(f64),

    #[error("shell index {index} out of range 0..={max}")]
    ShellOutOfRange { index: usize, max: usize },

    #[error("partition needs at least three dyadic shells; grid gives {0}")]
    TooFewShells(usize),

    #[error("spectral support violates the ball of radius {radius}: found |xi| = {found}")]
    SupportViolation { radius: f64, found: f64 },

    #[error("symbol '{name}' is not elliptic: {reason}")]
    NotElliptic { name: String, reason: String },

    #[error("symbol '{name}' of order {order} overflows double range on this grid")]
    OrderOverflow { name: String, order: f64 },

    #[error("direct quantization of '{name}' needs {cost} symbol evaluations (limit {limit})")]
    QuantizationTooLarge { name: String, cost: u128, limit: u128 },

    #[error("unknown symbol '{0}'")]
    UnknownSymbol(String),

    #[error("hypotheses violated: {}", .0.join("; "))]
    HypothesisViolation(Vec<String>),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("fixed-point iteration is not contracting: {0}")]
    NonContraction(String),

    #[error("decay window invalid: {0}")]
    InvalidWindow(String),

    #[error("bad field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
