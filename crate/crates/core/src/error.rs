use thiserror::Error;

/// Errors raised by the library. Each variant names the failing quantity.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("vertex {vertex} out of range 1..={count}")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("unknown desired set `{0}`")]
    UnknownSet(String),
    #[error("desired set `{name}` expects {expected} parameters, got {got}")]
    ParameterCount {
        name: String,
        expected: String,
        got: usize,
    },
    #[error("expression error at column {column}: {message}")]
    Expression { column: usize, message: String },
    #[error("degenerate propagation: extra vector tail is zero")]
    DegeneratePropagation,
    #[error("invalid gain: {0}")]
    InvalidGain(String),
    #[error("missing neighbor value: robot {robot} has no value from robot {neighbor}")]
    MissingNeighbor { robot: usize, neighbor: usize },
    #[error("infeasible desired differences: {0}")]
    InfeasibleDeltas(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("singular heading for robot {robot}: planar norm squared {planar_sq:e} <= {floor:e}")]
    SingularHeading {
        robot: usize,
        planar_sq: f64,
        floor: f64,
    },
    #[error("no valid heading gain: d = {d} must satisfy 0 <= d < min(-a, b) = {limit}")]
    NoValidGain { d: f64, limit: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
