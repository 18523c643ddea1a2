use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error: {msg}")]
pub struct ParseError {
    pub msg: String,
}

impl ParseError {
    pub fn new(msg: impl Into<String>) -> Self {
        ParseError { msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopoError {
    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),
    #[error("exact closure unavailable on probe space {0}")]
    ProbeOnly(String),
    #[error("set is empty")]
    EmptySet,
    #[error("point {0} lies outside the carrier")]
    OutsideCarrier(String),
    #[error("invalid refinement: {0}")]
    SpecViolation(String),
    #[error("point pair lies on the graph: {0}")]
    OnGraph(String),
    #[error("points must be distinct: {0}")]
    SamePoint(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("map lacks capability: {0}")]
    Unsupported(String),
    #[error("illegal move at ply {ply} by {mover}: {reason}")]
    IllegalMove { ply: usize, mover: String, reason: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, TopoError>;
