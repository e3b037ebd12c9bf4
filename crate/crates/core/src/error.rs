use thiserror::Error;

/// Errors raised by the library. Verification failures are never errors; they
/// are reported through the various report structs.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("operands live over different painted sets")]
    GroundMismatch,
    #[error("painted set too large: {0} labels (at most 64 supported)")]
    TooManyLabels(usize),
    #[error("ring constructions need at least 3 labels and 2 whites, got {whites} whites and {blacks} blacks")]
    NotRingReady { whites: u32, blacks: u32 },
    #[error("invalid two-partition: {0}")]
    BadPartition(String),
    #[error("partition is not painted stable: {0}")]
    Unstable(String),
    #[error("family is not good: {0}")]
    NotGood(String),
    #[error("partition is not an edge of the tree")]
    NotAnEdge,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("quadruple not allowed: {0}")]
    QuadrupleNotAllowed(String),
    #[error("top degree check failed: {0}")]
    TopDegree(String),
    #[error("pairing in degree {0} is degenerate")]
    DegeneratePairing(usize),
    #[error("correlator arity {arity} exceeds order {order}")]
    Arity { arity: usize, order: usize },
    #[error("missing cyclic map for painted set with {whites} whites and {blacks} blacks")]
    MissingCyclicMap { whites: u32, blacks: u32 },
    #[error("series has a nonzero constant term")]
    ConstantTerm,
    #[error("vector is not primitive: {0}")]
    NotPrimitive(String),
    #[error("closedness violated: {0}")]
    NotClosed(String),
    #[error("variable names collide: {0}")]
    VariableCollision(String),
    #[error("linear system is inconsistent: {0}")]
    Inconsistent(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
