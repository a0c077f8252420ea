use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("arity mismatch for {what}: expected {expected}, found {found}")]
    ArityMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("type syntax error at offset {offset}: {reason}")]
    TypeSyntax { offset: usize, reason: String },
    #[error("{function}: type {ty} not supported")]
    NotSupported { function: String, ty: String },
    #[error("descriptor already registered for {0}")]
    DuplicateDescriptor(String),
    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("malformed value: {0}")]
    MalformedValue(String),
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(String),
    #[error("constructor `{0}` already registered")]
    DuplicateConstructor(String),
    #[error("no representation registered for {0}")]
    NoRepresentation(String),
    #[error("no generic view for {0}")]
    NoView(String),
    #[error("no constructor matches the value")]
    NoMatchingConstructor,
    #[error("value does not fit type {ty}: {reason}")]
    IllTyped { ty: String, reason: String },
    #[error("effect brand mismatch: expected {expected}, found {found}")]
    BrandMismatch { expected: String, found: String },
    #[error("rewrite fuel exhausted after {0} rule firings")]
    FuelExhausted(u64),
    #[error("recursion depth limit {0} exceeded")]
    DepthExceeded(usize),
    #[error("malformed bytes at offset {offset}: {reason}")]
    MalformedBytes { offset: usize, reason: String },
    #[error("incompatible at {path}: expected {expected}, found {found}")]
    Incompatible {
        path: String,
        expected: String,
        found: String,
    },
    #[error("representation rejected at {path}")]
    RepresentationRejected { path: String },
    #[error("no descriptor for {0}")]
    NoDescriptor(String),
    #[error("parse error at line {line}, column {col}: {reason}")]
    Parse { line: usize, col: usize, reason: String },
    #[error("value graph is cyclic at node {0}")]
    CyclicValue(u32),
}

impl Error {
    pub(crate) fn ill_typed(ty: impl ToString, reason: impl Into<String>) -> Self {
        Error::IllTyped {
            ty: ty.to_string(),
            reason: reason.into(),
        }
    }
}
