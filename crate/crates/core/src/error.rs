use thiserror::Error;

use crate::family::Family;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("expected a tree of family {expected}, got one outside it")]
    FamilyMismatch { expected: Family },
    #[error("not an edge of the tree: {0:?}")]
    NotAnEdge(Vec<usize>),
    #[error("not an effective white angle: vertex {path:?}, angle {angle}")]
    NotEffectiveAngle { path: Vec<usize>, angle: usize },
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("slot {slot} out of range for arity {arity}")]
    IndexOutOfRange { slot: usize, arity: usize },
    #[error("{what} = {n} exceeds the configured cap {cap}")]
    CapExceeded {
        what: &'static str,
        n: usize,
        cap: usize,
    },
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("corrupt complex: {0}")]
    CorruptComplex(String),
    #[error("arity overflow: {0}")]
    ArityOverflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
