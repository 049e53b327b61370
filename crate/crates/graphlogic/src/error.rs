use thiserror::Error;

use crate::graph::VertexId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(VertexId),
    #[error("self-loop on {0}")]
    SelfLoop(VertexId),
    #[error("vertex {0} is unlabeled")]
    Unlabeled(VertexId),
    #[error("hole {0} carries a label")]
    LabeledHole(VertexId),
    #[error("arity mismatch: expected {expected} parts, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("parts overlap at vertex {0}")]
    OverlappingParts(VertexId),
    #[error("map is not a bijection between the vertex sets")]
    NotBijection,
    #[error("malformed graph: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    #[error("cannot decompose the empty graph")]
    EmptyGraph,
    #[error("unknown connective `{0}`")]
    UnknownConnective(String),
    #[error("arity {arity} exceeds the configured cap {cap}")]
    Capacity { arity: usize, cap: usize },
    #[error("graph is not prime")]
    NotPrime,
    #[error("connective `{name}` has arity {arity}, got {got} children")]
    Arity {
        name: String,
        arity: usize,
        got: usize,
    },
    #[error("malformed base: {0}")]
    Format(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown connective `{0}`")]
    UnknownConnective(String),
    #[error("connective `{name}` expects {expected} arguments, got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("formula is not pure")]
    NotPure,
    #[error("empty formula graph")]
    Empty,
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Errors raised by proof construction and transformation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("proof rejected: {0}")]
    Rejected(String),
    #[error("{0}")]
    Domain(String),
    #[error("step budget exhausted after {0} steps")]
    Budget(usize),
    #[error("malformed proof: {0}")]
    Format(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub type ProofResult<T> = Result<T, ProofError>;

/// Errors raised by the deep inference system on graphs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GsError {
    #[error("derivation rejected at node {}: {message}", fmt_path(path))]
    Rejected { path: Vec<usize>, message: String },
    #[error("{0}")]
    Domain(String),
    #[error("malformed derivation: {0}")]
    Format(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Proof(#[from] ProofError),
}

fn fmt_path(path: &[usize]) -> String {
    if path.is_empty() {
        "root".into()
    } else {
        path.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}
