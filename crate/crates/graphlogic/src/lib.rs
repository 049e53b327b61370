//! Graphs as formulas: modular decomposition into prime connectives,
//! sequent calculi over the resulting formulas, cut-elimination and a
//! deep-inference system acting directly on graphs.

pub mod decomp;
pub mod error;
pub mod formula;
pub mod gen;
pub mod glk;
pub mod graph;
pub mod gs;
pub mod perm;
pub mod sequent;

pub use error::{DecompError, FormulaError, GraphError, GsError, ProofError};
pub use graph::{GraphContext, LabeledGraph, Literal, VertexId, VertexMap};
