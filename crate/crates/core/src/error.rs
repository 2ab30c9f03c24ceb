use thiserror::Error;

use crate::graph::EdgeId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("edge {edge} has weight {weight} outside the bound |w| <= {bound}")]
    WeightOutOfRange { edge: EdgeId, weight: i64, bound: i128 },

    #[error("weights up to {max_abs} on {n} vertices would overflow the scaled arithmetic ({detail})")]
    WeightOverflow { n: usize, max_abs: i128, detail: &'static str },

    #[error("oracle received a negative weight {weight} on edge {edge}")]
    NegativeWeightRejected { edge: EdgeId, weight: i128 },

    #[error("oracle received a negative attachment weight {weight} at vertex {vertex}")]
    NegativeAttachmentRejected { vertex: usize, weight: i128 },

    #[error("recursion depth {depth} exceeded the cutoff {cutoff}")]
    RecursionDepthExceeded { depth: usize, cutoff: usize },

    #[error("FixDAGEdges precondition violated at edge {edge} (reweighted weight {weight})")]
    PreconditionViolated { edge: EdgeId, weight: i128 },

    #[error("retry budget of {restarts} restarts exhausted: {diagnostics}")]
    RetryBudgetExhausted { restarts: usize, diagnostics: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("internal invariant broken: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
