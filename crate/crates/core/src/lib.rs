//! Negative-weight single-source shortest paths by reduction to a metered
//! non-negative SSSP oracle.

pub mod dimacs;
pub mod error;
pub mod gen;
pub mod graph;
pub mod ldd;
pub mod negcycle;
pub mod oracle;
pub mod potentials;
pub mod rng;
pub mod scc;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{DirectedGraph, Dist, DistanceVector, EdgeSet, PriceFunction, VertexSet, Weight};
pub use oracle::{CallTag, Dijkstra, Meter, OracleStats, Source, SsspOracle};
pub use negcycle::{solve, Answer, SolveReport};
pub use solver::{sp_main, sp_main_with_retry, SolverConfig, SpMainReport};
pub use verify::CycleWitness;
