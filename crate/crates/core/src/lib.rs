//! Shortest-path Steiner arborescences on shallow graphs.
//!
//! The crate builds shortest path subgraphs, reduces the Steiner problem on
//! them to set cover, and approximates it with a greedy cover followed by a
//! BFS tree and a DFS expansion inside the terminal-induced subgraph. An exact
//! enumeration oracle and the classical reductions are included for checking.

pub mod generate;
pub mod graph;
pub mod instance;
pub mod io;
pub mod oracle;
pub mod par;
pub mod reductions;
pub mod set_cover;
pub mod sps;
pub mod steiner;
mod subsets;
pub mod tree;

pub use graph::{Edge, Graph, GraphError, VertexId, Weight};
pub use instance::{Instance, InstanceError};
pub use oracle::{Oracle, OracleBudget, OracleError};
pub use par::Execution;
pub use set_cover::{CoverSolution, SetCoverInstance};
pub use sps::{build_sps, SpSubgraph};
pub use steiner::{
    approx_uvdst, approx_vdst, solve_sspt, solve_weighted_sspt, verify_solution, BoundCertificate, SolutionReport,
    SolveError,
};
pub use tree::Arborescence;
