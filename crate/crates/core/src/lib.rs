//! Rank-degree sampling of directed follow networks.
//!
//! The crate is organised around a simulated network API ([`oracle`]) that a
//! pool of walkers ([`sampler`]) queries under per-key rate budgets. The
//! collected sample can then be scored against the ground truth
//! ([`evaluation`]), reduced to its k-core ([`kcore`]), partitioned into
//! communities ([`communities`]) and characterised by keywords ([`keywords`]).
//!
//! Numeric routines are generic over [`Real`]; the aliases below fix them to
//! `f64`, which is what the command-line tool uses.

pub mod communities;
pub mod evaluation;
pub mod generate;
pub mod graph;
pub mod io;
pub mod kcore;
pub mod keywords;
pub mod oracle;
pub mod pagerank;
pub mod profile;
pub mod reference;
pub mod rng;
pub mod sampler;
pub mod scalar;

pub use graph::{DirectedGraph, Edge, GraphError, NodeId};
pub use profile::{NodeProfile, Profiles};
pub use scalar::Real;

/// PageRank output in double precision.
pub type PageRank = pagerank::PageRank<f64>;
/// PageRank parameters in double precision.
pub type PageRankConfig = pagerank::PageRankConfig<f64>;
/// Seven-number summary in double precision.
pub type Summary = evaluation::Summary<f64>;
/// Coverage table in double precision.
pub type CoverageReport = evaluation::CoverageReport<f64>;
/// Keyword ranking in double precision.
pub type KeywordResult = keywords::KeywordResult<f64>;
