//! Rank of random sparse binary matrices with `k` ones per column.
//!
//! The matrix is the vertex-edge incidence matrix of a random `k`-uniform
//! hypergraph. The crate provides bit-packed GF(2) elimination, 2-core
//! peeling with the exact identity `rank = m1 + rank(core)`, seeded samplers
//! for the column models, the asymptotic formulas (fixed points, thresholds,
//! core sizes, rank, full-rank probability, minimum-weight-basis limit) and a
//! Monte Carlo harness that checks them against simulation.

pub mod error;
pub mod experiments;
pub mod format;
pub mod gf2;
pub mod hypergraph;
pub mod sampler;
pub mod theory;

pub use error::{Error, Result};
pub use gf2::{n_star, rank, span_size_oracle, zero_rows, ColumnSet, Gf2Matrix, RankEngine};


pub use hypergraph::{peel_two_core, Hypergraph, PeelResult};
pub use sampler::SeedSpec;
