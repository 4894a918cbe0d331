//! Hypergraph representation and subset-enumeration kernels.
//!
//! Vertices are `0..n`. Subsets of a fixed size are identified with their
//! colexicographic rank, which indexes the edge bit array of a
//! [`Hypergraph`].

mod density;
mod family;
mod hypergraph;
mod subsets;

pub use density::{fraction_string, to_f64, Exact, RationalDensity};
pub use family::SubsetFamily;
pub use hypergraph::{Hypergraph, MAX_RANK_SLOTS};
pub use subsets::{
    binomial, colex_next, colex_rank, colex_unrank, enumerate_ksubsets, factorial, falling_factorial,
    for_each_ksubset, for_each_subset_of, multinomial, BinomTable, KSet, KSubsets, VertexId,
};
