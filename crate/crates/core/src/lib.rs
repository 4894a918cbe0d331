//! Quasirandomness measures for k-uniform hypergraphs.
//!
//! The crate is organised by subsystem:
//!
//! * [`hypercore`]: hypergraphs stored as bit arrays over colexicographic
//!   ranks, plus the subset enumeration kernels everything else uses.
//! * [`partitions`]: proper partitions of `k`, refinement, and the
//!   implication poset of the properties Disc / Expand / CD / Dev.
//! * [`measures`]: discrepancy, expansion counts, clique discrepancy,
//!   octahedron signs and (restricted) deviation sums.
//! * [`constructions`]: seeded samplers for the separating constructions
//!   `A_l(n,p)`, `B_pi(n,p)`, `D(n,1/2)` and their failure witnesses.
//! * [`patterns`]: pi-linearity certificates, 4-cycles and labeled copy counts.
//! * [`cdells`]: the finite identities behind the collapse of CD(l,s).
//! * [`devtheory`]: the deviation monotonicity and Cauchy-Schwarz inequalities.
//! * [`rng`]: counter-based seeded randomness shared by samplers and estimators.
//! * [`report`]: the versioned JSON / CSV result format.
//! * [`suites`]: seeded batches of the exact identity checks.

pub mod cdells;
pub mod constructions;
pub mod devtheory;
mod error;
pub mod hypercore;
pub mod measures;
pub mod partitions;
pub mod patterns;
pub mod report;
pub mod rng;
pub mod suites;

pub use error::{Error, Result};
pub use hypercore::{binomial, Hypergraph, KSet, RationalDensity, SubsetFamily, VertexId};
