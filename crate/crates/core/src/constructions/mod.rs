//! Seeded samplers for the separating constructions and their witnesses.
//!
//! Every random choice is a keyed function of `(seed, label, subset)`, so a
//! handle stores no tables and its edge predicate can be evaluated anywhere
//! in any order.

mod census;
mod witness;

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hypercore::{binomial, colex_unrank, BinomTable, Hypergraph, RationalDensity, VertexId, MAX_RANK_SLOTS};
use crate::partitions::OrderedPartition;
use crate::rng::KeyedStream;

pub use census::{octahedron_parity_census, CensusFilter, CensusMode, CensusReport};
pub use witness::{b_witness_parts, color_class_graph, witness_cd_from_a, witness_expand_from_b};

/// Uniform colors in `0..modulus` for the `arity`-subsets of `0..n`.
#[derive(Clone, Debug)]
pub struct ModularColoring {
    arity: usize,
    modulus: u64,
    label: String,
    stream: KeyedStream,
    table: Arc<BinomTable>,
}

impl ModularColoring {
    pub fn new(n: usize, arity: usize, modulus: u64, seed: u64, label: &str) -> Self {
        ModularColoring {
            arity,
            modulus,
            label: label.to_string(),
            stream: KeyedStream::new(seed, label),
            table: Arc::new(BinomTable::new(n, arity)),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Color of a sorted `arity`-set.
    #[inline]
    pub fn color(&self, sorted: &[VertexId]) -> u64 {
        debug_assert_eq!(sorted.len(), self.arity);
        self.stream.below(self.table.rank(sorted), self.modulus)
    }
}

/// Picks, for every sorted `k`-set, the `(k-2)`-subset acting as its head.
#[derive(Clone, Debug)]
pub struct HeadOracle {
    k: usize,
    stream: KeyedStream,
    table: Arc<BinomTable>,
}

impl HeadOracle {
    pub fn new(n: usize, k: usize, seed: u64) -> Self {
        HeadOracle { k, stream: KeyedStream::new(seed, "D/head"), table: Arc::new(BinomTable::new(n, k)) }
    }

    /// Positions `(i, j)`, `i < j`, of the two non-head vertices of `t`.
    #[inline]
    pub fn tails(&self, sorted: &[VertexId]) -> (usize, usize) {
        let choice = self.stream.below(self.table.rank(sorted), binomial(self.k, 2) as u64);
        let pair = colex_unrank(self.k, 2, choice as u128);
        (pair[0], pair[1])
    }

    /// The head of `t` as a sorted vertex list.
    pub fn head(&self, sorted: &[VertexId]) -> Vec<VertexId> {
        let (i, j) = self.tails(sorted);
        sorted.iter().enumerate().filter(|&(c, _)| c != i && c != j).map(|(_, &v)| v).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstructionKind {
    A,
    B,
    D,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub kind: ConstructionKind,
    pub n: usize,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi: Option<OrderedPartition>,
    pub p: RationalDensity,
    pub seed: u64,
}

#[derive(Clone, Debug)]
enum BaseGraph {
    Keyed { stream: KeyedStream, table: Arc<BinomTable> },
    Fixed(Hypergraph),
}

impl BaseGraph {
    #[inline]
    fn contains(&self, sorted: &[VertexId]) -> bool {
        match self {
            BaseGraph::Keyed { stream, table } => stream.bit(table.rank(sorted)),
            BaseGraph::Fixed(g) => g.contains(sorted),
        }
    }
}

#[derive(Clone, Debug)]
enum Rule {
    A(ModularColoring),
    B(Vec<ModularColoring>),
    D { base: BaseGraph, heads: HeadOracle },
}

/// A sampled construction: parameters, the underlying random objects, and
/// the hypergraph, built on first use.
#[derive(Debug)]
pub struct ConstructionHandle {
    params: ConstructionParams,
    rule: Rule,
    graph: OnceLock<Hypergraph>,
}

fn check_size(n: usize, k: usize) -> Result<()> {
    let slots = binomial(n, k);
    if slots > MAX_RANK_SLOTS {
        return Err(Error::TooLarge { what: "construction", steps: slots, threshold: MAX_RANK_SLOTS });
    }
    Ok(())
}

/// `A_l(n, p)`: `W` is an edge when the colors of its `l`-subsets sum to
/// less than `a` modulo `b`.
pub fn sample_a(n: usize, k: usize, l: usize, p: RationalDensity, seed: u64) -> Result<ConstructionHandle> {
    if l < 2 || l + 1 > k {
        return invalid(format!("A needs 2 <= l <= k-1, got l = {l}, k = {k}"));
    }
    check_size(n, k)?;
    let coloring = ModularColoring::new(n, l, p.denom(), seed, "A/c");
    Ok(ConstructionHandle {
        params: ConstructionParams { kind: ConstructionKind::A, n, k, l: Some(l), pi: None, p, seed },
        rule: Rule::A(coloring),
        graph: OnceLock::new(),
    })
}

/// `B_pi(n, p)`: the sorted `k`-set is cut into consecutive blocks of sizes
/// `k_1..k_t`; it is an edge when the block colors sum to less than `a`
/// modulo `b`.
pub fn sample_b(n: usize, pi: &OrderedPartition, p: RationalDensity, seed: u64) -> Result<ConstructionHandle> {
    let k = pi.k();
    check_size(n, k)?;
    let colorings = pi
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &ki)| ModularColoring::new(n, ki, p.denom(), seed, &format!("B/c{}", i + 1)))
        .collect();
    Ok(ConstructionHandle {
        params: ConstructionParams { kind: ConstructionKind::B, n, k, l: None, pi: Some(pi.clone()), p, seed },
        rule: Rule::B(colorings),
        graph: OnceLock::new(),
    })
}

/// `D(n, 1/2)`: with a random `(k-1)`-graph `G` and a random head `X` for
/// each `k`-set `T = X + {y, z}`, `T` is an edge when `X + y` and `X + z`
/// are both edges of `G` or both non-edges.
pub fn sample_d(n: usize, k: usize, seed: u64) -> Result<ConstructionHandle> {
    let base = BaseGraph::Keyed { stream: KeyedStream::new(seed, "D/G"), table: Arc::new(BinomTable::new(n, k - 1)) };
    make_d(n, k, seed, base)
}

/// `D` over a caller-supplied `(k-1)`-graph in place of the random one.
pub fn sample_d_with_base(g: Hypergraph, k: usize, seed: u64) -> Result<ConstructionHandle> {
    if g.k() + 1 != k {
        return invalid(format!("base graph must be {}-uniform", k.saturating_sub(1)));
    }
    let n = g.n();
    make_d(n, k, seed, BaseGraph::Fixed(g))
}

fn make_d(n: usize, k: usize, seed: u64, base: BaseGraph) -> Result<ConstructionHandle> {
    if k < 3 {
        return invalid(format!("D needs k >= 3, got {k}"));
    }
    check_size(n, k)?;
    Ok(ConstructionHandle {
        params: ConstructionParams {
            kind: ConstructionKind::D,
            n,
            k,
            l: None,
            pi: None,
            p: RationalDensity::HALF,
            seed,
        },
        rule: Rule::D { base, heads: HeadOracle::new(n, k, seed) },
        graph: OnceLock::new(),
    })
}

impl ConstructionHandle {
    pub fn params(&self) -> &ConstructionParams {
        &self.params
    }

    pub fn kind(&self) -> ConstructionKind {
        self.params.kind
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn p(&self) -> RationalDensity {
        self.params.p
    }

    /// The coloring of `A`, if this is an `A` handle.
    pub fn a_coloring(&self) -> Option<&ModularColoring> {
        match &self.rule {
            Rule::A(c) => Some(c),
            _ => None,
        }
    }

    /// The block colorings of `B`, if this is a `B` handle.
    pub fn b_colorings(&self) -> Option<&[ModularColoring]> {
        match &self.rule {
            Rule::B(c) => Some(c),
            _ => None,
        }
    }

    /// The head oracle of `D`, if this is a `D` handle.
    pub fn d_heads(&self) -> Option<&HeadOracle> {
        match &self.rule {
            Rule::D { heads, .. } => Some(heads),
            _ => None,
        }
    }

    /// Membership of a `(k-1)`-set in the base graph of `D`.
    pub fn d_base_contains(&self, sorted: &[VertexId]) -> Option<bool> {
        match &self.rule {
            Rule::D { base, .. } => Some(base.contains(sorted)),
            _ => None,
        }
    }

    /// Edge predicate on a sorted `k`-set.
    pub fn is_edge(&self, sorted: &[VertexId]) -> bool {
        debug_assert_eq!(sorted.len(), self.params.k);
        debug_assert!(sorted.windows(2).all(|w| w[0] < w[1]));
        let a = self.params.p.numer();
        match &self.rule {
            Rule::A(c) => {
                let mut sum = 0u64;
                crate::hypercore::for_each_subset_of(sorted, c.arity(), |z| sum += c.color(z));
                sum % c.modulus() < a
            }
            Rule::B(cs) => {
                let mut sum = 0u64;
                let mut start = 0;
                for c in cs {
                    sum += c.color(&sorted[start..start + c.arity()]);
                    start += c.arity();
                }
                sum % cs[0].modulus() < a
            }
            Rule::D { base, heads } => {
                let (i, j) = heads.tails(sorted);
                let mut with_y = [0usize; 16];
                let mut with_z = [0usize; 16];
                let (mut wy, mut wz) = (0, 0);
                for (c, &v) in sorted.iter().enumerate() {
                    if c != j {
                        with_y[wy] = v;
                        wy += 1;
                    }
                    if c != i {
                        with_z[wz] = v;
                        wz += 1;
                    }
                }
                base.contains(&with_y[..wy]) == base.contains(&with_z[..wz])
            }
        }
    }

    /// Edge predicate on any listing of `k` distinct vertices.
    pub fn is_edge_unsorted(&self, vertices: &[VertexId]) -> bool {
        let mut s = vertices.to_vec();
        s.sort_unstable();
        self.is_edge(&s)
    }

    /// The materialized hypergraph, computed in parallel on first call.
    pub fn hypergraph(&self) -> &Hypergraph {
        self.graph.get_or_init(|| {
            Hypergraph::from_predicate_par(self.params.n, self.params.k, |t| self.is_edge(t))
                .expect("size checked when the handle was built")
        })
    }

    /// `|E| / C(n, k)`.
    pub fn density(&self) -> f64 {
        self.hypergraph().edge_count() as f64 / binomial(self.params.n, self.params.k) as f64
    }
}
