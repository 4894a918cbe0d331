//! Pattern hypergraphs: pi-linearity certificates, the 4-cycles `C_{pi,4}`
//! and labeled copy counting.

mod count;
mod linear;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::hypercore::{Hypergraph, KSet, VertexId};

pub use count::{count_labeled, CountResult};
pub use linear::{pi_linear_certificate, PiLinearCertificate, MAX_PATTERN_EDGES, MAX_PATTERN_VERTICES};

/// A small `k`-uniform hypergraph on labeled vertices `0..v`, optionally
/// with named vertex groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternHypergraph {
    graph: Hypergraph,
    groups: Vec<(String, Vec<VertexId>)>,
}

#[derive(Serialize)]
struct PatternJson<'a> {
    v: usize,
    k: usize,
    edges: Vec<KSet>,
    groups: &'a [(String, Vec<VertexId>)],
}

impl PatternHypergraph {
    pub fn new(graph: Hypergraph) -> Self {
        PatternHypergraph { graph, groups: Vec::new() }
    }

    pub fn from_edges<I, E>(v: usize, k: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[VertexId]>,
    {
        Ok(Self::new(Hypergraph::from_edges(v, k, edges)?))
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Ok(Self::new(Hypergraph::from_text(text)?))
    }

    pub fn graph(&self) -> &Hypergraph {
        &self.graph
    }

    pub fn v(&self) -> usize {
        self.graph.n()
    }

    pub fn k(&self) -> usize {
        self.graph.k()
    }

    pub fn edges(&self) -> Vec<KSet> {
        self.graph.edges().collect()
    }

    pub fn m(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn groups(&self) -> &[(String, Vec<VertexId>)] {
        &self.groups
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(PatternJson { v: self.v(), k: self.k(), edges: self.edges(), groups: &self.groups })
            .expect("plain data")
    }
}

/// `C_{pi,4}` for `pi = k1 + k2`: groups `X1, X2` of size `k1` and
/// `Y1, Y2` of size `k2` (numbered in that order), edges `X_i + Y_j`.
pub fn build_cycle(k1: usize, k2: usize) -> Result<PatternHypergraph> {
    if k1 == 0 || k2 == 0 {
        return invalid("cycle parts must be positive");
    }
    let group = |start: usize, len: usize| (start..start + len).collect::<Vec<_>>();
    let x1 = group(0, k1);
    let x2 = group(k1, k1);
    let y1 = group(2 * k1, k2);
    let y2 = group(2 * k1 + k2, k2);
    let mut edges = Vec::new();
    for x in [&x1, &x2] {
        for y in [&y1, &y2] {
            edges.push([x.as_slice(), y.as_slice()].concat());
        }
    }
    let graph = Hypergraph::from_edges(2 * (k1 + k2), k1 + k2, edges)?;
    Ok(PatternHypergraph {
        graph,
        groups: vec![("X1".into(), x1), ("X2".into(), x2), ("Y1".into(), y1), ("Y2".into(), y2)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycles() {
        let c4 = build_cycle(1, 1).unwrap();
        assert_eq!(c4.v(), 4);
        assert_eq!(c4.m(), 4);
        let mut degree = [0; 4];
        for e in c4.edges() {
            for &v in e.iter() {
                degree[v] += 1;
            }
        }
        assert_eq!(degree, [2; 4]);

        let c = build_cycle(2, 1).unwrap();
        assert_eq!((c.v(), c.k(), c.m()), (6, 3, 4));
        assert_eq!(c.groups()[3].1, vec![5]);
        assert!(build_cycle(0, 2).is_err());
    }
}
