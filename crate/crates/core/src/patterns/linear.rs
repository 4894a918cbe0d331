use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::hypercore::{KSet, VertexId};
use crate::partitions::Partition;

use super::PatternHypergraph;

pub const MAX_PATTERN_EDGES: usize = 12;
pub const MAX_PATTERN_VERTICES: usize = 24;

/// An edge ordering with a part decomposition of every edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PiLinearCertificate {
    /// Edges in certificate order.
    pub order: Vec<KSet>,
    /// `parts[i][s]` is `A_{i,s}`, of size `k_s` (parts descending).
    pub parts: Vec<Vec<Vec<VertexId>>>,
}

impl PiLinearCertificate {
    /// Re-checks the certificate against the definition, independently of
    /// the search that produced it.
    pub fn verify(&self, f: &PatternHypergraph, pi: &Partition) -> bool {
        let mut listed: Vec<KSet> = self.order.clone();
        listed.sort();
        let mut edges = f.edges();
        edges.sort();
        if listed != edges || self.parts.len() != self.order.len() {
            return false;
        }
        for (i, e) in self.order.iter().enumerate() {
            let parts = &self.parts[i];
            let sizes: Vec<usize> = parts.iter().map(|p| p.len()).collect();
            if sizes != pi.parts() {
                return false;
            }
            let mut all: Vec<VertexId> = parts.concat();
            all.sort_unstable();
            if all != e.vertices() {
                return false;
            }
            for earlier in &self.order[..i] {
                let common: Vec<VertexId> = earlier.iter().copied().filter(|v| e.contains(v)).collect();
                if !parts.iter().any(|p| common.iter().all(|v| p.contains(v))) {
                    return false;
                }
            }
        }
        true
    }
}

/// Searches for an ordering of the edges of `f` witnessing pi-linearity.
///
/// Whether edge `e` may come next depends only on which edges precede it,
/// so the search runs over subsets of placed edges; it is exhaustive, and
/// `None` means no ordering exists.
pub fn pi_linear_certificate(f: &PatternHypergraph, pi: &Partition) -> Result<Option<PiLinearCertificate>> {
    if pi.k() != f.k() {
        return invalid(format!("{pi} does not partition k = {}", f.k()));
    }
    let edges = f.edges();
    let m = edges.len();
    if m > MAX_PATTERN_EDGES || f.v() > MAX_PATTERN_VERTICES {
        return Err(Error::TooLarge {
            what: "pi-linearity search",
            steps: 1u128 << m.min(127),
            threshold: 1 << MAX_PATTERN_EDGES,
        });
    }
    let full = (1usize << m) - 1;
    // parent[mask] = last edge placed to reach mask
    let mut parent: Vec<Option<usize>> = vec![None; 1 << m];
    let mut reached = vec![false; 1 << m];
    reached[0] = true;
    for mask in 0..=full {
        if !reached[mask] {
            continue;
        }
        for i in 0..m {
            if mask >> i & 1 == 1 || reached[mask | 1 << i] {
                continue;
            }
            if split_edge(&edges, i, mask, pi).is_some() {
                reached[mask | 1 << i] = true;
                parent[mask | 1 << i] = Some(i);
            }
        }
    }
    if !reached[full] {
        return Ok(None);
    }
    let mut order_idx = Vec::with_capacity(m);
    let mut mask = full;
    while mask != 0 {
        let i = parent[mask].expect("reached states have parents");
        order_idx.push(i);
        mask &= !(1 << i);
    }
    order_idx.reverse();
    let mut placed = 0usize;
    let mut parts = Vec::with_capacity(m);
    for &i in &order_idx {
        parts.push(split_edge(&edges, i, placed, pi).expect("feasible by construction"));
        placed |= 1 << i;
    }
    Ok(Some(PiLinearCertificate { order: order_idx.iter().map(|&i| edges[i].clone()).collect(), parts }))
}

/// Splits edge `i` into parts of sizes `pi` so that its intersection with
/// every edge in `placed` falls inside one part.
fn split_edge(edges: &[KSet], i: usize, placed: usize, pi: &Partition) -> Option<Vec<Vec<VertexId>>> {
    let e = &edges[i];
    let k = e.arity();
    // union-find over positions of e: vertices sharing an earlier edge
    // must land in the same part
    let mut root: Vec<usize> = (0..k).collect();
    fn find(root: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    for (j, other) in edges.iter().enumerate() {
        if placed >> j & 1 == 0 {
            continue;
        }
        let common: Vec<usize> = (0..k).filter(|&c| other.contains(&e[c])).collect();
        for w in common.windows(2) {
            let (a, b) = (find(&mut root, w[0]), find(&mut root, w[1]));
            root[a] = b;
        }
    }
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut comp_of = vec![usize::MAX; k];
    for c in 0..k {
        let r = find(&mut root, c);
        if comp_of[r] == usize::MAX {
            comp_of[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[comp_of[r]].push(e[c]);
    }
    comps.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let mut remaining = pi.parts().to_vec();
    let mut bins: Vec<Vec<VertexId>> = vec![Vec::new(); remaining.len()];
    if pack(&comps, 0, &mut remaining, &mut bins) {
        for b in &mut bins {
            b.sort_unstable();
        }
        Some(bins)
    } else {
        None
    }
}

/// Exact bin packing of components into parts, largest part tried first.
fn pack(comps: &[Vec<VertexId>], c: usize, remaining: &mut [usize], bins: &mut [Vec<VertexId>]) -> bool {
    if c == comps.len() {
        return remaining.iter().all(|&r| r == 0);
    }
    let size = comps[c].len();
    for s in 0..remaining.len() {
        // bins with equal leftover capacity are interchangeable
        if remaining[s] < size || remaining[..s].contains(&remaining[s]) {
            continue;
        }
        remaining[s] -= size;
        bins[s].extend_from_slice(&comps[c]);
        if pack(comps, c + 1, remaining, bins) {
            return true;
        }
        bins[s].truncate(bins[s].len() - size);
        remaining[s] += size;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::enumerate_partitions;
    use crate::patterns::build_cycle;

    fn pi(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn single_edge_and_matching() {
        let one = PatternHypergraph::from_edges(3, 3, [[0, 1, 2]]).unwrap();
        let matching = PatternHypergraph::from_edges(9, 3, [[0, 1, 2], [3, 4, 5], [6, 7, 8]]).unwrap();
        for p in enumerate_partitions(3) {
            for f in [&one, &matching] {
                let cert = pi_linear_certificate(f, &p).unwrap().unwrap();
                assert!(cert.verify(f, &p));
            }
        }
    }

    #[test]
    fn shared_pair() {
        let f = PatternHypergraph::from_edges(4, 3, [[0, 1, 2], [0, 1, 3]]).unwrap();
        let cert = pi_linear_certificate(&f, &pi("2,1")).unwrap().unwrap();
        assert!(cert.verify(&f, &pi("2,1")));
        assert!(pi_linear_certificate(&f, &pi("1,1,1")).unwrap().is_none());
    }

    #[test]
    fn cycle_is_linear_for_its_own_partition() {
        for (k1, k2) in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1)] {
            let c = build_cycle(k1, k2).unwrap();
            let p = Partition::new(vec![k1, k2]).unwrap();
            let cert = pi_linear_certificate(&c, &p).unwrap().unwrap();
            assert!(cert.verify(&c, &p), "{k1},{k2}: {cert:?}");
        }
    }

    #[test]
    fn tampered_certificates_fail() {
        let f = PatternHypergraph::from_edges(4, 3, [[0, 1, 2], [0, 1, 3]]).unwrap();
        let mut cert = pi_linear_certificate(&f, &pi("2,1")).unwrap().unwrap();
        cert.parts[1] = vec![vec![0, 3], vec![1]];
        assert!(!cert.verify(&f, &pi("2,1")));
    }

    #[test]
    fn size_guard() {
        let edges: Vec<[usize; 2]> = (0..13).map(|i| [i, i + 1]).collect();
        let path = PatternHypergraph::from_edges(14, 2, edges).unwrap();
        assert!(pi_linear_certificate(&path, &pi("1,1")).is_err());
    }
}
