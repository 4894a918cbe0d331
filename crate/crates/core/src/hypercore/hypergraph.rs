use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};

use super::subsets::{binomial, colex_next, for_each_subset_of, BinomTable, KSet, VertexId};

/// Largest number of rank slots (bits) a hypergraph may allocate.
pub const MAX_RANK_SLOTS: u128 = 1 << 33;

/// A `k`-uniform hypergraph on vertices `0..n`.
///
/// Edges live in a bit array indexed by colexicographic rank, so membership
/// is a table lookup. Values are immutable once built.
#[derive(Clone)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    bits: Vec<u64>,
    edge_count: usize,
    table: Arc<BinomTable>,
}

impl PartialEq for Hypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.k == other.k && self.bits == other.bits
    }
}

impl Eq for Hypergraph {}

impl fmt::Debug for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Hypergraph")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("edges", &self.edge_count)
            .finish()
    }
}

impl Hypergraph {
    pub fn empty(n: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return invalid("uniformity must be at least 1");
        }
        let slots = binomial(n, k);
        if slots > MAX_RANK_SLOTS {
            return Err(Error::TooLarge {
                what: "hypergraph rank table",
                steps: slots,
                threshold: MAX_RANK_SLOTS,
            });
        }
        let words = (slots as usize).div_ceil(64);
        Ok(Hypergraph {
            n,
            k,
            bits: vec![0; words],
            edge_count: 0,
            table: Arc::new(BinomTable::new(n, k)),
        })
    }

    pub fn complete(n: usize, k: usize) -> Result<Self> {
        let mut h = Self::empty(n, k)?;
        let slots = h.rank_slots();
        for r in 0..slots {
            h.set_rank(r);
        }
        Ok(h)
    }

    /// Builds from explicit edges; each edge may be listed in any order but
    /// must have `k` distinct vertices below `n`. Duplicates are rejected.
    pub fn from_edges<I, E>(n: usize, k: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[VertexId]>,
    {
        let mut h = Self::empty(n, k)?;
        let mut buf = Vec::with_capacity(k);
        for e in edges {
            let e = e.as_ref();
            if e.len() != k {
                return invalid(format!("edge {e:?} does not have {k} vertices"));
            }
            buf.clear();
            buf.extend_from_slice(e);
            buf.sort_unstable();
            if buf.windows(2).any(|w| w[0] == w[1]) {
                return invalid(format!("edge {e:?} repeats a vertex"));
            }
            if buf[k - 1] >= n {
                return invalid(format!("edge {e:?} has a vertex outside 0..{n}"));
            }
            let r = h.table.rank(&buf);
            if h.contains_rank(r) {
                return invalid(format!("edge {e:?} listed twice"));
            }
            h.set_rank(r);
        }
        Ok(h)
    }

    /// Builds the hypergraph whose edges are the `k`-sets accepted by `pred`.
    /// The predicate sees each set sorted ascending.
    pub fn from_predicate(n: usize, k: usize, mut pred: impl FnMut(&[VertexId]) -> bool) -> Result<Self> {
        let mut h = Self::empty(n, k)?;
        if k > n {
            return Ok(h);
        }
        let mut cur: Vec<usize> = (0..k).collect();
        let mut r = 0u64;
        loop {
            if pred(&cur) {
                h.set_rank(r);
            }
            r += 1;
            if !colex_next(&mut cur, n) {
                break;
            }
        }
        Ok(h)
    }

    /// Parallel variant of [`Hypergraph::from_predicate`]; the predicate must
    /// be pure. Output is identical to the sequential builder.
    pub fn from_predicate_par(n: usize, k: usize, pred: impl Fn(&[VertexId]) -> bool + Sync) -> Result<Self> {
        use rayon::prelude::*;
        const CHUNK_WORDS: usize = 256;
        let mut h = Self::empty(n, k)?;
        if k > n {
            return Ok(h);
        }
        let slots = h.rank_slots();
        let table = Arc::clone(&h.table);
        h.bits.par_chunks_mut(CHUNK_WORDS).enumerate().for_each(|(ci, words)| {
            let start = (ci * CHUNK_WORDS * 64) as u64;
            let end = (start + (words.len() * 64) as u64).min(slots);
            if start >= end {
                return;
            }
            let mut cur = table.unrank(n, k, start);
            for r in start..end {
                if pred(&cur) {
                    let off = r - start;
                    words[(off / 64) as usize] |= 1 << (off % 64);
                }
                if r + 1 < end {
                    colex_next(&mut cur, n);
                }
            }
        });
        h.edge_count = h.bits.iter().map(|w| w.count_ones() as usize).sum();
        Ok(h)
    }

    fn set_rank(&mut self, r: u64) {
        let (w, b) = ((r / 64) as usize, r % 64);
        if self.bits[w] & (1 << b) == 0 {
            self.bits[w] |= 1 << b;
            self.edge_count += 1;
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// `C(n, k)`, the number of rank slots.
    pub fn rank_slots(&self) -> u64 {
        binomial(self.n, self.k) as u64
    }

    pub fn binom_table(&self) -> &BinomTable {
        &self.table
    }

    #[inline]
    pub fn rank_of(&self, sorted: &[VertexId]) -> u64 {
        self.table.rank(sorted)
    }

    #[inline]
    pub fn contains_rank(&self, r: u64) -> bool {
        (self.bits[(r / 64) as usize] >> (r % 64)) & 1 == 1
    }

    /// Membership for a strictly increasing vertex list of length `k`.
    #[inline]
    pub fn contains(&self, sorted: &[VertexId]) -> bool {
        debug_assert_eq!(sorted.len(), self.k);
        debug_assert!(sorted.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(sorted.iter().all(|&v| v < self.n));
        self.contains_rank(self.table.rank(sorted))
    }

    /// Membership for vertices in any order; repeated vertices give `false`.
    pub fn contains_unsorted(&self, vertices: &[VertexId]) -> bool {
        if vertices.len() != self.k {
            return false;
        }
        let mut stack = [0usize; 16];
        let mut heap = Vec::new();
        let s: &mut [usize] = if vertices.len() <= 16 {
            stack[..vertices.len()].copy_from_slice(vertices);
            &mut stack[..vertices.len()]
        } else {
            heap.extend_from_slice(vertices);
            &mut heap
        };
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
        self.contains(s)
    }

    /// Edges in colexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = KSet> + '_ {
        let (n, k) = (self.n, self.k);
        let table = self.table.clone();
        self.bits.iter().enumerate().flat_map(move |(w, &word)| {
            let table = table.clone();
            BitIter(word).map(move |b| {
                KSet::from_sorted_unchecked(table.unrank(n, k, (w * 64 + b) as u64))
            })
        })
    }

    /// Number of edges contained in `u`.
    pub fn induced_edge_count(&self, u: &[VertexId]) -> usize {
        let mut items = u.to_vec();
        items.sort_unstable();
        items.dedup();
        let mut count = 0;
        for_each_subset_of(&items, self.k, |s| {
            if self.contains(s) {
                count += 1;
            }
        });
        count
    }

    /// `|E(G[T])|`, the number of edges of `self` inside `t`.
    pub fn induced_count_in_kset(&self, t: &[VertexId]) -> usize {
        self.induced_edge_count(t)
    }

    /// All `k`-sets whose every `self.k()`-subset is an edge.
    pub fn cliques(&self, k: usize) -> Result<Vec<KSet>> {
        let l = self.k;
        if k <= l {
            return invalid(format!("clique size {k} must exceed uniformity {l}"));
        }
        let mut out = Vec::new();
        if k > self.n {
            return Ok(out);
        }
        let mut chosen = Vec::with_capacity(k);
        self.extend_cliques(0, k, &mut chosen, &mut out);
        Ok(out)
    }

    fn extend_cliques(&self, from: usize, k: usize, chosen: &mut Vec<usize>, out: &mut Vec<KSet>) {
        if chosen.len() == k {
            out.push(KSet::from_sorted_unchecked(chosen.clone()));
            return;
        }
        let need = k - chosen.len();
        let l = self.k;
        for v in from..=(self.n - need) {
            // every l-subset of chosen + v that contains v must be an edge
            let mut ok = true;
            if chosen.len() + 1 >= l {
                let mut buf = Vec::with_capacity(l);
                for_each_subset_of(chosen, l - 1, |s| {
                    if !ok {
                        return;
                    }
                    buf.clear();
                    buf.extend_from_slice(s);
                    buf.push(v);
                    if !self.contains(&buf) {
                        ok = false;
                    }
                });
            }
            if ok {
                chosen.push(v);
                self.extend_cliques(v + 1, k, chosen, out);
                chosen.pop();
            }
        }
    }

    pub fn complement(&self) -> Hypergraph {
        let slots = self.rank_slots();
        let mut bits: Vec<u64> = self.bits.iter().map(|w| !w).collect();
        let tail = slots % 64;
        if tail != 0 {
            if let Some(last) = bits.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        Hypergraph {
            n: self.n,
            k: self.k,
            bits,
            edge_count: slots as usize - self.edge_count,
            table: self.table.clone(),
        }
    }

    /// Edge-set union of two hypergraphs with the same `n` and `k`.
    pub fn union(&self, other: &Hypergraph) -> Result<Hypergraph> {
        if self.n != other.n || self.k != other.k {
            return invalid("union needs matching vertex count and uniformity");
        }
        let bits: Vec<u64> = self.bits.iter().zip(&other.bits).map(|(a, b)| a | b).collect();
        let edge_count = bits.iter().map(|w| w.count_ones() as usize).sum();
        Ok(Hypergraph {
            n: self.n,
            k: self.k,
            bits,
            edge_count,
            table: self.table.clone(),
        })
    }

    pub fn is_subgraph_of(&self, other: &Hypergraph) -> bool {
        self.n == other.n
            && self.k == other.k
            && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// Text form: `k n m`, then one sorted edge per line, lines in
    /// lexicographic order.
    pub fn to_text(&self) -> String {
        let mut edges: Vec<KSet> = self.edges().collect();
        edges.sort();
        write_sets(self.k, self.n, &edges)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (k, n, sets) = parse_sets(text)?;
        if k == 0 {
            return Err(Error::Parse { line: 1, msg: "uniformity must be positive".into() });
        }
        Hypergraph::from_edges(n, k, sets.iter().map(|s| s.vertices()))
    }
}

pub(crate) fn write_sets(r: usize, n: usize, sets: &[KSet]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{r} {n} {}", sets.len());
    for s in sets {
        let mut first = true;
        for v in s.iter() {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

/// Parses the shared `r n m` + sorted-lines format, checking ordering.
pub(crate) fn parse_sets(text: &str) -> Result<(usize, usize, Vec<KSet>)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    let head: Vec<usize> = parse_numbers(header, 1)?;
    let [r, n, m] = head[..] else {
        return Err(Error::Parse { line: 1, msg: format!("header needs 3 numbers, got {}", head.len()) });
    };
    let mut sets: Vec<KSet> = Vec::with_capacity(m);
    for (idx, line) in lines {
        let vs = parse_numbers(line, idx + 1)?;
        if vs.len() != r {
            return Err(Error::Parse { line: idx + 1, msg: format!("expected {r} vertices") });
        }
        if vs.iter().any(|&v| v >= n) {
            return Err(Error::Parse { line: idx + 1, msg: format!("vertex outside 0..{n}") });
        }
        let set = KSet::from_sorted(vs).map_err(|_| Error::Parse {
            line: idx + 1,
            msg: "vertices must be strictly increasing".into(),
        })?;
        if let Some(prev) = sets.last() {
            if *prev >= set {
                return Err(Error::Parse { line: idx + 1, msg: "lines must be in increasing lexicographic order".into() });
            }
        }
        sets.push(set);
    }
    if sets.len() != m {
        return Err(Error::Parse { line: 1, msg: format!("header promises {m} lines, found {}", sets.len()) });
    }
    Ok((r, n, sets))
}

fn parse_numbers(line: &str, lineno: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<usize>().map_err(|e| Error::Parse { line: lineno, msg: format!("{t:?}: {e}") })
        })
        .collect()
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercore::enumerate_ksubsets;

    fn h3(edges: &[[usize; 3]], n: usize) -> Hypergraph {
        Hypergraph::from_edges(n, 3, edges.iter()).unwrap()
    }

    #[test]
    fn induced_counts() {
        let complete = Hypergraph::complete(5, 3).unwrap();
        assert_eq!(complete.induced_edge_count(&[0, 1, 2, 3]), 4);
        assert_eq!(complete.induced_edge_count(&[0, 1]), 0);
        assert_eq!(complete.induced_edge_count(&[0, 1, 2, 3, 4]), complete.edge_count());

        let h = h3(&[[0, 1, 2], [0, 1, 3], [0, 1, 4]], 5);
        assert_eq!(h.induced_edge_count(&[0, 1, 2, 3]), 2);
        assert_eq!(h.induced_edge_count(&[3, 2, 1, 0, 3]), 2);
    }

    #[test]
    fn cliques_of_cycle_and_extremes() {
        let c5 = Hypergraph::from_edges(5, 2, [[0, 1], [1, 2], [2, 3], [3, 4], [0, 4]]).unwrap();
        assert!(c5.cliques(3).unwrap().is_empty());

        let k6 = Hypergraph::complete(6, 2).unwrap();
        assert_eq!(k6.cliques(4).unwrap().len() as u128, binomial(6, 4));
        assert!(Hypergraph::empty(6, 2).unwrap().cliques(3).unwrap().is_empty());
        assert!(k6.cliques(2).is_err());
        assert!(k6.cliques(7).unwrap().is_empty());

        // brute force over every triple
        let tri: Vec<KSet> = enumerate_ksubsets(5, 3)
            .filter(|t| c5.induced_count_in_kset(t) == 3)
            .collect();
        assert!(tri.is_empty());
    }

    #[test]
    fn induced_count_in_kset_examples() {
        let g = Hypergraph::from_edges(3, 2, [[0, 1], [0, 2]]).unwrap();
        assert_eq!(g.induced_count_in_kset(&[0, 1, 2]), 2);
        let full = Hypergraph::complete(6, 2).unwrap();
        assert_eq!(full.induced_count_in_kset(&[0, 2, 4, 5]) as u128, binomial(4, 2));
        assert_eq!(Hypergraph::empty(6, 2).unwrap().induced_count_in_kset(&[0, 2, 4]), 0);
    }

    #[test]
    fn complement_examples() {
        let e = Hypergraph::empty(6, 3).unwrap();
        let c = Hypergraph::complete(6, 3).unwrap();
        assert_eq!(e.complement(), c);
        assert_eq!(c.complement(), e);
        let g = Hypergraph::from_edges(4, 2, [[0, 1], [2, 3]]).unwrap();
        let gc = Hypergraph::from_edges(4, 2, [[0, 2], [0, 3], [1, 2], [1, 3]]).unwrap();
        assert_eq!(g.complement(), gc);
        assert_eq!(g.complement().complement(), g);
        assert_eq!(g.edge_count() + gc.edge_count(), 6);
    }

    #[test]
    fn sum_of_full_kset_indicators_is_clique_count() {
        let g = Hypergraph::from_edges(
            7,
            2,
            [[0, 1], [0, 2], [1, 2], [1, 3], [2, 3], [3, 4], [4, 5], [5, 6], [4, 6], [0, 3]],
        )
        .unwrap();
        let full = enumerate_ksubsets(7, 3).filter(|t| g.induced_count_in_kset(t) == 3).count();
        assert_eq!(full, g.cliques(3).unwrap().len());
        let full4 = enumerate_ksubsets(7, 4).filter(|t| g.induced_count_in_kset(t) == 6).count();
        assert_eq!(full4, g.cliques(4).unwrap().len());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Hypergraph::from_edges(4, 3, [[0, 1, 1]]).is_err());
        assert!(Hypergraph::from_edges(4, 3, [[0, 1, 4]]).is_err());
        assert!(Hypergraph::from_edges(4, 3, [[0, 1, 2], [2, 1, 0]]).is_err());
        assert!(Hypergraph::from_edges(4, 3, [vec![0, 1]]).is_err());
        assert!(matches!(Hypergraph::empty(1 << 12, 4), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn text_round_trip() {
        let h = h3(&[[0, 1, 4], [0, 1, 2], [1, 2, 3]], 5);
        let text = h.to_text();
        assert_eq!(text, "3 5 3\n0 1 2\n0 1 4\n1 2 3\n");
        let back = Hypergraph::from_text(&text).unwrap();
        assert_eq!(back, h);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn text_parse_errors() {
        assert!(Hypergraph::from_text("3 5 2\n0 1 2\n").is_err());
        assert!(Hypergraph::from_text("3 5 2\n0 1 4\n0 1 2\n").is_err());
        assert!(Hypergraph::from_text("3 5 1\n0 2 1\n").is_err());
        assert!(Hypergraph::from_text("3 5 1\n0 1 9\n").is_err());
        assert!(Hypergraph::from_text("3 5\n").is_err());
        assert!(Hypergraph::from_text("").is_err());
    }

    #[test]
    fn edges_iterate_in_colex_order() {
        let h = Hypergraph::complete(5, 2).unwrap();
        let e: Vec<KSet> = h.edges().collect();
        let all: Vec<KSet> = enumerate_ksubsets(5, 2).collect();
        assert_eq!(e, all);
    }
}
