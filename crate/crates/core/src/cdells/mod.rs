//! Finite identities behind the collapse of CD(l, s).
//!
//! An ordered vertex partition `P = (P_0, .., P_{k-1})` gives every vertex
//! set a *pattern*: the set of part indices it meets, stored as a bitmask
//! over `[k]`. Restricting an `l`-graph to a family of size-`l` patterns,
//! counting transversal `k`-sets, and the inclusion-exclusion maps over
//! patterns are all exact and cheap at the sizes these checks run at.

mod identities;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::hypercore::{binomial, for_each_ksubset, for_each_subset_of, Hypergraph, VertexId};

pub use identities::{
    base_case_check, cliques_of_type, complement_general_check, complement_threshold_check,
    overcount_identity_check, partite_claims_check, ComplementReport, OvercountReport,
    PartiteClaimsReport,
};

/// Ordered partition of `0..n` into `k` nonempty parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexKPartition {
    k: usize,
    part_of: Vec<usize>,
}

impl VertexKPartition {
    /// `part_of[v]` is the index of the part holding `v`.
    pub fn new(k: usize, part_of: Vec<usize>) -> Result<Self> {
        if k == 0 || k > 31 {
            return invalid(format!("partition needs 1..=31 parts, got {k}"));
        }
        let mut seen = vec![false; k];
        for (v, &i) in part_of.iter().enumerate() {
            if i >= k {
                return invalid(format!("vertex {v} assigned to part {i} of {k}"));
            }
            seen[i] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return invalid(format!("part {i} is empty"));
        }
        Ok(VertexKPartition { k, part_of })
    }

    /// Builds from explicit parts, which must cover `0..n` exactly.
    pub fn from_parts(n: usize, parts: &[Vec<VertexId>]) -> Result<Self> {
        let mut part_of = vec![usize::MAX; n];
        for (i, part) in parts.iter().enumerate() {
            for &v in part {
                if v >= n {
                    return invalid(format!("vertex {v} outside 0..{n}"));
                }
                if part_of[v] != usize::MAX {
                    return invalid(format!("vertex {v} lies in two parts"));
                }
                part_of[v] = i;
            }
        }
        if let Some(v) = part_of.iter().position(|&i| i == usize::MAX) {
            return invalid(format!("vertex {v} is in no part"));
        }
        Self::new(parts.len(), part_of)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.part_of.len()
    }

    pub fn part_of(&self, v: VertexId) -> usize {
        self.part_of[v]
    }

    pub fn parts(&self) -> Vec<Vec<VertexId>> {
        let mut out = vec![Vec::new(); self.k];
        for (v, &i) in self.part_of.iter().enumerate() {
            out[i].push(v);
        }
        out
    }

    /// Bitmask of the parts `set` meets.
    #[inline]
    pub fn pattern(&self, set: &[VertexId]) -> u32 {
        set.iter().fold(0, |m, &v| m | 1 << self.part_of[v])
    }

    pub fn full_mask(&self) -> u32 {
        (1u32 << self.k) - 1
    }

    fn check_vertices(&self, g: &Hypergraph) -> Result<()> {
        if g.n() != self.n() {
            return invalid(format!("partition covers {} vertices, graph has {}", self.n(), g.n()));
        }
        Ok(())
    }
}

/// A family `R` of `l`-subsets of `[k]`, kept as sorted bitmasks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionPatternSet {
    k: usize,
    l: usize,
    masks: Vec<u32>,
}

impl IntersectionPatternSet {
    pub fn new(k: usize, l: usize, patterns: &[Vec<usize>]) -> Result<Self> {
        let mut masks = Vec::with_capacity(patterns.len());
        for p in patterns {
            masks.push(pattern_mask(k, l, p)?);
        }
        Self::from_masks(k, l, masks)
    }

    pub fn from_masks(k: usize, l: usize, mut masks: Vec<u32>) -> Result<Self> {
        if l == 0 || l > k || k > 31 {
            return invalid(format!("patterns of size {l} over [{k}] are not supported"));
        }
        for &m in &masks {
            if m >> k != 0 || m.count_ones() as usize != l {
                return invalid(format!("mask {m:#b} is not an {l}-subset of [{k}]"));
            }
        }
        masks.sort_unstable();
        masks.dedup();
        Ok(IntersectionPatternSet { k, l, masks })
    }

    /// Every `l`-subset of `[k]`.
    pub fn all(k: usize, l: usize) -> Result<Self> {
        Self::from_masks(k, l, all_masks(k, l))
    }

    pub fn empty(k: usize, l: usize) -> Result<Self> {
        Self::from_masks(k, l, Vec::new())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn masks(&self) -> &[u32] {
        &self.masks
    }

    pub fn contains_mask(&self, m: u32) -> bool {
        self.masks.binary_search(&m).is_ok()
    }

    pub fn patterns(&self) -> Vec<Vec<usize>> {
        self.masks.iter().map(|&m| mask_members(m)).collect()
    }
}

pub(crate) fn pattern_mask(k: usize, l: usize, pattern: &[usize]) -> Result<u32> {
    let mut m = 0u32;
    for &i in pattern {
        if i >= k || k > 31 {
            return invalid(format!("pattern index {i} outside [{k}]"));
        }
        m |= 1 << i;
    }
    if m.count_ones() as usize != l || pattern.len() != l {
        return invalid(format!("pattern {pattern:?} is not an {l}-subset of [{k}]"));
    }
    Ok(m)
}

/// All `l`-subsets of `[k]` as masks, colex order.
pub(crate) fn all_masks(k: usize, l: usize) -> Vec<u32> {
    let mut out = Vec::new();
    for_each_ksubset(k, l, |s| out.push(s.iter().fold(0, |m, &i| m | 1 << i)));
    out
}

fn mask_members(m: u32) -> Vec<usize> {
    (0..32).filter(|i| m >> i & 1 == 1).collect()
}

/// `G_{P,R}`: the edges of `g` whose pattern lies in `r`.
pub fn restrict(g: &Hypergraph, p: &VertexKPartition, r: &IntersectionPatternSet) -> Result<Hypergraph> {
    p.check_vertices(g)?;
    if r.k() != p.k() || r.l() != g.k() {
        return invalid(format!(
            "patterns are {}-subsets of [{}], graph is {}-uniform with {} parts",
            r.l(),
            r.k(),
            g.k(),
            p.k()
        ));
    }
    let kept: Vec<_> = g.edges().filter(|e| r.contains_mask(p.pattern(e))).collect();
    Hypergraph::from_edges(g.n(), g.k(), kept)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TransversalCounts {
    /// `|W(G, P, s)|`.
    pub w: u64,
    /// `|W(G, P, s) ∩ E(H)|` when a host graph was supplied.
    pub w_in_h: Option<u64>,
}

/// Counts the `k`-sets meeting every part of `p` that induce exactly `s`
/// edges of `g`, optionally also those that are edges of `h`.
pub fn transversal_counts(
    g: &Hypergraph,
    p: &VertexKPartition,
    s: usize,
    h: Option<&Hypergraph>,
) -> Result<TransversalCounts> {
    p.check_vertices(g)?;
    let k = p.k();
    let top = binomial(k, g.k());
    if s == 0 || s as u128 > top {
        return invalid(format!("threshold {s} outside 1..={top}"));
    }
    check_host(h, g.n(), k)?;
    let full = p.full_mask();
    let (mut w, mut w_h) = (0u64, 0u64);
    for_each_ksubset(g.n(), k, |t| {
        if p.pattern(t) == full && g.induced_count_in_kset(t) == s {
            w += 1;
            if h.is_some_and(|h| h.contains(t)) {
                w_h += 1;
            }
        }
    });
    Ok(TransversalCounts { w, w_in_h: h.map(|_| w_h) })
}

pub(crate) fn check_host(h: Option<&Hypergraph>, n: usize, k: usize) -> Result<()> {
    if let Some(h) = h {
        if h.n() != n || h.k() != k {
            return invalid(format!(
                "host graph is {}-uniform on {} vertices, expected {k}-uniform on {n}",
                h.k(),
                h.n()
            ));
        }
    }
    Ok(())
}

/// `F = G_{P,R} ∪ {X : pattern(X) = I}`. The caller guarantees `I ∉ R`.
pub fn augment_f(g_restricted: &Hypergraph, p: &VertexKPartition, i: &[usize]) -> Result<Hypergraph> {
    p.check_vertices(g_restricted)?;
    let target = pattern_mask(p.k(), g_restricted.k(), i)?;
    Hypergraph::from_predicate(g_restricted.n(), g_restricted.k(), |x| {
        p.pattern(x) == target || g_restricted.contains(x)
    })
}

/// The maps `f` and `g` over subsets `A ⊆ [k]`, indexed by bitmask.
///
/// `f(A)` counts `k`-sets `T` with `e_F(T) >= threshold` whose pattern is
/// exactly `A`; `g(A)` counts those whose pattern lies inside `A`. The
/// `_h` variants only count edges of the host graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IeCounts {
    pub k: usize,
    pub threshold: usize,
    pub f_kn: Vec<u64>,
    pub g_kn: Vec<u64>,
    pub f_h: Option<Vec<u64>>,
    pub g_h: Option<Vec<u64>>,
}

impl IeCounts {
    pub fn full(&self) -> usize {
        (1 << self.k) - 1
    }

    /// `g(A) = Σ_{B ⊆ A} f(B)` for every `A`, in both variants.
    pub fn g_is_sum_of_f(&self) -> bool {
        let check = |f: &[u64], g: &[u64]| {
            (0..f.len()).all(|a| subsets_of(a).map(|b| f[b]).sum::<u64>() == g[a])
        };
        check(&self.f_kn, &self.g_kn) && pair(&self.f_h, &self.g_h, check)
    }

    /// `f(A) = Σ_{B ⊆ A} (-1)^{|A|-|B|} g(B)` for every `A`, in both variants.
    pub fn f_is_mobius_of_g(&self) -> bool {
        let check = |f: &[u64], g: &[u64]| {
            (0..f.len()).all(|a| {
                let total: i128 = subsets_of(a)
                    .map(|b| {
                        let sign = if (a.count_ones() - b.count_ones()) % 2 == 0 { 1 } else { -1 };
                        sign * g[b] as i128
                    })
                    .sum();
                total == f[a] as i128
            })
        };
        check(&self.f_kn, &self.g_kn) && pair(&self.f_h, &self.g_h, check)
    }
}

fn pair(f: &Option<Vec<u64>>, g: &Option<Vec<u64>>, check: impl Fn(&[u64], &[u64]) -> bool) -> bool {
    match (f, g) {
        (Some(f), Some(g)) => check(f, g),
        _ => true,
    }
}

/// Submasks of `a`, including `0` and `a`.
fn subsets_of(a: usize) -> impl Iterator<Item = usize> {
    let mut next = Some(a);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & a) };
        Some(cur)
    })
}

/// Computes `f` by classifying each threshold `k`-set by its pattern and
/// `g` separately by enumerating `k`-sets inside the union of the chosen
/// parts, so the Möbius relations between them are a real check.
pub fn ie_counts(f: &Hypergraph, p: &VertexKPartition, h: Option<&Hypergraph>, threshold: usize) -> Result<IeCounts> {
    p.check_vertices(f)?;
    let k = p.k();
    check_host(h, f.n(), k)?;
    let size = 1usize << k;
    let mut f_kn = vec![0u64; size];
    let mut f_h = vec![0u64; size];
    for_each_ksubset(f.n(), k, |t| {
        if f.induced_count_in_kset(t) >= threshold {
            let a = p.pattern(t) as usize;
            f_kn[a] += 1;
            if h.is_some_and(|h| h.contains(t)) {
                f_h[a] += 1;
            }
        }
    });
    let parts = p.parts();
    let mut g_kn = vec![0u64; size];
    let mut g_h = vec![0u64; size];
    for a in 0..size {
        let inside: Vec<VertexId> = (0..k).filter(|i| a >> i & 1 == 1).flat_map(|i| parts[i].clone()).collect();
        let mut inside = inside;
        inside.sort_unstable();
        for_each_subset_of(&inside, k, |t| {
            if f.induced_count_in_kset(t) >= threshold {
                g_kn[a] += 1;
                if h.is_some_and(|h| h.contains(t)) {
                    g_h[a] += 1;
                }
            }
        });
    }
    let host = h.is_some();
    Ok(IeCounts {
        k,
        threshold,
        f_kn,
        g_kn,
        f_h: host.then_some(f_h),
        g_h: host.then_some(g_h),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercore::enumerate_ksubsets;

    fn three_pairs() -> VertexKPartition {
        VertexKPartition::from_parts(6, &[vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap()
    }

    #[test]
    fn partition_validation() {
        assert!(VertexKPartition::new(3, vec![0, 1, 1]).is_err());
        assert!(VertexKPartition::new(2, vec![0, 2]).is_err());
        assert!(VertexKPartition::from_parts(3, &[vec![0], vec![0, 1, 2]]).is_err());
        assert!(VertexKPartition::from_parts(3, &[vec![0], vec![1]]).is_err());
        let p = three_pairs();
        assert_eq!(p.parts(), vec![vec![0, 1], vec![2, 3], vec![4, 5]]);
        assert_eq!(p.pattern(&[1, 4]), 0b101);
    }

    #[test]
    fn pattern_set_validation() {
        assert!(IntersectionPatternSet::new(3, 2, &[vec![0, 0]]).is_err());
        assert!(IntersectionPatternSet::new(3, 2, &[vec![0, 3]]).is_err());
        assert_eq!(IntersectionPatternSet::all(4, 2).unwrap().len(), 6);
        let r = IntersectionPatternSet::new(3, 2, &[vec![1, 2], vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(r.patterns(), vec![vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn restrict_examples() {
        let g = Hypergraph::complete(6, 2).unwrap();
        let p = three_pairs();
        let one = IntersectionPatternSet::new(3, 2, &[vec![0, 1]]).unwrap();
        let got: Vec<Vec<usize>> = restrict(&g, &p, &one).unwrap().edges().map(|e| e.into_vec()).collect();
        assert_eq!(got.len(), 4);
        assert!(got.iter().all(|e| e[0] < 2 && (2..4).contains(&e[1])));

        let none = IntersectionPatternSet::empty(3, 2).unwrap();
        assert_eq!(restrict(&g, &p, &none).unwrap().edge_count(), 0);

        // all patterns: exactly the edges that do not sit inside one part
        let all = IntersectionPatternSet::all(3, 2).unwrap();
        assert_eq!(restrict(&g, &p, &all).unwrap().edge_count(), 15 - 3);
    }

    #[test]
    fn transversal_examples() {
        let p = VertexKPartition::new(3, vec![0, 1, 2]).unwrap();
        let empty = Hypergraph::empty(3, 2).unwrap();
        let got = transversal_counts(&empty, &p, 1, None).unwrap();
        assert_eq!((got.w, got.w_in_h), (0, None));

        let full = Hypergraph::complete(3, 2).unwrap();
        let h = Hypergraph::complete(3, 3).unwrap();
        let got = transversal_counts(&full, &p, 3, Some(&h)).unwrap();
        assert_eq!((got.w, got.w_in_h), (1, Some(1)));
        let got = transversal_counts(&full, &p, 3, Some(&Hypergraph::empty(3, 3).unwrap())).unwrap();
        assert_eq!(got.w_in_h, Some(0));
        assert!(transversal_counts(&full, &p, 4, None).is_err());
    }

    #[test]
    fn augment_with_empty_base_is_the_pattern_graph() {
        let p = three_pairs();
        let f = augment_f(&Hypergraph::empty(6, 2).unwrap(), &p, &[0, 2]).unwrap();
        let expected: Vec<Vec<usize>> = vec![vec![0, 4], vec![0, 5], vec![1, 4], vec![1, 5]];
        let mut got: Vec<Vec<usize>> = f.edges().map(|e| e.into_vec()).collect();
        got.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn ie_counts_corner_values() {
        let p = three_pairs();
        let f = Hypergraph::complete(6, 2).unwrap();
        let h = Hypergraph::from_edges(6, 3, [[0, 2, 4], [0, 1, 2]]).unwrap();
        let ie = ie_counts(&f, &p, Some(&h), 3).unwrap();
        assert_eq!(ie.g_kn[0], 0);
        assert_eq!(ie.g_kn[ie.full()], 20);
        assert_eq!(ie.f_kn[ie.full()], 8);
        assert_eq!(ie.f_h.as_ref().unwrap()[ie.full()], 1);
        assert!(ie.g_is_sum_of_f());
        assert!(ie.f_is_mobius_of_g());
    }

    #[test]
    fn submask_iteration() {
        let mut got: Vec<usize> = subsets_of(0b101).collect();
        got.sort_unstable();
        assert_eq!(got, vec![0, 1, 4, 5]);
        assert_eq!(subsets_of(0).count(), 1);
    }

    #[test]
    fn restrict_is_monotone_in_patterns() {
        let g = Hypergraph::from_predicate(7, 2, |e| (e[0] * 3 + e[1]) % 4 != 0).unwrap();
        let p = VertexKPartition::new(3, vec![0, 1, 2, 0, 1, 2, 2]).unwrap();
        let masks = all_masks(3, 2);
        for sub in 0..8u32 {
            let r: Vec<u32> = (0..3).filter(|i| sub >> i & 1 == 1).map(|i| masks[i]).collect();
            let small = restrict(&g, &p, &IntersectionPatternSet::from_masks(3, 2, r).unwrap()).unwrap();
            assert!(small.is_subgraph_of(&g));
            for extra in 0..3 {
                let r2: Vec<u32> = (0..3).filter(|i| sub >> i & 1 == 1 || *i == extra).map(|i| masks[i]).collect();
                let big = restrict(&g, &p, &IntersectionPatternSet::from_masks(3, 2, r2).unwrap()).unwrap();
                assert!(small.is_subgraph_of(&big));
            }
        }
        assert_eq!(enumerate_ksubsets(3, 2).count(), masks.len());
    }
}
