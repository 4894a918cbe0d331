use crate::error::{invalid, Result};
use crate::hypercore::{for_each_subset_of, Hypergraph, KSet, SubsetFamily};

use super::{ConstructionHandle, ConstructionKind};

/// The `l`-graph of zero-colored `l`-sets of an `A_l` handle. Every
/// `k`-clique of it has color sum zero, hence is an edge of `A`.
pub fn witness_cd_from_a(handle: &ConstructionHandle) -> Result<Hypergraph> {
    color_class_graph(handle, 0)
}

/// The `l`-graph of `l`-sets of an `A_l` handle carrying `color`. For
/// `A_2(n, 1/2)` and color one, a triple is an edge exactly when it
/// induces an even number of these pairs.
pub fn color_class_graph(handle: &ConstructionHandle, color: u64) -> Result<Hypergraph> {
    let Some(c) = handle.a_coloring() else {
        return invalid("color classes need an A handle");
    };
    if color >= c.modulus() {
        return invalid(format!("color {color} outside 0..{}", c.modulus()));
    }
    Hypergraph::from_predicate_par(handle.n(), c.arity(), |s| c.color(s) == color)
}

/// Splits `0..n` into `t` consecutive ranges; the first `n mod t` ranges
/// get `ceil(n/t)` vertices and the rest `floor(n/t)`.
pub fn b_witness_parts(n: usize, t: usize) -> Vec<Vec<usize>> {
    let (q, r) = (n / t, n % t);
    let mut start = 0;
    (0..t)
        .map(|i| {
            let len = q + usize::from(i < r);
            let part: Vec<usize> = (start..start + len).collect();
            start += len;
            part
        })
        .collect()
}

/// Families `S_1..S_t` for a `B_pi` handle with `e(S_1..S_t) = 0`: `S_i`
/// holds the `k_i`-sets of part `X_i` colored zero (colored `a` for the last
/// family). Parts are consecutive, so a cross tuple is cut into exactly
/// these blocks and its color sum is `a`, which is never below `a`.
pub fn witness_expand_from_b(handle: &ConstructionHandle) -> Result<Vec<SubsetFamily>> {
    if handle.kind() != ConstructionKind::B {
        return invalid("the expansion witness needs a B handle");
    }
    let colorings = handle.b_colorings().expect("B handle");
    let t = colorings.len();
    let a = handle.p().numer();
    let parts = b_witness_parts(handle.n(), t);
    colorings
        .iter()
        .zip(&parts)
        .enumerate()
        .map(|(i, (c, part))| {
            let want = if i + 1 == t { a } else { 0 };
            let mut members = Vec::new();
            for_each_subset_of(part, c.arity(), |s| {
                if c.color(s) == want {
                    members.push(KSet::from_sorted_unchecked(s.to_vec()));
                }
            });
            SubsetFamily::new(handle.n(), c.arity(), members)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{sample_a, sample_b, sample_d};
    use crate::measures::expansion_count;
    use crate::partitions::OrderedPartition;
    use crate::RationalDensity;

    #[test]
    fn parts_are_almost_equal() {
        let sizes: Vec<usize> = b_witness_parts(10, 3).iter().map(|p| p.len()).collect();
        assert_eq!(sizes, vec![4, 3, 3]);
        assert_eq!(b_witness_parts(60, 2)[1][0], 30);
    }

    #[test]
    fn b_witness_has_no_edges() {
        let pi = OrderedPartition::new(vec![1, 2, 1]).unwrap();
        for seed in 0..3 {
            let h = sample_b(30, &pi, RationalDensity::HALF, seed).unwrap();
            let s = witness_expand_from_b(&h).unwrap();
            assert!(s.iter().all(|f| !f.is_empty()));
            assert_eq!(expansion_count(h.hypergraph(), &s).unwrap(), 0);
        }
    }

    #[test]
    fn a_witness_cliques_are_edges() {
        let h = sample_a(16, 4, 2, RationalDensity::new(1, 3).unwrap(), 2).unwrap();
        let g = witness_cd_from_a(&h).unwrap();
        for t in g.cliques(4).unwrap() {
            assert!(h.is_edge(&t));
        }
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let d = sample_d(8, 3, 0).unwrap();
        assert!(witness_cd_from_a(&d).is_err());
        assert!(witness_expand_from_b(&d).is_err());
    }
}
