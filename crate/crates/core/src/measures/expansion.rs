use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::hypercore::{factorial, Exact, Hypergraph, KSet, RationalDensity, SubsetFamily};

use super::MeasureConfig;

fn check_families(h: &Hypergraph, families: &[SubsetFamily]) -> Result<()> {
    let total: usize = families.iter().map(|f| f.arity()).sum();
    if total != h.k() {
        return invalid(format!("family arities sum to {total}, expected k = {}", h.k()));
    }
    if let Some(f) = families.iter().find(|f| f.n() != h.n()) {
        return invalid(format!("family over {} vertices, hypergraph has {}", f.n(), h.n()));
    }
    Ok(())
}

/// `e(S_1, ..., S_t)`: ordered tuples of pairwise disjoint members whose
/// union is an edge of `h`.
pub fn expansion_count(h: &Hypergraph, families: &[SubsetFamily]) -> Result<u128> {
    check_families(h, families)?;
    if families.iter().any(|f| f.is_empty()) {
        return Ok(0);
    }
    // the count does not depend on the order of the families, so walk the
    // smallest ones in the outer loops
    let mut order: Vec<&[KSet]> = families.iter().map(|f| f.members()).collect();
    order.sort_by_key(|m| m.len());
    let n = h.n();
    let count = order[0]
        .par_iter()
        .map_init(
            || (vec![false; n], Vec::with_capacity(h.k())),
            |(marks, chosen), first| {
                place(first, marks, chosen);
                let c = descend(h, &order[1..], marks, chosen);
                unplace(first, marks, chosen);
                c
            },
        )
        .sum();
    Ok(count)
}

fn place(s: &KSet, marks: &mut [bool], chosen: &mut Vec<usize>) {
    for &v in s.iter() {
        marks[v] = true;
        chosen.push(v);
    }
}

fn unplace(s: &KSet, marks: &mut [bool], chosen: &mut Vec<usize>) {
    for &v in s.iter() {
        marks[v] = false;
    }
    chosen.truncate(chosen.len() - s.arity());
}

fn descend(h: &Hypergraph, rest: &[&[KSet]], marks: &mut [bool], chosen: &mut Vec<usize>) -> u128 {
    let Some((head, tail)) = rest.split_first() else {
        return h.contains_unsorted(chosen) as u128;
    };
    let mut total = 0;
    for s in head.iter() {
        if s.iter().any(|&v| marks[v]) {
            continue;
        }
        place(s, marks, chosen);
        total += descend(h, tail, marks, chosen);
        unplace(s, marks, chosen);
    }
    total
}

/// `|e(S_1..S_t) - p |S_1|...|S_t||`.
pub fn expansion_defect(h: &Hypergraph, families: &[SubsetFamily], p: RationalDensity) -> Result<Exact> {
    let e = expansion_count(h, families)?;
    let product: u128 = families.iter().map(|f| f.len() as u128).product();
    Ok(p.defect(e, product))
}

/// Stirling number of the second kind `S(n, t)`.
pub fn stirling2(n: usize, t: usize) -> u128 {
    let mut row = vec![0u128; t + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=t.min(i)).rev() {
            row[j] = j as u128 * row[j] + row[j - 1];
        }
        row[0] = 0;
    }
    row[t]
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PartiteReport {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub partitions_summed: u128,
    /// `t! S(n, t)`.
    pub partitions_expected: u128,
    /// `t^(n-k) |S_1|...|S_t|`.
    pub size_lhs: u128,
    /// Sum over ordered partitions of `|S_1[P_1]|...|S_t[P_t]|`.
    pub size_rhs: u128,
    /// `t^(n-k) e(S_1..S_t)`.
    pub e_lhs: u128,
    pub e_rhs: u128,
    pub pass: bool,
}

/// Checks the partition-averaging identity for families with pairwise
/// disjoint supports: each cross tuple lies inside `t^(n-k)` of the ordered
/// partitions `(P_1..P_t)` of the vertex set, for both the size product and
/// the edge count `e(.)`.
pub fn partite_expansion_identity_check(
    h: &Hypergraph,
    families: &[SubsetFamily],
    cfg: &MeasureConfig,
) -> Result<PartiteReport> {
    check_families(h, families)?;
    let (n, k, t) = (h.n(), h.k(), families.len());
    let supports: Vec<Vec<usize>> = families.iter().map(|f| f.support()).collect();
    let mut owner = vec![usize::MAX; n];
    for (i, s) in supports.iter().enumerate() {
        for &v in s {
            if owner[v] != usize::MAX {
                return invalid(format!("vertex {v} is in the support of two families"));
            }
            owner[v] = i;
        }
    }
    let assignments = (t as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    cfg.guard("ordered partition enumeration", assignments)?;

    let (summed, size_rhs, e_rhs) = (0..assignments as u64)
        .into_par_iter()
        .map(|code| {
            let mut part = vec![0usize; n];
            let mut c = code;
            let mut hit = vec![false; t];
            for slot in part.iter_mut() {
                *slot = (c % t as u64) as usize;
                hit[*slot] = true;
                c /= t as u64;
            }
            if !hit.iter().all(|&b| b) {
                return (0u128, 0u128, 0u128);
            }
            let restricted: Vec<SubsetFamily> =
                families.iter().enumerate().map(|(i, f)| f.restrict(|v| part[v] == i)).collect();
            let size: u128 = restricted.iter().map(|f| f.len() as u128).product();
            let e = expansion_count(h, &restricted).expect("validated above");
            (1, size, e)
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));

    let scale = (t as u128).pow((n - k) as u32);
    let size_lhs = scale * families.iter().map(|f| f.len() as u128).product::<u128>();
    let e_lhs = scale * expansion_count(h, families)?;
    let partitions_expected = factorial(t) * stirling2(n, t);
    Ok(PartiteReport {
        n,
        k,
        t,
        partitions_summed: summed,
        partitions_expected,
        size_lhs,
        size_rhs,
        e_lhs,
        e_rhs,
        pass: size_lhs == size_rhs && e_lhs == e_rhs && summed == partitions_expected,
    })
}
