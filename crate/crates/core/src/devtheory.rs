//! Exact forms of the deviation inequalities.
//!
//! Restricting a deviation sum to a set complete in a doubled coordinate
//! cannot increase it, and one level of deviation controls the next one
//! down through Cauchy-Schwarz. Both rest on the sum over one vertex pair
//! being a perfect square. That factorisation is exact when octahedron
//! parity is additive over tuples, i.e. under
//! [`OctahedronConvention::Indexed`]; the checks take the convention as a
//! parameter so the collapsed reading can be compared against it.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::hypercore::{factorial, for_each_subset_of, Hypergraph, SubsetFamily, VertexId};
use crate::measures::{deviation_with, FactoredPredicate, MeasureConfig, Mode, OctahedronConvention, OctahedronSpec};
use crate::report::ReportEntry;

/// `lhs <= rhs`, both exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub l: usize,
    pub lhs: i128,
    pub rhs: i128,
}

impl InequalityReport {
    pub fn pass(&self) -> bool {
        self.lhs <= self.rhs
    }

    pub fn entry(&self) -> ReportEntry {
        ReportEntry::new(
            self.name.clone(),
            self.lhs.to_string().into(),
            format!("<= {}", self.rhs).into(),
            0.into(),
            self.pass(),
        )
    }
}

fn exact_cfg(cfg: &MeasureConfig) -> MeasureConfig {
    MeasureConfig { mode: Mode::Exact, ..*cfg }
}

fn dev(h: &Hypergraph, l: usize, p: &FactoredPredicate, cfg: &MeasureConfig, conv: OctahedronConvention) -> Result<i128> {
    let r = deviation_with(h, l, Some(p), &exact_cfg(cfg), conv)?;
    Ok(r.value.expect("exact mode yields a value"))
}

fn doubled_range(k: usize, l: usize) -> std::ops::RangeInclusive<usize> {
    k - l + 1..=k
}

/// `dev_{l, P∩Q}(H) <= dev_{l,P}(H)` for `Q` a single cylinder in a
/// doubled coordinate `i ∈ [k-l+1, k]`.
pub fn subdev_inequality_check(
    h: &Hypergraph,
    l: usize,
    p: &FactoredPredicate,
    q: &FactoredPredicate,
    cfg: &MeasureConfig,
    conv: OctahedronConvention,
) -> Result<InequalityReport> {
    let k = h.k();
    if l == 0 || l > k {
        return invalid(format!("level {l} outside 1..={k}"));
    }
    let coords = q.coordinates();
    if q.has_general() || coords.len() > 1 {
        return invalid("Q must be complete in a single coordinate");
    }
    if let Some(&i) = coords.first() {
        if !doubled_range(k, l).contains(&i) {
            return invalid(format!("coordinate {i} is not doubled at level {l} (need {}..={k})", k - l + 1));
        }
    }
    let restricted = p.intersect(q)?;
    Ok(InequalityReport {
        name: format!("subdev_l{l}"),
        l,
        lhs: dev(h, l, &restricted, cfg, conv)?,
        rhs: dev(h, l, p, cfg, conv)?,
    })
}

/// `dev_{l-1,P}(H)^2 <= n^(k+l-2) dev_{l,P}(H)`.
pub fn cauchy_step_check(
    h: &Hypergraph,
    l: usize,
    p: &FactoredPredicate,
    cfg: &MeasureConfig,
    conv: OctahedronConvention,
) -> Result<InequalityReport> {
    let (n, k) = (h.n(), h.k());
    if l == 0 || l > k {
        return invalid(format!("level {l} outside 1..={k}"));
    }
    let lower = dev(h, l - 1, p, cfg, conv)?;
    let upper = dev(h, l, p, cfg, conv)?;
    let overflow = || Error::TooLarge { what: "squared deviation", steps: u128::MAX, threshold: i128::MAX as u128 };
    let scale = (n as i128).checked_pow((k + l - 2) as u32).ok_or_else(overflow)?;
    Ok(InequalityReport {
        name: format!("cauchy_l{l}"),
        l,
        lhs: lower.checked_mul(lower).ok_or_else(overflow)?,
        rhs: scale.checked_mul(upper).ok_or_else(overflow)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonnegativityReport {
    pub l: usize,
    /// `dev_{l,P}(H)`.
    pub value: i128,
    /// The same sum regrouped over the first vertex pair as
    /// `Σ (Γ_0 - Γ_1)^2`, even minus odd completions.
    pub square_sum: i128,
}

impl NonnegativityReport {
    pub fn pass(&self) -> bool {
        self.value >= 0
    }

    pub fn regrouping_matches(&self) -> bool {
        self.value == self.square_sum
    }

    pub fn entries(&self) -> Vec<ReportEntry> {
        vec![
            ReportEntry::new(
                format!("nonnegative_l{}", self.l),
                self.value.to_string().into(),
                ">= 0".into(),
                0.into(),
                self.pass(),
            ),
            ReportEntry::equal(
                format!("square_regrouping_l{}", self.l),
                self.value.to_string(),
                self.square_sum.to_string(),
            ),
        ]
    }
}

/// Checks `dev_{l,P}(H) >= 0` for `P` an intersection of cylinders in
/// doubled coordinates, and recomputes the sum as a sum of squares by
/// direct enumeration of the first pair.
pub fn nonnegativity_check(
    h: &Hypergraph,
    l: usize,
    p: &FactoredPredicate,
    cfg: &MeasureConfig,
    conv: OctahedronConvention,
) -> Result<NonnegativityReport> {
    let (n, k) = (h.n(), h.k());
    if l == 0 || l > k {
        return invalid(format!("level {l} outside 1..={k}"));
    }
    if p.has_general() || p.coordinates().iter().any(|i| !doubled_range(k, l).contains(i)) {
        return invalid(format!("P must be complete in coordinates {}..={k} only", k - l + 1));
    }
    let value = dev(h, l, p, cfg, conv)?;
    let outer = k - l + 2 * (l - 1);
    let space = (n as u128).pow((outer + 1) as u32);
    cfg.guard("square regrouping", space)?;

    // outer = x_1..x_{k-l} then y_{2,0}, y_{2,1}, ..
    let mut square_sum = 0i128;
    let mut choice = vec![0usize; outer];
    loop {
        let mut gamma = 0i128;
        for z in 0..n {
            let mut singles = choice[..k - l].to_vec();
            singles.push(z);
            let pairs: Vec<[VertexId; 2]> = choice[k - l..].chunks(2).map(|c| [c[0], c[1]]).collect();
            let oct = OctahedronSpec::new(singles, pairs);
            let mut inside = true;
            oct.for_each_tuple(|_, t| inside &= p.contains(t));
            if inside {
                gamma += oct.eta(h, conv) as i128;
            }
        }
        square_sum += gamma * gamma;
        if !odometer(&mut choice, n) {
            break;
        }
    }
    Ok(NonnegativityReport { l, value, square_sum })
}

fn odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Tuples whose vertices outside each coordinate `i ∈ [k-l+1, k]` are
/// distinct and span a `(k-1)`-clique of the `(l-1)`-graph `g`; their
/// intersection is the `k`-cliques of `g` as tuples. Here `l = g.k() + 1`.
pub fn clique_predicate(g: &Hypergraph, k: usize) -> Result<FactoredPredicate> {
    let l = g.k() + 1;
    if l > k {
        return invalid(format!("a {}-graph gives level {l} above k = {k}", g.k()));
    }
    let mut out = FactoredPredicate::all(k);
    for i in doubled_range(k, l) {
        let g = g.clone();
        let factor = FactoredPredicate::complete_in(k, i, move |rest| {
            let mut sorted = rest.to_vec();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return false;
            }
            let mut clique = true;
            for_each_subset_of(&sorted, g.k(), |s| clique &= g.contains(s));
            clique
        })?;
        out = out.intersect(&factor)?;
    }
    Ok(out)
}

/// Level-0 deviation over the product restriction built from two families
/// against its closed form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DevToExpReport {
    pub k1: usize,
    pub k2: usize,
    pub dev0: i128,
    /// Pairs `(s_1, s_2)` whose union is an edge.
    pub hits: u128,
    /// Pairs whose union is not an edge, overlapping pairs included.
    pub miss: u128,
    /// Disjoint pairs whose union is not an edge.
    pub miss_disjoint: u128,
    /// `k1! k2! (miss - hits)`.
    pub expected: i128,
}

impl DevToExpReport {
    pub fn pass(&self) -> bool {
        self.dev0 == self.expected
    }

    pub fn entry(&self) -> ReportEntry {
        ReportEntry::equal("devtoexp", self.dev0.to_string(), self.expected.to_string())
    }
}

/// The two cylinders of the expansion argument: `P1` reads coordinates
/// `1..k1-1` and `k-1` as a member of `s1` and is complete in coordinate `k`;
/// `P2` reads coordinates `k1..k-2` and `k` as a member of `s2` and is
/// complete in coordinate `k-1`.
pub fn devtoexp_predicates(s1: &SubsetFamily, s2: &SubsetFamily) -> Result<(FactoredPredicate, FactoredPredicate)> {
    let (k1, k2) = (s1.arity(), s2.arity());
    if k1 == 0 || k2 == 0 || s1.n() != s2.n() {
        return invalid("need two nonempty arities over the same vertex set");
    }
    let k = k1 + k2;
    let member = |fam: &SubsetFamily| {
        let fam = fam.clone();
        move |set: &mut Vec<VertexId>| {
            set.sort_unstable();
            fam.members().binary_search_by(|m| m.vertices().cmp(set)).is_ok()
        }
    };
    let in1 = member(s1);
    let in2 = member(s2);
    // after dropping coordinate k: (x_1..x_{k-2}, y)
    let p1 = FactoredPredicate::complete_in(k, k, move |rest| {
        let mut set: Vec<VertexId> = rest[..k1 - 1].to_vec();
        set.push(rest[k - 2]);
        in1(&mut set)
    })?;
    // after dropping coordinate k-1: (x_1..x_{k-2}, z)
    let p2 = FactoredPredicate::complete_in(k, k - 1, move |rest| {
        let mut set: Vec<VertexId> = rest[k1 - 1..k - 2].to_vec();
        set.push(rest[k - 2]);
        in2(&mut set)
    })?;
    Ok((p1, p2))
}

pub fn devtoexp_pipeline_check(
    h: &Hypergraph,
    s1: &SubsetFamily,
    s2: &SubsetFamily,
    cfg: &MeasureConfig,
) -> Result<DevToExpReport> {
    let (k1, k2) = (s1.arity(), s2.arity());
    if k1 + k2 != h.k() || s1.n() != h.n() {
        return invalid(format!("families of arity {k1}+{k2} do not match a {}-graph on {} vertices", h.k(), h.n()));
    }
    let (p1, p2) = devtoexp_predicates(s1, s2)?;
    let both = p1.intersect(&p2)?;
    let dev0 = dev(h, 0, &both, cfg, OctahedronConvention::Collapsed)?;

    let (mut hits, mut miss, mut miss_disjoint) = (0u128, 0u128, 0u128);
    for a in s1.members() {
        for b in s2.members() {
            let mut union: Vec<VertexId> = a.vertices().iter().chain(b.vertices()).copied().collect();
            union.sort_unstable();
            let disjoint = union.windows(2).all(|w| w[0] != w[1]);
            if disjoint && h.contains(&union) {
                hits += 1;
            } else {
                miss += 1;
                miss_disjoint += disjoint as u128;
            }
        }
    }
    let weight = (factorial(k1) * factorial(k2)) as i128;
    Ok(DevToExpReport {
        k1,
        k2,
        dev0,
        hits,
        miss,
        miss_disjoint,
        expected: weight * (miss as i128 - hits as i128),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::KeyedStream;

    const INDEXED: OctahedronConvention = OctahedronConvention::Indexed;

    fn random_graph(n: usize, k: usize, seed: u64) -> Hypergraph {
        let stream = KeyedStream::new(seed, "devtheory-test");
        let mut i = 0;
        Hypergraph::from_predicate(n, k, |_| {
            i += 1;
            stream.bit(i)
        })
        .unwrap()
    }

    fn random_cylinder(n: usize, k: usize, i: usize, seed: u64) -> FactoredPredicate {
        let stream = KeyedStream::new(seed, "cylinder");
        let table: Vec<bool> = (0..n.pow(k as u32 - 1) as u64).map(|j| stream.below(j, 4) != 0).collect();
        FactoredPredicate::complete_in(k, i, move |t| {
            table[t.iter().rev().fold(0, |acc, &v| acc * n + v)]
        })
        .unwrap()
    }

    #[test]
    fn subdev_trivial_cases() {
        let h = random_graph(5, 3, 1);
        let all = FactoredPredicate::all(3);
        let cfg = MeasureConfig::exact();
        let same = subdev_inequality_check(&h, 2, &all, &all, &cfg, INDEXED).unwrap();
        assert_eq!(same.lhs, same.rhs);
        let nothing = FactoredPredicate::complete_in(3, 3, |_| false).unwrap();
        let rep = subdev_inequality_check(&h, 2, &all, &nothing, &cfg, INDEXED).unwrap();
        assert_eq!(rep.lhs, 0);
        assert!(rep.pass());
    }

    #[test]
    fn subdev_rejects_single_coordinate() {
        let h = random_graph(4, 3, 1);
        let q = FactoredPredicate::complete_in(3, 1, |_| true).unwrap();
        let all = FactoredPredicate::all(3);
        assert!(subdev_inequality_check(&h, 2, &all, &q, &MeasureConfig::exact(), INDEXED).is_err());
    }

    #[test]
    fn subdev_on_random_cylinders() {
        let cfg = MeasureConfig::exact();
        for seed in 0..12 {
            let h = random_graph(6, 3, seed);
            let q = random_cylinder(6, 3, 2 + (seed as usize % 2), seed);
            let rep = subdev_inequality_check(&h, 2, &FactoredPredicate::all(3), &q, &cfg, INDEXED).unwrap();
            assert!(rep.pass(), "{rep:?}");
        }
    }

    #[test]
    fn cauchy_empty_graph_is_tight() {
        let n = 4;
        let h = Hypergraph::empty(n, 3).unwrap();
        let rep = cauchy_step_check(&h, 2, &FactoredPredicate::all(3), &MeasureConfig::exact(), INDEXED).unwrap();
        let n = n as i128;
        assert_eq!(rep.lhs, n.pow(8));
        assert_eq!(rep.rhs, n.pow(3) * n.pow(5));
    }

    #[test]
    fn cauchy_on_clique_predicate() {
        let cfg = MeasureConfig::exact();
        for seed in 0..6 {
            let h = random_graph(6, 3, seed);
            let g = random_graph(6, 2, seed + 50);
            let p = clique_predicate(&g, 3).unwrap();
            for l in 1..=3 {
                let rep = cauchy_step_check(&h, l, &p, &cfg, INDEXED).unwrap();
                assert!(rep.pass(), "{rep:?}");
            }
        }
    }

    #[test]
    fn clique_predicate_is_cliques_as_tuples() {
        let g = random_graph(6, 2, 9);
        let p = clique_predicate(&g, 3).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    let distinct = a != b && b != c && a != c;
                    let clique = distinct
                        && g.contains_unsorted(&[a, b])
                        && g.contains_unsorted(&[a, c])
                        && g.contains_unsorted(&[b, c]);
                    assert_eq!(p.contains(&[a, b, c]), clique);
                }
            }
        }
    }

    #[test]
    fn nonnegativity_and_square_regrouping() {
        let cfg = MeasureConfig::exact();
        for seed in 0..8 {
            let h = random_graph(5, 3, seed);
            for l in 1..=3 {
                let i = 4 - l + (seed as usize % l);
                let p = random_cylinder(5, 3, i, seed + 7);
                let rep = nonnegativity_check(&h, l, &p, &cfg, INDEXED).unwrap();
                assert!(rep.pass(), "{rep:?}");
                assert!(rep.regrouping_matches(), "{rep:?}");
            }
        }
    }

    #[test]
    fn devtoexp_single_pair_on_an_edge() {
        let h = Hypergraph::from_edges(4, 3, [[0, 1, 2]]).unwrap();
        let s1 = SubsetFamily::from_lists(4, 2, [[0, 1]]).unwrap();
        let s2 = SubsetFamily::from_lists(4, 1, [[2]]).unwrap();
        let rep = devtoexp_pipeline_check(&h, &s1, &s2, &MeasureConfig::exact()).unwrap();
        assert_eq!((rep.dev0, rep.expected), (-2, -2));
    }

    #[test]
    fn devtoexp_empty_graph_counts_all_pairs() {
        let h = Hypergraph::empty(5, 3).unwrap();
        let s1 = SubsetFamily::from_lists(5, 1, [[0], [1], [2]]).unwrap();
        let s2 = SubsetFamily::from_lists(5, 2, [[0, 1], [3, 4]]).unwrap();
        let rep = devtoexp_pipeline_check(&h, &s1, &s2, &MeasureConfig::exact()).unwrap();
        assert_eq!(rep.dev0, 2 * 6);
        assert_eq!(rep.miss_disjoint, 4);
        assert!(rep.pass());
    }

    /// Tuple-loop oracle for k = 3 with k1 = 2, k2 = 1.
    #[test]
    fn devtoexp_matches_tuple_loop() {
        for seed in 0..10 {
            let n = 6;
            let h = random_graph(n, 3, seed);
            let s1g = random_graph(n, 2, seed + 20);
            let s1 = SubsetFamily::new(n, 2, s1g.edges()).unwrap();
            let s2 = SubsetFamily::from_lists(n, 1, (0..n).filter(|v| !(v + seed as usize).is_multiple_of(3)).map(|v| [v])).unwrap();
            let rep = devtoexp_pipeline_check(&h, &s1, &s2, &MeasureConfig::exact()).unwrap();
            // P1: {x1, y} ∈ S1; P2: {z} ∈ S2
            let mut naive = 0i128;
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let in1 = x != y && s1g.contains_unsorted(&[x, y]);
                        let in2 = s2.members().iter().any(|m| m.vertices() == [z]);
                        if in1 && in2 {
                            let edge = x != z && y != z && h.contains_unsorted(&[x, y, z]);
                            naive += if edge { -1 } else { 1 };
                        }
                    }
                }
            }
            assert_eq!(rep.dev0, naive);
            assert!(rep.pass(), "{rep:?}");
        }
    }
}
