use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{
    all_masks, augment_f, check_host, ie_counts, pattern_mask, restrict, transversal_counts,
    IntersectionPatternSet, VertexKPartition,
};
use crate::error::{invalid, Result};
use crate::hypercore::{
    binomial, factorial, for_each_ksubset, for_each_subset_of, Exact, Hypergraph, KSet, RationalDensity,
    SubsetFamily, VertexId,
};
use crate::measures::MeasureConfig;
use crate::report::{exact_value, ReportEntry};

/// One instance of the partite argument: `G_{P,R}`, its augmentation `F`
/// by a missing pattern `I`, and the counts that tie them together.
#[derive(Clone, Debug, Serialize)]
pub struct PartiteClaimsReport {
    pub s: usize,
    pub w_restricted: u64,
    pub w_augmented: u64,
    pub w_restricted_h: Option<u64>,
    pub w_augmented_h: Option<u64>,
    pub f_full: u64,
    pub f_full_h: Option<u64>,
    /// Every transversal has `e_F(T) = s + 1` exactly when `e_{G_{P,R}}(T) = s`.
    pub transversal_shift: bool,
    pub g_is_sum_of_f: bool,
    pub f_is_mobius_of_g: bool,
}

impl PartiteClaimsReport {
    pub fn augmented_matches_restricted(&self) -> bool {
        self.w_augmented == self.w_restricted && self.w_augmented_h == self.w_restricted_h
    }

    pub fn f_full_matches_w(&self) -> bool {
        self.f_full == self.w_augmented && self.f_full_h == self.w_augmented_h
    }

    pub fn pass(&self) -> bool {
        self.transversal_shift
            && self.augmented_matches_restricted()
            && self.f_full_matches_w()
            && self.g_is_sum_of_f
            && self.f_is_mobius_of_g
    }

    pub fn entries(&self) -> Vec<ReportEntry> {
        vec![
            ReportEntry::equal("w_augmented_vs_restricted", self.w_augmented, self.w_restricted),
            ReportEntry::equal("w_augmented_vs_restricted_h", self.w_augmented_h, self.w_restricted_h),
            ReportEntry::equal("f_full_vs_w", self.f_full, self.w_augmented),
            ReportEntry::equal("f_full_vs_w_h", self.f_full_h, self.w_augmented_h),
            ReportEntry::equal("transversal_shift", self.transversal_shift, true),
            ReportEntry::equal("g_is_sum_of_f", self.g_is_sum_of_f, true),
            ReportEntry::equal("f_is_mobius_of_g", self.f_is_mobius_of_g, true),
        ]
    }
}

/// Runs the partite claims for `(G, P, R, I)` with `s = |R|`.
pub fn partite_claims_check(
    g: &Hypergraph,
    p: &VertexKPartition,
    r: &IntersectionPatternSet,
    i: &[usize],
    h: Option<&Hypergraph>,
) -> Result<PartiteClaimsReport> {
    let s = r.len();
    if s == 0 {
        return invalid("pattern set must be nonempty");
    }
    let i_mask = pattern_mask(p.k(), g.k(), i)?;
    if r.contains_mask(i_mask) {
        return invalid(format!("pattern {i:?} already lies in R"));
    }
    let gr = restrict(g, p, r)?;
    let f = augment_f(&gr, p, i)?;
    let wg = transversal_counts(&gr, p, s, h)?;
    let wf = transversal_counts(&f, p, s + 1, h)?;

    let full = p.full_mask();
    let mut shift = true;
    for_each_ksubset(g.n(), p.k(), |t| {
        if p.pattern(t) == full {
            let lhs = f.induced_count_in_kset(t) == s + 1;
            let rhs = gr.induced_count_in_kset(t) == s;
            shift &= lhs == rhs;
        }
    });

    let ie = ie_counts(&f, p, h, s + 1)?;
    let top = ie.full();
    Ok(PartiteClaimsReport {
        s,
        w_restricted: wg.w,
        w_augmented: wf.w,
        w_restricted_h: wg.w_in_h,
        w_augmented_h: wf.w_in_h,
        f_full: ie.f_kn[top],
        f_full_h: ie.f_h.as_ref().map(|f| f[top]),
        transversal_shift: shift,
        g_is_sum_of_f: ie.g_is_sum_of_f(),
        f_is_mobius_of_g: ie.f_is_mobius_of_g(),
    })
}

/// Both sides of the overcounting identity.
///
/// `lhs` is `|{T : e_G(T) = s}|` and `rhs` is the sum of
/// `|W(G_{P,R}, P, s)|` over ordered partitions `P` (surjections onto
/// `[k]`) and pattern sets `R` with `|R| = s`. A `k`-set with `e > s`
/// induced edges is a transversal of `G_{P,R}` with exactly `s` edges for
/// every `s`-subset `R` of its own patterns, so the sum actually weights
/// each set by `C(e_G(T), s)`; `lhs_weighted` records that count. The two
/// agree whenever no `k`-set carries more than `s` edges, for instance at
/// `s = C(k, l)`.
#[derive(Clone, Debug, Serialize)]
pub struct OvercountReport {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub s: usize,
    /// `k! k^(n-k)`.
    pub normalization: u128,
    pub lhs: u128,
    pub lhs_weighted: u128,
    pub rhs: u128,
    pub lhs_h: Option<u128>,
    pub lhs_weighted_h: Option<u128>,
    pub rhs_h: Option<u128>,
}

impl OvercountReport {
    /// `lhs · k! k^(n-k) = rhs`, as stated.
    pub fn holds(&self) -> bool {
        self.lhs * self.normalization == self.rhs
    }

    pub fn holds_h(&self) -> Option<bool> {
        Some(self.lhs_h? * self.normalization == self.rhs_h?)
    }

    /// The same identity with each set weighted by `C(e_G(T), s)`.
    pub fn weighted_holds(&self) -> bool {
        self.lhs_weighted * self.normalization == self.rhs
            && match (self.lhs_weighted_h, self.rhs_h) {
                (Some(a), Some(b)) => a * self.normalization == b,
                _ => true,
            }
    }

    pub fn pass(&self) -> bool {
        self.holds() && self.holds_h().unwrap_or(true)
    }

    pub fn entries(&self) -> Vec<ReportEntry> {
        let scaled = |x: u128| x * self.normalization;
        let mut out = vec![
            ReportEntry::equal("overcount", scaled(self.lhs).to_string(), self.rhs.to_string()),
            ReportEntry::equal("overcount_weighted", scaled(self.lhs_weighted).to_string(), self.rhs.to_string()),
        ];
        if let (Some(l), Some(w), Some(r)) = (self.lhs_h, self.lhs_weighted_h, self.rhs_h) {
            out.push(ReportEntry::equal("overcount_h", scaled(l).to_string(), r.to_string()));
            out.push(ReportEntry::equal("overcount_weighted_h", scaled(w).to_string(), r.to_string()));
        }
        out
    }
}

/// Evaluates both sides of the overcounting identity for the `l`-graph `g`
/// at clique size `k` and edge count `s`, by enumerating all `k^n`
/// assignments of vertices to parts.
pub fn overcount_identity_check(
    g: &Hypergraph,
    k: usize,
    s: usize,
    h: Option<&Hypergraph>,
    cfg: &MeasureConfig,
) -> Result<OvercountReport> {
    let (n, l) = (g.n(), g.k());
    if k <= l || k > 31 {
        return invalid(format!("clique size {k} must exceed uniformity {l}"));
    }
    if n < k {
        return invalid(format!("need at least {k} vertices, got {n}"));
    }
    let top = binomial(k, l) as usize;
    if s == 0 || s > top {
        return invalid(format!("threshold {s} outside 1..={top}"));
    }
    check_host(h, n, k)?;
    let assignments = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    cfg.guard("ordered vertex partitions", assignments)?;

    let (mut lhs, mut lhs_w, mut lhs_h, mut lhs_wh) = (0u128, 0u128, 0u128, 0u128);
    for_each_ksubset(n, k, |t| {
        let e = g.induced_count_in_kset(t);
        let c = binomial(e, s);
        let in_h = h.is_some_and(|h| h.contains(t));
        lhs_w += c;
        if in_h {
            lhs_wh += c;
        }
        if e == s {
            lhs += 1;
            if in_h {
                lhs_h += 1;
            }
        }
    });

    let masks = all_masks(k, l);
    let mut pattern_sets = Vec::new();
    for_each_ksubset(masks.len(), s, |idx| {
        pattern_sets.push(IntersectionPatternSet::from_masks(k, l, idx.iter().map(|&i| masks[i]).collect()))
    });
    let pattern_sets: Vec<IntersectionPatternSet> = pattern_sets.into_iter().collect::<Result<_>>()?;

    let (rhs, rhs_h) = (0..assignments as u64)
        .into_par_iter()
        .map(|code| -> Result<(u128, u128)> {
            let mut part_of = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                part_of.push((c % k as u64) as usize);
                c /= k as u64;
            }
            let Ok(p) = VertexKPartition::new(k, part_of) else {
                return Ok((0, 0));
            };
            let mut acc = (0u128, 0u128);
            for r in &pattern_sets {
                let w = transversal_counts(&restrict(g, &p, r)?, &p, s, h)?;
                acc.0 += w.w as u128;
                acc.1 += w.w_in_h.unwrap_or(0) as u128;
            }
            Ok(acc)
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;

    let host = h.is_some();
    Ok(OvercountReport {
        n,
        k,
        l,
        s,
        normalization: factorial(k) * (k as u128).pow((n - k) as u32),
        lhs,
        lhs_weighted: lhs_w,
        rhs,
        lhs_h: host.then_some(lhs_h),
        lhs_weighted_h: host.then_some(lhs_wh),
        rhs_h: host.then_some(rhs_h),
    })
}

/// The complement trick: `A = {T : e_Ḡ(T) >= s}` and
/// `B = {T : e_G(T) >= C(k,l) - s + 1}` partition the `k`-sets.
#[derive(Clone, Debug, Serialize)]
pub struct ComplementReport {
    pub k: usize,
    pub s: usize,
    pub total: u128,
    pub a: u128,
    pub b: u128,
    pub e_h: Option<u128>,
    pub a_h: Option<u128>,
    pub b_h: Option<u128>,
    /// Signed `|A ∩ E(H)| - p|A|`, the threshold-`s` defect of the complement.
    #[serde(serialize_with = "ser_opt_exact")]
    pub defect_complement: Option<Exact>,
    /// Signed `|B ∩ E(H)| - p|B|`, the high-threshold defect of `G`.
    #[serde(serialize_with = "ser_opt_exact")]
    pub defect_graph: Option<Exact>,
    /// Signed `e(H) - p C(n, k)`.
    #[serde(serialize_with = "ser_opt_exact")]
    pub defect_host: Option<Exact>,
}

fn ser_opt_exact<S: serde::Serializer>(x: &Option<Exact>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_some(&exact_value(x)),
        None => s.serialize_none(),
    }
}

impl ComplementReport {
    pub fn holds(&self) -> bool {
        self.total - self.a == self.b
    }

    pub fn holds_h(&self) -> Option<bool> {
        Some(self.e_h? - self.a_h? == self.b_h?)
    }

    /// The two defects add up to the host's global density defect.
    pub fn defects_add_up(&self) -> Option<bool> {
        Some(self.defect_graph? + self.defect_complement? == self.defect_host?)
    }

    pub fn pass(&self) -> bool {
        self.holds() && self.holds_h().unwrap_or(true) && self.defects_add_up().unwrap_or(true)
    }

    pub fn entries(&self) -> Vec<ReportEntry> {
        let mut out = vec![ReportEntry::equal(
            "complement",
            (self.total - self.a).to_string(),
            self.b.to_string(),
        )];
        if let (Some(e), Some(a), Some(b)) = (self.e_h, self.a_h, self.b_h) {
            out.push(ReportEntry::equal("complement_h", (e - a).to_string(), b.to_string()));
        }
        if let (Some(g), Some(c), Some(t)) = (self.defect_graph, self.defect_complement, self.defect_host) {
            out.push(ReportEntry::new(
                "complement_defects",
                exact_value(&(g + c)),
                exact_value(&t),
                json!(0),
                g + c == t,
            ));
        }
        out
    }
}

/// The `s = 1` complement identity: `C(n,k) - |{e_Ḡ(T) >= 1}| = |{e_G(T) = C(k,l)}|`.
pub fn complement_threshold_check(
    g: &Hypergraph,
    k: usize,
    h: Option<&Hypergraph>,
    p: Option<RationalDensity>,
) -> Result<ComplementReport> {
    complement_general_check(g, k, 1, h, p)
}

/// The complement identity at threshold `s`, pairing CD(l, s) on `Ḡ` with
/// CD(l, C(k,l) - s + 1) on `G`. When a host is supplied its edges are
/// the `k`-sets of `V(G)`.
pub fn complement_general_check(
    g: &Hypergraph,
    k: usize,
    s: usize,
    h: Option<&Hypergraph>,
    p: Option<RationalDensity>,
) -> Result<ComplementReport> {
    let (n, l) = (g.n(), g.k());
    if k <= l {
        return invalid(format!("clique size {k} must exceed uniformity {l}"));
    }
    let top = binomial(k, l) as usize;
    if s == 0 || s > top {
        return invalid(format!("threshold {s} outside 1..={top}"));
    }
    check_host(h, n, k)?;
    let gc = g.complement();
    let (mut a, mut b, mut a_h, mut b_h) = (0u128, 0u128, 0u128, 0u128);
    for_each_ksubset(n, k, |t| {
        let in_h = h.is_some_and(|h| h.contains(t));
        if gc.induced_count_in_kset(t) >= s {
            a += 1;
            a_h += in_h as u128;
        }
        if g.induced_count_in_kset(t) > top - s {
            b += 1;
            b_h += in_h as u128;
        }
    });
    let total = binomial(n, k);
    let e_h = h.map(|h| h.edge_count() as u128);
    let defect = |hits: u128, all: u128| {
        p.map(|p| Exact::from_integer(hits as i128) - p.value() * Exact::from_integer(all as i128))
    };
    let host = h.is_some();
    Ok(ComplementReport {
        k,
        s,
        total,
        a,
        b,
        e_h,
        a_h: host.then_some(a_h),
        b_h: host.then_some(b_h),
        defect_complement: if host { defect(a_h, a) } else { None },
        defect_graph: if host { defect(b_h, b) } else { None },
        defect_host: e_h.and_then(|e| defect(e, total)),
    })
}

/// `k`-sets of type `m`: exactly `m_i` vertices in the support of family
/// `i`, and every `arity_i`-subset of those vertices a member of it.
pub fn cliques_of_type(families: &[SubsetFamily], m: &[usize]) -> Result<Vec<KSet>> {
    if families.len() != m.len() || families.is_empty() {
        return invalid("need one multiplicity per family");
    }
    let n = families[0].n();
    let mut owner = vec![usize::MAX; n];
    let mut union = Vec::new();
    let mut graphs = Vec::with_capacity(families.len());
    for (i, fam) in families.iter().enumerate() {
        if fam.n() != n {
            return invalid("families live on different vertex sets");
        }
        for v in fam.support() {
            if owner[v] != usize::MAX {
                return invalid(format!("vertex {v} lies in two supports"));
            }
            owner[v] = i;
            union.push(v);
        }
        graphs.push(Hypergraph::from_edges(n, fam.arity(), fam.members())?);
    }
    union.sort_unstable();
    let k: usize = m.iter().sum();
    let mut out = Vec::new();
    let mut split: Vec<Vec<VertexId>> = vec![Vec::new(); families.len()];
    for_each_subset_of(&union, k, |a| {
        split.iter_mut().for_each(Vec::clear);
        for &v in a {
            split[owner[v]].push(v);
        }
        let ok = split.iter().zip(m).all(|(s, &mi)| s.len() == mi)
            && split.iter().zip(&graphs).all(|(s, g)| {
                let mut inside = true;
                for_each_subset_of(s, g.k(), |x| inside &= g.contains(x));
                inside
            });
        if ok {
            out.push(KSet::from_sorted(a.to_vec()).expect("subsets come out sorted"));
        }
    });
    Ok(out)
}

/// The base case of the type decomposition: the `k`-sets of type
/// `k·e_i` are exactly the `k`-cliques of family `i`, where `k` is the sum
/// of the family arities.
pub fn base_case_check(families: &[SubsetFamily], i: usize) -> Result<bool> {
    if i >= families.len() {
        return invalid(format!("family index {i} out of range"));
    }
    let k: usize = families.iter().map(SubsetFamily::arity).sum();
    let mut m = vec![0; families.len()];
    m[i] = k;
    let typed = cliques_of_type(families, &m)?;
    let fam = &families[i];
    let cliques = Hypergraph::from_edges(fam.n(), fam.arity(), fam.members())?.cliques(k)?;
    Ok(typed == cliques)
}
