use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hypercore::{binomial, for_each_ksubset, Exact, Hypergraph, RationalDensity};

/// Which `k`-sets a clique-discrepancy count ranges over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CdScope {
    /// `k`-subsets of `V(G) = 0..G.n()`; `G` may cover only part of `V(H)`.
    #[default]
    NonSpanning,
    /// Only spanning `G` (same vertex count as `H`) is accepted.
    Spanning,
}

#[derive(Clone, Debug, Serialize)]
pub struct CdResult {
    #[serde(serialize_with = "crate::report::ser_exact")]
    pub defect: Exact,
    /// `k`-sets of `H` that induce at least `s` edges of `G`.
    pub hits: u128,
    /// All `k`-subsets of `V(G)` inducing at least `s` edges of `G`.
    pub total: u128,
}

/// `|hits - p total|` for the threshold `e_G(T) >= s`.
///
/// With `s = C(k, l)` the qualifying sets are exactly the `k`-cliques of `G`.
pub fn cd_threshold_defect(
    h: &Hypergraph,
    g: &Hypergraph,
    s: usize,
    p: RationalDensity,
    scope: CdScope,
) -> Result<CdResult> {
    let (k, l) = (h.k(), g.k());
    if l >= k {
        return invalid(format!("G must have uniformity below k = {k}, got {l}"));
    }
    let cap = binomial(k, l) as usize;
    if s == 0 || s > cap {
        return invalid(format!("threshold s = {s} outside 1..={cap}"));
    }
    if g.n() > h.n() {
        return invalid("V(G) must be a subset of V(H)");
    }
    if scope == CdScope::Spanning && g.n() != h.n() {
        return invalid("spanning scope needs G on all of V(H)");
    }
    let (mut hits, mut total) = (0u128, 0u128);
    if s == cap {
        for t in g.cliques(k)? {
            total += 1;
            hits += h.contains(&t) as u128;
        }
    } else {
        for_each_ksubset(g.n(), k, |t| {
            if g.induced_count_in_kset(t) >= s {
                total += 1;
                hits += h.contains(t) as u128;
            }
        });
    }
    Ok(CdResult { defect: p.defect(hits, total), hits, total })
}
