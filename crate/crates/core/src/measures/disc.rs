use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypercore::{binomial, Exact, Hypergraph, RationalDensity, VertexId};
use crate::rng::sample_rng;

use super::{MeasureConfig, Mode};

/// Largest `n` for which the exact subset table is allocated.
const MAX_EXACT_N: usize = 27;

#[derive(Clone, Debug, Serialize)]
pub struct DiscResult {
    /// `|e(H[U]) - p C(|U|,k)|` at `witness`.
    #[serde(serialize_with = "crate::report::ser_exact")]
    pub defect: Exact,
    pub witness: Vec<VertexId>,
    pub witness_edges: u128,
    /// Set in sampled mode: the value is a maximum over the sets tried, not
    /// over all subsets.
    pub lower_bound: bool,
    pub sets_evaluated: u128,
}

/// Maximum discrepancy `|e(H[U]) - p C(|U|,k)|` over vertex sets `U`.
///
/// Exact mode walks all `2^n` sets using a subset-sum transform of the edge
/// indicator. Sampled mode tries `sample_count` uniform sets plus every
/// prefix `{0..j}`, and reports the result as a lower bound.
pub fn disc_defect(h: &Hypergraph, p: RationalDensity, cfg: &MeasureConfig) -> Result<DiscResult> {
    cfg.validate()?;
    let n = h.n();
    match cfg.mode {
        Mode::Exact => {
            let sets = 1u128 << n.min(127);
            cfg.guard("exact discrepancy", sets)?;
            if n > MAX_EXACT_N {
                return Err(Error::TooLarge {
                    what: "exact discrepancy subset table",
                    steps: sets,
                    threshold: 1 << MAX_EXACT_N,
                });
            }
            Ok(disc_exact(h, p))
        }
        Mode::Sampled => Ok(disc_sampled(h, p, cfg)),
    }
}

fn scaled_gap(p: RationalDensity, count: u128, size: usize, k: usize) -> i128 {
    let lhs = p.denom() as i128 * count as i128;
    let rhs = p.numer() as i128 * binomial(size, k) as i128;
    (lhs - rhs).abs()
}

fn disc_exact(h: &Hypergraph, p: RationalDensity) -> DiscResult {
    let n = h.n();
    let k = h.k();
    let mut f = vec![0u32; 1usize << n];
    for e in h.edges() {
        let mask: usize = e.iter().map(|&v| 1usize << v).sum();
        f[mask] = 1;
    }
    for bit in 0..n {
        let step = 1usize << bit;
        f.par_chunks_mut(step << 1).for_each(|chunk| {
            let (lo, hi) = chunk.split_at_mut(step);
            for (h, l) in hi.iter_mut().zip(lo.iter()) {
                *h += *l;
            }
        });
    }
    let (gap, mask) = f
        .par_iter()
        .enumerate()
        .map(|(mask, &c)| (scaled_gap(p, c as u128, mask.count_ones() as usize, k), mask))
        .reduce(|| (-1, usize::MAX), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    let witness: Vec<VertexId> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
    DiscResult {
        defect: Exact::new(gap, p.denom() as i128),
        witness_edges: f[mask] as u128,
        witness,
        lower_bound: false,
        sets_evaluated: 1u128 << n,
    }
}

fn disc_sampled(h: &Hypergraph, p: RationalDensity, cfg: &MeasureConfig) -> DiscResult {
    let n = h.n();
    let k = h.k();
    let random = (0..cfg.sample_count).into_par_iter().map(|i| {
        let mut rng = sample_rng(cfg.seed, i);
        (0..n).filter(|_| rng.gen::<bool>()).collect::<Vec<_>>()
    });
    let prefixes = (1..=n).into_par_iter().map(|j| (0..j).collect::<Vec<_>>());
    let (gap, count, witness) = random
        .chain(prefixes)
        .map(|u| {
            let c = h.induced_edge_count(&u) as u128;
            (scaled_gap(p, c, u.len(), k), c, u)
        })
        .reduce(
            || (-1, 0, Vec::new()),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.2 < a.2) { b } else { a },
        );
    DiscResult {
        defect: Exact::new(gap, p.denom() as i128),
        witness,
        witness_edges: count,
        lower_bound: true,
        sets_evaluated: cfg.sample_count as u128 + n as u128,
    }
}
