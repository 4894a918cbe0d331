use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hypercore::{falling_factorial, Hypergraph, VertexId};
use crate::measures::{OctahedronConvention, OctahedronSpec};
use crate::rng::sample_rng;

use super::{ConstructionHandle, ConstructionKind};

/// Octahedron classes on which a construction is predicted to meet an even
/// number of edges. All classes use distinct vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CensusFilter {
    /// `A_l` at level `l + 1`: every distinct-vertex octahedron.
    ADistinct,
    /// `B_(k-1,1)` at level 2: one of the two pairs sits above all other
    /// vertices.
    BPairLast,
    /// `D` at level 2: the singles form the head of all four tuples.
    DHeadSingles,
}

impl FromStr for CensusFilter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a-distinct" | "A" | "a" => Ok(CensusFilter::ADistinct),
            "b-pair-last" | "B" | "b" => Ok(CensusFilter::BPairLast),
            "d-head-singles" | "D" | "d" => Ok(CensusFilter::DHeadSingles),
            other => invalid(format!("unknown census filter {other:?}")),
        }
    }
}

impl fmt::Display for CensusFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CensusFilter::ADistinct => "a-distinct",
            CensusFilter::BPairLast => "b-pair-last",
            CensusFilter::DHeadSingles => "d-head-singles",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusMode {
    Exhaustive,
    /// `count` filtered specs drawn uniformly by rejection.
    Sampled { count: u64, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    pub filter: CensusFilter,
    pub l: usize,
    pub mode: CensusMode,
    /// Filtered specs whose parity was evaluated.
    pub examined: u64,
    pub even: u64,
    pub odd: u64,
    /// Distinct-vertex specs drawn or enumerated before filtering.
    pub candidates: u64,
    pub first_odd: Option<OctahedronSpec>,
}

impl CensusReport {
    pub fn pass(&self) -> bool {
        self.odd == 0 && self.examined > 0
    }
}

const EXHAUSTIVE_LIMIT: u128 = 1 << 32;
const MAX_DRAWS_PER_SAMPLE: u64 = 1 << 24;

/// Counts even and odd octahedra among the specs selected by `filter`.
pub fn octahedron_parity_census(
    handle: &ConstructionHandle,
    l: usize,
    filter: CensusFilter,
    mode: CensusMode,
) -> Result<CensusReport> {
    let k = handle.k();
    match filter {
        CensusFilter::ADistinct => {
            let la = handle.params().l;
            if handle.kind() != ConstructionKind::A || la.map(|x| x + 1) != Some(l) {
                return invalid("the a-distinct filter needs an A_l handle and level l + 1");
            }
        }
        CensusFilter::BPairLast => {
            let ok = handle.params().pi.as_ref().is_some_and(|p| p.parts() == [k - 1, 1]);
            if handle.kind() != ConstructionKind::B || !ok || l != 2 {
                return invalid("the b-pair-last filter needs a B_(k-1,1) handle and level 2");
            }
        }
        CensusFilter::DHeadSingles => {
            if handle.kind() != ConstructionKind::D || l != 2 {
                return invalid("the d-head-singles filter needs a D handle and level 2");
            }
        }
    }
    let n = handle.n();
    let m = k + l;
    if m > n {
        return invalid(format!("octahedra need {m} distinct vertices, only {n} available"));
    }
    let h = handle.hypergraph();
    let ctx = Ctx { handle, h, k, l, filter };

    let tally = match mode {
        CensusMode::Exhaustive => {
            let total = falling_factorial(n, m);
            if total > EXHAUSTIVE_LIMIT {
                return Err(Error::TooLarge { what: "exhaustive census", steps: total, threshold: EXHAUSTIVE_LIMIT });
            }
            (0..n)
                .into_par_iter()
                .map(|first| {
                    let mut choice = vec![first];
                    let mut used = vec![false; n];
                    used[first] = true;
                    let mut t = Tally::default();
                    ctx.extend(&mut choice, &mut used, m, &mut t);
                    t
                })
                .reduce(Tally::default, Tally::merge)
        }
        CensusMode::Sampled { count, seed } => (0..count)
            .into_par_iter()
            .map(|i| -> Result<Tally> {
                let mut rng = sample_rng(seed, i);
                let mut t = Tally::default();
                loop {
                    let choice = index::sample(&mut rng, n, m).into_vec();
                    t.candidates += 1;
                    if ctx.selected(&choice) {
                        ctx.record(&choice, &mut t);
                        return Ok(t);
                    }
                    if t.candidates >= MAX_DRAWS_PER_SAMPLE {
                        return invalid("census filter accepted nothing in 2^24 draws");
                    }
                }
            })
            .try_reduce(Tally::default, |a, b| Ok(Tally::merge(a, b)))?,
    };
    Ok(CensusReport {
        filter,
        l,
        mode,
        examined: tally.even + tally.odd,
        even: tally.even,
        odd: tally.odd,
        candidates: tally.candidates,
        first_odd: tally.first_odd.map(|c| ctx.spec(&c)),
    })
}

#[derive(Default)]
struct Tally {
    even: u64,
    odd: u64,
    candidates: u64,
    first_odd: Option<Vec<VertexId>>,
}

impl Tally {
    fn merge(a: Tally, b: Tally) -> Tally {
        Tally {
            even: a.even + b.even,
            odd: a.odd + b.odd,
            candidates: a.candidates + b.candidates,
            first_odd: a.first_odd.or(b.first_odd),
        }
    }
}

struct Ctx<'a> {
    handle: &'a ConstructionHandle,
    h: &'a Hypergraph,
    k: usize,
    l: usize,
    filter: CensusFilter,
}

impl Ctx<'_> {
    /// `choice` lists the singles, then the pairs slot by slot.
    fn spec(&self, choice: &[VertexId]) -> OctahedronSpec {
        let s = self.k - self.l;
        OctahedronSpec::new(
            choice[..s].to_vec(),
            (0..self.l).map(|j| [choice[s + 2 * j], choice[s + 2 * j + 1]]).collect(),
        )
    }

    fn selected(&self, choice: &[VertexId]) -> bool {
        let s = self.k - self.l;
        match self.filter {
            CensusFilter::ADistinct => true,
            CensusFilter::BPairLast => {
                let last_pair = |j: usize| {
                    let pair = &choice[s + 2 * j..s + 2 * j + 2];
                    let low = pair[0].min(pair[1]);
                    choice.iter().filter(|v| !pair.contains(v)).all(|&v| v < low)
                };
                last_pair(0) || last_pair(1)
            }
            CensusFilter::DHeadSingles => {
                let heads = self.handle.d_heads().expect("D handle");
                let mut singles = choice[..s].to_vec();
                singles.sort_unstable();
                let mut ok = true;
                self.spec(choice).for_each_tuple(|_, t| {
                    if ok {
                        let mut sorted = t.to_vec();
                        sorted.sort_unstable();
                        ok = heads.head(&sorted) == singles;
                    }
                });
                ok
            }
        }
    }

    fn record(&self, choice: &[VertexId], t: &mut Tally) {
        if self.spec(choice).eta(self.h, OctahedronConvention::Collapsed) == 1 {
            t.even += 1;
        } else {
            t.odd += 1;
            if t.first_odd.is_none() {
                t.first_odd = Some(choice.to_vec());
            }
        }
    }

    fn extend(&self, choice: &mut Vec<VertexId>, used: &mut [bool], m: usize, t: &mut Tally) {
        if choice.len() == m {
            t.candidates += 1;
            if self.selected(choice) {
                self.record(choice, t);
            }
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                choice.push(v);
                self.extend(choice, used, m, t);
                choice.pop();
                used[v] = false;
            }
        }
    }
}
