use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hypercore::{Hypergraph, VertexId};
use crate::rng::sample_rng;

use super::{mean_and_se, MeasureConfig, Mode};

/// How an octahedron's hyperedges are counted for its parity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OctahedronConvention {
    /// Distinct `k`-sets among the choices with `k` distinct vertices, each
    /// counted once.
    #[default]
    Collapsed,
    /// Every choice vector (one vertex per part, both slots of a pair always
    /// tried) with `k` distinct vertices forming an edge counts once, so a
    /// set reachable in several ways is counted with multiplicity.
    Indexed,
}

/// A squashed octahedron: `k - l` single vertices followed by `l` vertex
/// pairs. Vertices may repeat.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OctahedronSpec {
    pub singles: Vec<VertexId>,
    pub pairs: Vec<[VertexId; 2]>,
}

impl fmt::Debug for OctahedronSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "O[{:?}; {:?}]", self.singles, self.pairs)
    }
}

impl OctahedronSpec {
    pub fn new(singles: Vec<VertexId>, pairs: Vec<[VertexId; 2]>) -> Self {
        OctahedronSpec { singles, pairs }
    }

    pub fn k(&self) -> usize {
        self.singles.len() + self.pairs.len()
    }

    pub fn l(&self) -> usize {
        self.pairs.len()
    }

    /// The `2^l` vertex tuples, in coordinate order, with `eps` read as the
    /// binary choice vector (bit `j` picks slot of pair `j`).
    pub fn for_each_tuple(&self, mut f: impl FnMut(u32, &[VertexId])) {
        let mut buf: Vec<VertexId> = self.singles.clone();
        buf.extend(self.pairs.iter().map(|p| p[0]));
        let base = self.singles.len();
        for eps in 0u32..1 << self.l() {
            for (j, p) in self.pairs.iter().enumerate() {
                buf[base + j] = p[(eps >> j & 1) as usize];
            }
            f(eps, &buf);
        }
    }

    /// The non-degenerate members as sorted, deduplicated `k`-sets.
    pub fn members(&self) -> Vec<Vec<VertexId>> {
        let mut out = Vec::new();
        self.for_each_tuple(|_, t| {
            let mut s = t.to_vec();
            s.sort_unstable();
            if s.windows(2).all(|w| w[0] < w[1]) {
                out.push(s);
            }
        });
        out.sort();
        out.dedup();
        out
    }

    /// `eta`: `+1` when the octahedron meets an even number of edges.
    pub fn eta(&self, h: &Hypergraph, convention: OctahedronConvention) -> i8 {
        let parts = self.parts();
        let refs: Vec<&[VertexId]> = parts.iter().map(|p| p.as_slice()).collect();
        sign(odd_count(&refs, |t| h.contains_unsorted(t), convention))
    }

    fn parts(&self) -> Vec<Vec<VertexId>> {
        self.singles.iter().map(|&x| vec![x]).chain(self.pairs.iter().map(|p| p.to_vec())).collect()
    }
}

#[inline]
fn sign(odd: bool) -> i8 {
    if odd {
        -1
    } else {
        1
    }
}

/// Parity of the edge count over the product of `parts`. `is_edge` is only
/// called on tuples with distinct vertices.
fn odd_count(parts: &[&[VertexId]], is_edge: impl Fn(&[VertexId]) -> bool, convention: OctahedronConvention) -> bool {
    let k = parts.len();
    let mut idx = vec![0usize; k];
    let mut tuple: Vec<VertexId> = parts.iter().map(|p| p[0]).collect();
    let mut seen: Vec<Vec<VertexId>> = Vec::new();
    let mut odd = false;
    loop {
        let mut sorted = tuple.clone();
        sorted.sort_unstable();
        if sorted.windows(2).all(|w| w[0] < w[1]) {
            match convention {
                OctahedronConvention::Indexed => odd ^= is_edge(&tuple),
                OctahedronConvention::Collapsed => seen.push(sorted),
            }
        }
        let mut pos = 0;
        loop {
            if pos == k {
                if convention == OctahedronConvention::Collapsed {
                    seen.sort();
                    seen.dedup();
                    odd = seen.iter().filter(|s| is_edge(s)).count() % 2 == 1;
                }
                return odd;
            }
            idx[pos] += 1;
            if idx[pos] < parts[pos].len() {
                tuple[pos] = parts[pos][idx[pos]];
                break;
            }
            idx[pos] = 0;
            tuple[pos] = parts[pos][0];
            pos += 1;
        }
    }
}

/// `eta_H(A_1; ...; A_k)` under the collapsed (set) reading.
pub fn eta(h: &Hypergraph, parts: &[&[VertexId]]) -> Result<i8> {
    eta_with(h, parts, OctahedronConvention::Collapsed)
}

pub fn eta_with(h: &Hypergraph, parts: &[&[VertexId]], convention: OctahedronConvention) -> Result<i8> {
    if parts.len() != h.k() {
        return invalid(format!("eta needs {} parts, got {}", h.k(), parts.len()));
    }
    if let Some(p) = parts.iter().find(|p| p.is_empty() || p.len() > 2) {
        return invalid(format!("part {p:?} must have one or two vertices"));
    }
    if parts.iter().flat_map(|p| p.iter()).any(|&v| v >= h.n()) {
        return invalid("part vertex out of range");
    }
    Ok(sign(odd_count(parts, |t| h.contains_unsorted(t), convention)))
}

type TupleTest = Arc<dyn Fn(&[VertexId]) -> bool + Send + Sync>;

/// A set of `k`-tuples given as an intersection of cylinders: each factor
/// `(i, P')` admits a tuple when the tuple with coordinate `i` removed lies
/// in `P'`. An optional general test is intersected in as well.
/// Coordinates are numbered from 1.
#[derive(Clone)]
pub struct FactoredPredicate {
    k: usize,
    factors: Vec<(usize, TupleTest)>,
    general: Option<TupleTest>,
}

impl fmt::Debug for FactoredPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FactoredPredicate")
            .field("k", &self.k)
            .field("coordinates", &self.coordinates())
            .field("general", &self.general.is_some())
            .finish()
    }
}

impl FactoredPredicate {
    /// All of `V^k`.
    pub fn all(k: usize) -> Self {
        FactoredPredicate { k, factors: Vec::new(), general: None }
    }

    /// The cylinder `{x : x without coordinate i is in P'}`.
    pub fn complete_in(
        k: usize,
        coordinate: usize,
        inner: impl Fn(&[VertexId]) -> bool + Send + Sync + 'static,
    ) -> Result<Self> {
        if coordinate == 0 || coordinate > k {
            return invalid(format!("coordinate {coordinate} outside 1..={k}"));
        }
        Ok(FactoredPredicate { k, factors: vec![(coordinate, Arc::new(inner))], general: None })
    }

    /// Cylinder over an explicit set of `(k-1)`-tuples on `0..n`.
    pub fn from_tuples(
        k: usize,
        coordinate: usize,
        n: usize,
        tuples: impl IntoIterator<Item = Vec<VertexId>>,
    ) -> Result<Self> {
        let width = k - 1;
        let size = n.checked_pow(width as u32).filter(|&s| s <= 1 << 26);
        let Some(size) = size else {
            return invalid("tuple table too large");
        };
        let mut table = vec![false; size];
        for t in tuples {
            if t.len() != width || t.iter().any(|&v| v >= n) {
                return invalid(format!("tuple {t:?} is not a {width}-tuple over 0..{n}"));
            }
            table[tuple_index(&t, n)] = true;
        }
        Self::complete_in(k, coordinate, move |t| t.iter().all(|&v| v < n) && table[tuple_index(t, n)])
    }

    /// A general (not factored) restriction.
    pub fn general(k: usize, test: impl Fn(&[VertexId]) -> bool + Send + Sync + 'static) -> Self {
        FactoredPredicate { k, factors: Vec::new(), general: Some(Arc::new(test)) }
    }

    /// Intersection. Factors on the same coordinate are merged, which keeps
    /// the result complete in that coordinate.
    pub fn intersect(&self, other: &FactoredPredicate) -> Result<Self> {
        if self.k != other.k {
            return invalid("predicates over different k");
        }
        let mut factors = self.factors.clone();
        for (i, f) in &other.factors {
            if let Some(slot) = factors.iter_mut().find(|(j, _)| j == i) {
                let (a, b) = (slot.1.clone(), f.clone());
                slot.1 = Arc::new(move |t| a(t) && b(t));
            } else {
                factors.push((*i, f.clone()));
            }
        }
        factors.sort_by_key(|(i, _)| *i);
        let general = match (&self.general, &other.general) {
            (Some(a), Some(b)) => {
                let (a, b) = (a.clone(), b.clone());
                Some(Arc::new(move |t: &[VertexId]| a(t) && b(t)) as TupleTest)
            }
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        Ok(FactoredPredicate { k: self.k, factors, general })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Coordinates (1-based) carrying a cylinder factor.
    pub fn coordinates(&self) -> Vec<usize> {
        self.factors.iter().map(|(i, _)| *i).collect()
    }

    pub fn has_general(&self) -> bool {
        self.general.is_some()
    }

    pub fn is_all(&self) -> bool {
        self.factors.is_empty() && self.general.is_none()
    }

    pub fn contains(&self, tuple: &[VertexId]) -> bool {
        debug_assert_eq!(tuple.len(), self.k);
        let mut buf = [0usize; 16];
        for (i, f) in &self.factors {
            let rest = &mut buf[..self.k - 1];
            let mut w = 0;
            for (c, &v) in tuple.iter().enumerate() {
                if c + 1 != *i {
                    rest[w] = v;
                    w += 1;
                }
            }
            if !f(rest) {
                return false;
            }
        }
        self.general.as_ref().is_none_or(|g| g(tuple))
    }
}

#[inline]
fn tuple_index(t: &[VertexId], n: usize) -> usize {
    t.iter().rev().fold(0, |acc, &v| acc * n + v)
}

/// Dense `n^k` table of "distinct and an edge" for ordered tuples.
struct EdgeOracle<'a> {
    h: &'a Hypergraph,
    dense: Option<Vec<u8>>,
}

const DENSE_LIMIT: usize = 1 << 24;

impl<'a> EdgeOracle<'a> {
    fn new(h: &'a Hypergraph) -> Self {
        let (n, k) = (h.n(), h.k());
        let dense = n.checked_pow(k as u32).filter(|&s| s <= DENSE_LIMIT).map(|size| {
            (0..size)
                .into_par_iter()
                .map(|code| {
                    let mut t = [0usize; 16];
                    let mut c = code;
                    for slot in t[..k].iter_mut() {
                        *slot = c % n;
                        c /= n;
                    }
                    h.contains_unsorted(&t[..k]) as u8
                })
                .collect()
        });
        EdgeOracle { h, dense }
    }

    #[inline]
    fn edge(&self, t: &[VertexId]) -> bool {
        match &self.dense {
            Some(table) => table[tuple_index(t, self.h.n())] == 1,
            None => self.h.contains_unsorted(t),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DevResult {
    pub l: usize,
    pub mode: Mode,
    pub convention: OctahedronConvention,
    /// Exact sum, present in exact mode.
    pub value: Option<i128>,
    /// `dev / n^(k+l)`: exact ratio in exact mode, sample mean otherwise.
    pub normalized: f64,
    pub std_error: Option<f64>,
    pub samples: u64,
}

/// `dev_{l,P}(H)` under the collapsed convention; `None` means `P = V^k`.
pub fn deviation(h: &Hypergraph, l: usize, p: Option<&FactoredPredicate>, cfg: &MeasureConfig) -> Result<DevResult> {
    deviation_with(h, l, p, cfg, OctahedronConvention::Collapsed)
}

/// `dev_{l,P}(H)`: the sum of `eta` over all `n^(k+l)` choices of singles
/// and pairs (repeats included) whose `2^l` octahedron tuples all lie in `P`.
pub fn deviation_with(
    h: &Hypergraph,
    l: usize,
    p: Option<&FactoredPredicate>,
    cfg: &MeasureConfig,
    convention: OctahedronConvention,
) -> Result<DevResult> {
    cfg.validate()?;
    let (n, k) = (h.n(), h.k());
    if l > k {
        return invalid(format!("l = {l} exceeds k = {k}"));
    }
    if let Some(p) = p {
        if p.k() != k {
            return invalid(format!("predicate over {}-tuples, hypergraph has k = {k}", p.k()));
        }
    }
    let p = p.filter(|p| !p.is_all());
    let m = k + l;
    let space = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    match cfg.mode {
        Mode::Exact => {
            cfg.guard("exact deviation", space)?;
            let oracle = EdgeOracle::new(h);
            let total: i128 = if n == 0 {
                0
            } else {
                (0..n)
                    .into_par_iter()
                    .map(|first| {
                        let mut eval = Evaluator::new(&oracle, k, l, p, convention);
                        let mut choice = vec![0usize; m];
                        choice[0] = first;
                        let mut acc = 0i128;
                        loop {
                            acc += eval.term(&choice) as i128;
                            let mut pos = m;
                            loop {
                                if pos == 1 {
                                    return acc;
                                }
                                pos -= 1;
                                choice[pos] += 1;
                                if choice[pos] < n {
                                    break;
                                }
                                choice[pos] = 0;
                            }
                        }
                    })
                    .sum()
            };
            Ok(DevResult {
                l,
                mode: Mode::Exact,
                convention,
                value: Some(total),
                normalized: total as f64 / space as f64,
                std_error: None,
                samples: 0,
            })
        }
        Mode::Sampled => {
            if n == 0 {
                return invalid("cannot sample from an empty vertex set");
            }
            let oracle = EdgeOracle::new(h);
            let (sum, nonzero) = (0..cfg.sample_count)
                .into_par_iter()
                .map_init(
                    || (Evaluator::new(&oracle, k, l, p, convention), vec![0usize; m]),
                    |(eval, choice), i| {
                        let mut rng = sample_rng(cfg.seed, i);
                        for c in choice.iter_mut() {
                            *c = rng.gen_range(0..n);
                        }
                        let t = eval.term(choice) as i64;
                        (t, t.abs())
                    },
                )
                .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
            let (mean, se) = mean_and_se(sum as f64, nonzero as f64, cfg.sample_count);
            Ok(DevResult {
                l,
                mode: Mode::Sampled,
                convention,
                value: None,
                normalized: mean,
                std_error: Some(se),
                samples: cfg.sample_count,
            })
        }
    }
}

/// Per-thread scratch for evaluating one summand of the deviation.
struct Evaluator<'a> {
    oracle: &'a EdgeOracle<'a>,
    k: usize,
    l: usize,
    p: Option<&'a FactoredPredicate>,
    convention: OctahedronConvention,
    tuple: Vec<VertexId>,
}

impl<'a> Evaluator<'a> {
    fn new(
        oracle: &'a EdgeOracle<'a>,
        k: usize,
        l: usize,
        p: Option<&'a FactoredPredicate>,
        convention: OctahedronConvention,
    ) -> Self {
        Evaluator { oracle, k, l, p, convention, tuple: vec![0; k] }
    }

    /// `choice` is `x_1..x_{k-l}, y_{1,0}, y_{1,1}, ..., y_{l,0}, y_{l,1}`.
    #[inline]
    fn fill(&mut self, choice: &[VertexId], eps: u32) {
        let s = self.k - self.l;
        self.tuple[..s].copy_from_slice(&choice[..s]);
        for j in 0..self.l {
            self.tuple[s + j] = choice[s + 2 * j + (eps >> j & 1) as usize];
        }
    }

    /// `eta` times the indicator that every octahedron tuple lies in `P`.
    fn term(&mut self, choice: &[VertexId]) -> i8 {
        let tuples = 1u32 << self.l;
        if let Some(p) = self.p {
            for eps in 0..tuples {
                self.fill(choice, eps);
                if !p.contains(&self.tuple) {
                    return 0;
                }
            }
        }
        let distinct = all_distinct(choice);
        if distinct || self.convention == OctahedronConvention::Indexed {
            let mut odd = false;
            for eps in 0..tuples {
                self.fill(choice, eps);
                odd ^= self.oracle.edge(&self.tuple);
            }
            return sign(odd);
        }
        let s = self.k - self.l;
        let parts: Vec<&[VertexId]> = (0..self.k)
            .map(|c| if c < s { &choice[c..c + 1] } else { &choice[s + 2 * (c - s)..s + 2 * (c - s) + 2] })
            .collect();
        let h = self.oracle.h;
        sign(odd_count(&parts, |t| h.contains_unsorted(t), self.convention))
    }
}

#[inline]
fn all_distinct(v: &[VertexId]) -> bool {
    for i in 1..v.len() {
        if v[..i].contains(&v[i]) {
            return false;
        }
    }
    true
}
