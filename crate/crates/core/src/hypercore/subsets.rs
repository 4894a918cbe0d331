use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub type VertexId = usize;

/// Exact binomial coefficient; saturates at `u128::MAX` on overflow.
pub fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 1..=r {
        // acc * (n - r + i) is divisible by i at every step
        acc = match acc.checked_mul((n - r + i) as u128) {
            Some(v) => v / i as u128,
            None => return u128::MAX,
        };
    }
    acc
}

/// Multinomial coefficient `(sum parts)! / prod(parts!)`.
pub fn multinomial(parts: &[usize]) -> u128 {
    let mut total = 0usize;
    let mut acc: u128 = 1;
    for &p in parts {
        total += p;
        acc *= binomial(total, p);
    }
    acc
}

/// Falling factorial `n (n-1) ... (n-v+1)`.
pub fn falling_factorial(n: usize, v: usize) -> u128 {
    if v > n {
        return 0;
    }
    (0..v).map(|i| (n - i) as u128).product()
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Table of `C(v, j)` for `v <= n`, `j <= r`, used by the rank kernels.
#[derive(Clone, Debug)]
pub struct BinomTable {
    stride: usize,
    data: Vec<u64>,
}

impl BinomTable {
    pub fn new(n: usize, r: usize) -> Self {
        let stride = r + 1;
        let mut data = vec![0u64; (n + 1) * stride];
        for v in 0..=n {
            data[v * stride] = 1;
            for j in 1..=r.min(v) {
                let above = data[(v - 1) * stride + j - 1];
                let left = if j < v { data[(v - 1) * stride + j] } else { 0 };
                data[v * stride + j] = above.saturating_add(left);
            }
        }
        BinomTable { stride, data }
    }

    #[inline]
    pub fn get(&self, v: usize, j: usize) -> u64 {
        if j >= self.stride || v * self.stride + j >= self.data.len() {
            return 0;
        }
        self.data[v * self.stride + j]
    }

    /// Colexicographic rank of a strictly increasing sequence.
    #[inline]
    pub fn rank(&self, sorted: &[usize]) -> u64 {
        let mut r = 0u64;
        for (i, &v) in sorted.iter().enumerate() {
            r += self.get(v, i + 1);
        }
        r
    }

    /// Inverse of [`BinomTable::rank`] for sets of size `r` over `[0, n)`.
    pub fn unrank(&self, n: usize, r: usize, mut rank: u64) -> Vec<usize> {
        let mut out = vec![0usize; r];
        let mut hi = n;
        for i in (0..r).rev() {
            // largest v < hi with C(v, i+1) <= rank
            let mut v = hi - 1;
            while self.get(v, i + 1) > rank {
                v -= 1;
            }
            out[i] = v;
            rank -= self.get(v, i + 1);
            hi = v;
        }
        out
    }
}

/// Colexicographic rank of a strictly increasing sequence.
pub fn colex_rank(sorted: &[usize]) -> u128 {
    sorted
        .iter()
        .enumerate()
        .map(|(i, &v)| binomial(v, i + 1))
        .sum()
}

/// Inverse of [`colex_rank`] over `r`-subsets of `[0, n)`.
pub fn colex_unrank(n: usize, r: usize, mut rank: u128) -> Vec<usize> {
    let mut out = vec![0usize; r];
    let mut hi = n;
    for i in (0..r).rev() {
        let mut v = hi - 1;
        while binomial(v, i + 1) > rank {
            v -= 1;
        }
        out[i] = v;
        rank -= binomial(v, i + 1);
        hi = v;
    }
    out
}

/// Step `cur` to its colexicographic successor among `r`-subsets of `[0, n)`.
/// Returns false when `cur` was the last subset.
#[inline]
pub fn colex_next(cur: &mut [usize], n: usize) -> bool {
    let r = cur.len();
    for i in 0..r {
        let limit = if i + 1 < r { cur[i + 1] } else { n };
        if cur[i] + 1 < limit {
            cur[i] += 1;
            for (j, slot) in cur.iter_mut().enumerate().take(i) {
                *slot = j;
            }
            return true;
        }
    }
    false
}

/// Calls `f` on every `r`-subset of `[0, n)` in colexicographic order.
pub fn for_each_ksubset(n: usize, r: usize, mut f: impl FnMut(&[usize])) {
    if r > n {
        return;
    }
    let mut cur: Vec<usize> = (0..r).collect();
    loop {
        f(&cur);
        if !colex_next(&mut cur, n) {
            break;
        }
    }
}

/// Calls `f` on every `r`-subset of `items` (in colex order of positions).
pub fn for_each_subset_of(items: &[usize], r: usize, mut f: impl FnMut(&[usize])) {
    let n = items.len();
    if r > n {
        return;
    }
    let mut pos: Vec<usize> = (0..r).collect();
    let mut buf = vec![0usize; r];
    loop {
        for (b, &p) in buf.iter_mut().zip(&pos) {
            *b = items[p];
        }
        f(&buf);
        if !colex_next(&mut pos, n) {
            break;
        }
    }
}

/// A strictly increasing list of vertices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KSet(Vec<VertexId>);

impl KSet {
    pub fn from_sorted(vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return invalid(format!("{vertices:?} is not strictly increasing"));
        }
        Ok(KSet(vertices))
    }

    /// Sorts the input; rejects repeated vertices.
    pub fn from_unsorted(mut vertices: Vec<VertexId>) -> Result<Self> {
        vertices.sort_unstable();
        Self::from_sorted(vertices)
    }

    pub(crate) fn from_sorted_unchecked(vertices: Vec<VertexId>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        KSet(vertices)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<VertexId> {
        self.0
    }

    pub fn rank(&self) -> u128 {
        colex_rank(&self.0)
    }

    pub fn unrank(n: usize, r: usize, rank: u128) -> Self {
        KSet(colex_unrank(n, r, rank))
    }

    pub fn is_subset_of(&self, other: &KSet) -> bool {
        let mut it = other.0.iter();
        self.0.iter().all(|v| it.any(|w| w == v))
    }
}

impl Deref for KSet {
    type Target = [VertexId];
    fn deref(&self) -> &[VertexId] {
        &self.0
    }
}

impl AsRef<[VertexId]> for KSet {
    fn as_ref(&self) -> &[VertexId] {
        &self.0
    }
}

impl fmt::Debug for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Colexicographic stream of `r`-subsets of `[0, n)`.
pub struct KSubsets {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Iterator for KSubsets {
    type Item = KSet;

    fn next(&mut self) -> Option<KSet> {
        let cur = self.cur.as_mut()?;
        let out = KSet(cur.clone());
        if !colex_next(cur, self.n) {
            self.cur = None;
        }
        Some(out)
    }
}

/// All `C(n, r)` subsets in colexicographic order; empty when `r > n`.
pub fn enumerate_ksubsets(n: usize, r: usize) -> KSubsets {
    KSubsets {
        n,
        cur: if r <= n { Some((0..r).collect()) } else { None },
    }
}
