//! Proper partitions of `k`, the refinement order, and the implication poset
//! of the quasirandom properties.

mod poset;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use poset::{build_property_poset, export_dot, PropertyKind, PropertyNode, PropertyPoset};

/// An unordered proper partition of `k`, stored with parts descending.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.len() < 2 {
            return invalid(format!("partition {parts:?} needs at least two parts"));
        }
        if parts.contains(&0) {
            return invalid(format!("partition {parts:?} has a zero part"));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    /// The all-ones partition `1 + ... + 1`.
    pub fn singletons(k: usize) -> Result<Self> {
        Self::new(vec![1; k])
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn k(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn max_part(&self) -> usize {
        self.parts[0]
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_parts(f, &self.parts)
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_parts(f, &self.parts)
    }
}

fn write_parts(f: &mut fmt::Formatter<'_>, parts: &[usize]) -> fmt::Result {
    write!(f, "(")?;
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{p}")?;
    }
    write!(f, ")")
}

fn parse_parts(s: &str) -> Result<Vec<usize>> {
    let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
    inner
        .split([',', '+'])
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| Error::InvalidParameter(format!("partition {s:?}: {e}")))
        })
        .collect()
}

impl FromStr for Partition {
    type Err = Error;
    /// Accepts `4,2`, `(4,2)` or `4+2`.
    fn from_str(s: &str) -> Result<Self> {
        Partition::new(parse_parts(s)?)
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Vec<usize> {
        p.parts
    }
}

/// A proper partition of `k` whose parts keep their order.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct OrderedPartition {
    parts: Vec<usize>,
}

impl OrderedPartition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.len() < 2 {
            return invalid(format!("ordered partition {parts:?} needs at least two parts"));
        }
        if parts.contains(&0) {
            return invalid(format!("ordered partition {parts:?} has a zero part"));
        }
        Ok(OrderedPartition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn k(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn unordered(&self) -> Partition {
        Partition::new(self.parts.clone()).expect("validated on construction")
    }
}

impl fmt::Display for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_parts(f, &self.parts)
    }
}

impl fmt::Debug for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_parts(f, &self.parts)
    }
}

impl FromStr for OrderedPartition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        OrderedPartition::new(parse_parts(s)?)
    }
}

impl TryFrom<Vec<usize>> for OrderedPartition {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        OrderedPartition::new(v)
    }
}

impl From<OrderedPartition> for Vec<usize> {
    fn from(p: OrderedPartition) -> Vec<usize> {
        p.parts
    }
}

/// `phi[j]` is the coarse part that fine part `j` is merged into.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementWitness {
    pub phi: Vec<usize>,
}

impl RefinementWitness {
    /// Checks the witness against the raw definition.
    pub fn verify(&self, fine: &Partition, coarse: &Partition) -> bool {
        if self.phi.len() != fine.len() || self.phi.iter().any(|&i| i >= coarse.len()) {
            return false;
        }
        let mut sums = vec![0usize; coarse.len()];
        for (j, &i) in self.phi.iter().enumerate() {
            sums[i] += fine.parts[j];
        }
        sums == coarse.parts
    }
}

/// Decides `fine <= coarse`, returning a grouping surjection when it holds.
pub fn is_refinement(fine: &Partition, coarse: &Partition) -> Result<Option<RefinementWitness>> {
    if fine.k() != coarse.k() {
        return invalid(format!("{fine} and {coarse} partition different integers"));
    }
    let mut remaining = coarse.parts.clone();
    let mut phi = vec![0usize; fine.len()];
    let mut dead = HashSet::new();
    if assign(&fine.parts, 0, &mut remaining, &mut phi, &mut dead) {
        Ok(Some(RefinementWitness { phi }))
    } else {
        Ok(None)
    }
}

fn assign(
    fine: &[usize],
    j: usize,
    remaining: &mut Vec<usize>,
    phi: &mut [usize],
    dead: &mut HashSet<(usize, Vec<usize>)>,
) -> bool {
    if j == fine.len() {
        return remaining.iter().all(|&r| r == 0);
    }
    let mut key = remaining.clone();
    key.sort_unstable();
    if dead.contains(&(j, key.clone())) {
        return false;
    }
    for i in 0..remaining.len() {
        // coarse parts with equal leftover capacity are interchangeable
        if remaining[i] < fine[j] || remaining[..i].contains(&remaining[i]) {
            continue;
        }
        remaining[i] -= fine[j];
        phi[j] = i;
        if assign(fine, j + 1, remaining, phi, dead) {
            return true;
        }
        remaining[i] += fine[j];
    }
    dead.insert((j, key));
    false
}

/// All proper partitions of `k`, ordered by number of parts and then
/// lexicographically descending.
pub fn enumerate_partitions(k: usize) -> Vec<Partition> {
    let mut all = Vec::new();
    let mut cur = Vec::new();
    gen_partitions(k, k, &mut cur, &mut all);
    let mut out: Vec<Partition> = all
        .into_iter()
        .filter(|p| p.len() >= 2)
        .map(|parts| Partition { parts })
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| b.parts.cmp(&a.parts)));
    out
}

fn gen_partitions(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if rest == 0 {
        out.push(cur.clone());
        return;
    }
    for part in (1..=rest.min(max)).rev() {
        cur.push(part);
        gen_partitions(rest - part, part, cur, out);
        cur.pop();
    }
}
