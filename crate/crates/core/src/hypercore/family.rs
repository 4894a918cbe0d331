use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

use super::hypergraph::{parse_sets, write_sets};
use super::subsets::{KSet, VertexId};

/// A duplicate-free family of `arity`-subsets of `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetFamily {
    n: usize,
    arity: usize,
    members: Vec<KSet>,
}

impl SubsetFamily {
    pub fn new(n: usize, arity: usize, members: impl IntoIterator<Item = KSet>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for m in members {
            if m.arity() != arity {
                return invalid(format!("member {m:?} does not have arity {arity}"));
            }
            if m.iter().any(|&v| v >= n) {
                return invalid(format!("member {m:?} has a vertex outside 0..{n}"));
            }
            set.insert(m);
        }
        Ok(SubsetFamily { n, arity, members: set.into_iter().collect() })
    }

    /// Convenience constructor from raw vertex lists (any order within a member).
    pub fn from_lists<I, E>(n: usize, arity: usize, lists: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[VertexId]>,
    {
        let members = lists
            .into_iter()
            .map(|l| KSet::from_unsorted(l.as_ref().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, arity, members)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in lexicographic order.
    pub fn members(&self) -> &[KSet] {
        &self.members
    }

    /// `V(S)`, the union of all members, sorted.
    pub fn support(&self) -> Vec<VertexId> {
        let s: BTreeSet<VertexId> = self.members.iter().flat_map(|m| m.iter().copied()).collect();
        s.into_iter().collect()
    }

    /// Members contained in the vertex set flagged by `inside`.
    pub fn restrict(&self, inside: impl Fn(VertexId) -> bool) -> SubsetFamily {
        SubsetFamily {
            n: self.n,
            arity: self.arity,
            members: self.members.iter().filter(|m| m.iter().all(|&v| inside(v))).cloned().collect(),
        }
    }

    pub fn to_text(&self) -> String {
        write_sets(self.arity, self.n, &self.members)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (r, n, sets) = parse_sets(text)?;
        Self::new(n, r, sets).map_err(|e| Error::Parse { line: 1, msg: e.to_string() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedup_and_validate() {
        let f = SubsetFamily::from_lists(5, 2, [[1, 0], [0, 1], [3, 4]]).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.support(), vec![0, 1, 3, 4]);
        assert!(SubsetFamily::from_lists(5, 2, [[0, 1, 2]]).is_err());
        assert!(SubsetFamily::from_lists(3, 1, [[3]]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let f = SubsetFamily::from_lists(6, 2, [[4, 5], [0, 1], [0, 3]]).unwrap();
        let t = f.to_text();
        assert_eq!(t, "2 6 3\n0 1\n0 3\n4 5\n");
        assert_eq!(SubsetFamily::from_text(&t).unwrap(), f);
    }
}
