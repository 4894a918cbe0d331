use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{invalid, Result};

use super::{enumerate_partitions, is_refinement, Partition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PropertyKind {
    #[serde(rename = "CD")]
    Cd,
    Expand,
    Dev,
    Disc,
}

/// One quasirandom property for a fixed uniformity `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PropertyNode {
    Cd(usize),
    Expand(Partition),
    Dev(usize),
    Disc,
}

impl PropertyNode {
    pub fn kind(&self) -> PropertyKind {
        match self {
            PropertyNode::Cd(_) => PropertyKind::Cd,
            PropertyNode::Expand(_) => PropertyKind::Expand,
            PropertyNode::Dev(_) => PropertyKind::Dev,
            PropertyNode::Disc => PropertyKind::Disc,
        }
    }

    fn parameter_json(&self) -> serde_json::Value {
        match self {
            PropertyNode::Cd(l) | PropertyNode::Dev(l) => json!(l),
            PropertyNode::Expand(p) => json!(p.parts()),
            PropertyNode::Disc => serde_json::Value::Null,
        }
    }
}

/// Labels follow the Hasse diagram convention: Expand nodes are shown by
/// their partition alone.
impl fmt::Display for PropertyNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyNode::Cd(l) => write!(f, "CD({l})"),
            PropertyNode::Expand(p) => write!(f, "{p}"),
            PropertyNode::Dev(l) => write!(f, "Dev({l})"),
            PropertyNode::Disc => write!(f, "Disc"),
        }
    }
}

/// Properties merged into equivalence classes, with the Hasse edges between
/// classes. An edge `(a, b)` means class `a` implies class `b`.
#[derive(Clone, Debug, Default)]
pub struct PropertyPoset {
    k: usize,
    nodes: Vec<PropertyNode>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    reach: Vec<Vec<bool>>,
    hasse: Vec<(usize, usize)>,
}

impl PropertyPoset {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn nodes(&self) -> &[PropertyNode] {
        &self.nodes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Members of class `c`, in label order (CD, Expand, Dev, Disc).
    pub fn class_members(&self, c: usize) -> impl Iterator<Item = &PropertyNode> {
        self.classes[c].iter().map(|&i| &self.nodes[i])
    }

    pub fn class_label(&self, c: usize) -> String {
        self.class_members(c).map(|n| n.to_string()).collect::<Vec<_>>().join(" ⇔ ")
    }

    pub fn class_of(&self, node: &PropertyNode) -> Option<usize> {
        self.nodes.iter().position(|n| n == node).map(|i| self.class_of[i])
    }

    /// Whether `a` implies `b` (reflexive, transitive).
    pub fn implies(&self, a: &PropertyNode, b: &PropertyNode) -> Option<bool> {
        Some(self.reach[self.class_of(a)?][self.class_of(b)?])
    }

    pub fn hasse_edges(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    /// Hasse edges as `(stronger, weaker)` label pairs, sorted.
    pub fn labeled_edges(&self) -> Vec<(String, String)> {
        let mut out: Vec<_> = self
            .hasse
            .iter()
            .map(|&(a, b)| (self.class_label(a), self.class_label(b)))
            .collect();
        out.sort();
        out
    }

    /// Sorted class labels.
    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<_> = (0..self.classes.len()).map(|c| self.class_label(c)).collect();
        out.sort();
        out
    }

    /// The class implied by every other class, if any.
    pub fn bottom(&self) -> Option<usize> {
        (0..self.classes.len()).find(|&c| (0..self.classes.len()).all(|d| self.reach[d][c]))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nodes: Vec<_> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| {
                json!({
                    "label": n.to_string(),
                    "kind": n.kind(),
                    "parameter": n.parameter_json(),
                    "class": self.class_label(self.class_of[i]),
                })
            })
            .collect();
        let edges: Vec<_> = self
            .labeled_edges()
            .into_iter()
            .map(|(from, to)| json!({"from": from, "to": to}))
            .collect();
        let mut equivalences: Vec<Vec<String>> = self
            .classes
            .iter()
            .filter(|c| c.len() > 1)
            .map(|c| c.iter().map(|&i| self.nodes[i].to_string()).collect())
            .collect();
        equivalences.sort();
        json!({"k": self.k, "nodes": nodes, "edges": edges, "equivalences": equivalences})
    }
}

/// Builds the implication poset for uniformity `k`.
///
/// Direct implications: refinement among Expand nodes, the CD and Dev
/// chains, `CD(l) -> Expand(pi)` when `max pi <= l`, `Dev(l) -> CD(l-1)`,
/// `Dev(l) -> Expand(pi)` for every `pi`, plus the two definitional
/// equivalences `Disc <-> CD(1) <-> Expand(1,...,1)` and `CD(k-1) <-> Dev(k)`.
/// Strongly connected components become classes; the class order is then
/// transitively closed and reduced.
pub fn build_property_poset(k: usize) -> Result<PropertyPoset> {
    if k < 3 {
        return invalid(format!("the property poset needs k >= 3, got {k}"));
    }
    let partitions = enumerate_partitions(k);
    let mut nodes: Vec<PropertyNode> = Vec::new();
    nodes.extend((1..k).map(PropertyNode::Cd));
    nodes.extend(partitions.iter().cloned().map(PropertyNode::Expand));
    nodes.extend((2..=k).map(PropertyNode::Dev));
    nodes.push(PropertyNode::Disc);
    let idx = |n: &PropertyNode| nodes.iter().position(|m| m == n).expect("node exists");

    let m = nodes.len();
    let mut adj = vec![vec![false; m]; m];
    let mut add = |a: usize, b: usize| adj[a][b] = true;
    let ones = PropertyNode::Expand(Partition::singletons(k)?);
    for (a, b) in [
        (PropertyNode::Disc, PropertyNode::Cd(1)),
        (PropertyNode::Cd(1), PropertyNode::Disc),
        (PropertyNode::Cd(1), ones.clone()),
        (ones.clone(), PropertyNode::Cd(1)),
        (PropertyNode::Cd(k - 1), PropertyNode::Dev(k)),
    ] {
        add(idx(&a), idx(&b));
    }
    for p in &partitions {
        let from = idx(&PropertyNode::Expand(p.clone()));
        for q in &partitions {
            if is_refinement(q, p)?.is_some() {
                add(from, idx(&PropertyNode::Expand(q.clone())));
            }
        }
    }
    for l in 2..k {
        add(idx(&PropertyNode::Cd(l)), idx(&PropertyNode::Cd(l - 1)));
        for p in &partitions {
            if p.max_part() <= l {
                add(idx(&PropertyNode::Cd(l)), idx(&PropertyNode::Expand(p.clone())));
            }
        }
    }
    for l in 2..=k {
        let dev = idx(&PropertyNode::Dev(l));
        if l > 2 {
            add(dev, idx(&PropertyNode::Dev(l - 1)));
        }
        add(dev, idx(&PropertyNode::Cd(l - 1)));
        for p in &partitions {
            add(dev, idx(&PropertyNode::Expand(p.clone())));
        }
    }

    let reach = transitive_closure(adj);

    // classes are the strongly connected components; number them by the
    // first member in node order so the result is deterministic
    let mut class_of = vec![usize::MAX; m];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for a in 0..m {
        if class_of[a] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = (a..m).filter(|&b| reach[a][b] && reach[b][a]).collect();
        for &b in &members {
            class_of[b] = classes.len();
        }
        classes.push(members);
    }
    for c in &mut classes {
        c.sort_by_key(|&i| nodes[i].kind());
    }

    let cn = classes.len();
    let mut creach = vec![vec![false; cn]; cn];
    for a in 0..m {
        for b in 0..m {
            if reach[a][b] {
                creach[class_of[a]][class_of[b]] = true;
            }
        }
    }
    let mut hasse = Vec::new();
    for a in 0..cn {
        for b in 0..cn {
            if a == b || !creach[a][b] {
                continue;
            }
            let covered = (0..cn).any(|c| c != a && c != b && creach[a][c] && creach[c][b]);
            if !covered {
                hasse.push((a, b));
            }
        }
    }

    Ok(PropertyPoset { k, nodes, classes, class_of, reach: creach, hasse })
}

fn transitive_closure(mut r: Vec<Vec<bool>>) -> Vec<Vec<bool>> {
    let m = r.len();
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for via in 0..m {
        for a in 0..m {
            if a != via && r[a][via] {
                let row = r[via].clone();
                for (dst, src) in r[a].iter_mut().zip(row) {
                    *dst |= src;
                }
            }
        }
    }
    r
}

/// DOT rendering of the Hasse diagram. Nodes and edges are sorted by label,
/// so the output is byte-stable.
pub fn export_dot(poset: &PropertyPoset) -> String {
    let mut out = String::from("digraph properties {\n");
    for label in poset.labels() {
        let _ = writeln!(out, "  {};", quote(&label));
    }
    for (a, b) in poset.labeled_edges() {
        let _ = writeln!(out, "  {} -> {};", quote(&a), quote(&b));
    }
    out.push_str("}\n");
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}
