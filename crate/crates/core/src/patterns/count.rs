use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::hypercore::{falling_factorial, Hypergraph, VertexId};
use crate::measures::{MeasureConfig, Mode};
use crate::rng::sample_rng;

use super::PatternHypergraph;

#[derive(Clone, Debug, Serialize)]
pub struct CountResult {
    pub mode: Mode,
    /// Exact number of labeled copies (exact mode).
    pub value: Option<u128>,
    /// Exact count, or `success rate * n(n-1)...(n-v+1)` when sampled.
    pub estimate: f64,
    pub std_error: Option<f64>,
    pub trials: u64,
    pub successes: u64,
}

/// Vertex order for the search plus, for each step, the pattern edges that
/// become fully placed at that step.
struct Plan {
    order: Vec<VertexId>,
    closing: Vec<Vec<Vec<usize>>>,
}

impl Plan {
    fn new(f: &PatternHypergraph) -> Self {
        let edges = f.edges();
        let mut order: Vec<VertexId> = Vec::new();
        for e in &edges {
            for &v in e.iter() {
                if !order.contains(&v) {
                    order.push(v);
                }
            }
        }
        order.extend((0..f.v()).filter(|v| !edges.iter().any(|e| e.contains(v))));
        let pos: Vec<usize> = {
            let mut p = vec![0; f.v()];
            for (i, &v) in order.iter().enumerate() {
                p[v] = i;
            }
            p
        };
        let mut closing = vec![Vec::new(); order.len()];
        for e in &edges {
            let last = e.iter().map(|&v| pos[v]).max().expect("edges are nonempty");
            // stored as positions in `order`
            closing[last].push(e.iter().map(|&v| pos[v]).collect());
        }
        Plan { order, closing }
    }
}

/// Labeled copies of `f` in `h`: injections `V(F) -> V(H)` sending every
/// edge of `F` to an edge of `H` (non-edges unconstrained).
pub fn count_labeled(f: &PatternHypergraph, h: &Hypergraph, cfg: &MeasureConfig) -> Result<CountResult> {
    cfg.validate()?;
    let (n, v) = (h.n(), f.v());
    let plan = Plan::new(f);
    let injections = falling_factorial(n, v);
    match cfg.mode {
        Mode::Exact => {
            cfg.guard("exact labeled count", (n as u128).checked_pow(v as u32).unwrap_or(u128::MAX))?;
            let total: u128 = if v == 0 {
                1
            } else if v > n {
                0
            } else {
                (0..n)
                    .into_par_iter()
                    .map(|first| {
                        let mut image = vec![first];
                        let mut used = vec![false; n];
                        used[first] = true;
                        if !closes(&plan, h, &image) {
                            return 0;
                        }
                        extend(&plan, h, &mut image, &mut used)
                    })
                    .sum()
            };
            Ok(CountResult {
                mode: Mode::Exact,
                value: Some(total),
                estimate: total as f64,
                std_error: None,
                trials: 0,
                successes: 0,
            })
        }
        Mode::Sampled => {
            if v > n {
                return Ok(CountResult {
                    mode: Mode::Sampled,
                    value: None,
                    estimate: 0.0,
                    std_error: Some(0.0),
                    trials: cfg.sample_count,
                    successes: 0,
                });
            }
            let successes: u64 = (0..cfg.sample_count)
                .into_par_iter()
                .map_init(
                    || (Vec::with_capacity(v), vec![false; n]),
                    |(image, used), i| {
                        let mut rng = sample_rng(cfg.seed, i);
                        image.clear();
                        used.iter_mut().for_each(|u| *u = false);
                        for _ in 0..v {
                            let w = loop {
                                let w = rng.gen_range(0..n);
                                if !used[w] {
                                    break w;
                                }
                            };
                            used[w] = true;
                            image.push(w);
                            if !closes(&plan, h, image) {
                                return 0u64;
                            }
                        }
                        1
                    },
                )
                .sum();
            let trials = cfg.sample_count as f64;
            let rate = successes as f64 / trials;
            let scale = injections as f64;
            let se = (rate * (1.0 - rate) / trials).sqrt() * scale;
            Ok(CountResult {
                mode: Mode::Sampled,
                value: None,
                estimate: rate * scale,
                std_error: Some(se),
                trials: cfg.sample_count,
                successes,
            })
        }
    }
}

/// Checks the edges completed by the most recently placed vertex.
#[inline]
fn closes(plan: &Plan, h: &Hypergraph, image: &[VertexId]) -> bool {
    let step = image.len() - 1;
    let mut buf = [0usize; 16];
    plan.closing[step].iter().all(|edge| {
        for (b, &p) in buf.iter_mut().zip(edge) {
            *b = image[p];
        }
        h.contains_unsorted(&buf[..edge.len()])
    })
}

fn extend(plan: &Plan, h: &Hypergraph, image: &mut Vec<VertexId>, used: &mut [bool]) -> u128 {
    if image.len() == plan.order.len() {
        return 1;
    }
    let mut total = 0;
    for w in 0..used.len() {
        if used[w] {
            continue;
        }
        used[w] = true;
        image.push(w);
        if closes(plan, h, image) {
            total += extend(plan, h, image, used);
        }
        image.pop();
        used[w] = false;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::build_cycle;

    #[test]
    fn single_edge_and_complete_host() {
        let h = Hypergraph::from_predicate(7, 3, |t| (t[0] + t[1] + t[2]) % 3 == 0).unwrap();
        let edge = PatternHypergraph::from_edges(3, 3, [[0, 1, 2]]).unwrap();
        let r = count_labeled(&edge, &h, &MeasureConfig::exact()).unwrap();
        assert_eq!(r.value, Some(6 * h.edge_count() as u128));

        let full = Hypergraph::complete(7, 3).unwrap();
        let c = build_cycle(2, 1).unwrap();
        let r = count_labeled(&c, &full, &MeasureConfig::exact()).unwrap();
        assert_eq!(r.value, Some(falling_factorial(7, 6)));
    }

    #[test]
    fn isolated_vertices_are_free() {
        let h = Hypergraph::from_edges(5, 2, [[0, 1], [1, 2]]).unwrap();
        let f = PatternHypergraph::from_edges(3, 2, [[0, 1]]).unwrap();
        // 4 ordered edges, third vertex anywhere else: 4 * 3
        assert_eq!(count_labeled(&f, &h, &MeasureConfig::exact()).unwrap().value, Some(12));
    }

    #[test]
    fn sampled_agrees_with_exact() {
        let h = Hypergraph::from_predicate(9, 3, |t| (t[0] * t[1] + t[2]) % 2 == 0).unwrap();
        let c = build_cycle(2, 1).unwrap();
        let exact = count_labeled(&c, &h, &MeasureConfig::exact()).unwrap();
        let s = count_labeled(&c, &h, &MeasureConfig::sampled(100_000, 4)).unwrap();
        let gap = (s.estimate - exact.estimate).abs();
        assert!(gap <= 3.0 * s.std_error.unwrap() + 1e-9, "{s:?} vs {exact:?}");
    }
}
