//! Exact-identity suites over seeded random instances.
//!
//! Each suite draws small instances from a counter-based stream, runs the
//! corresponding checks, and tallies passes per check. Instance `i` of a
//! suite depends only on `(seed, i)`, so a failure can be replayed alone.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cdells::{
    complement_general_check, complement_threshold_check, overcount_identity_check, partite_claims_check,
    IntersectionPatternSet, VertexKPartition,
};
use crate::devtheory::{cauchy_step_check, clique_predicate, nonnegativity_check, subdev_inequality_check};
use crate::error::Result;
use crate::hypercore::{binomial, for_each_subset_of, Hypergraph, KSet, RationalDensity, SubsetFamily};
use crate::measures::{partite_expansion_identity_check, FactoredPredicate, MeasureConfig, OctahedronConvention};
use crate::report::ReportEntry;
use crate::rng::sample_rng;

/// Pass counts per named check.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub instances: usize,
    pub checks: BTreeMap<String, CheckTally>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CheckTally {
    pub passed: usize,
    pub total: usize,
    /// Description of the first failing instance.
    pub first_failure: Option<String>,
}

impl SuiteSummary {
    fn new(suite: &str) -> Self {
        SuiteSummary { suite: suite.to_string(), ..Default::default() }
    }

    fn record(&mut self, check: &str, pass: bool, detail: impl FnOnce() -> String) {
        let tally = self.checks.entry(check.to_string()).or_default();
        tally.total += 1;
        if pass {
            tally.passed += 1;
        } else if tally.first_failure.is_none() {
            tally.first_failure = Some(detail());
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|t| t.passed == t.total)
    }

    pub fn entries(&self) -> Vec<ReportEntry> {
        self.checks
            .iter()
            .map(|(name, t)| {
                ReportEntry::new(
                    format!("{}/{}", self.suite, name),
                    t.passed.into(),
                    t.total.into(),
                    0.into(),
                    t.passed == t.total,
                )
            })
            .collect()
    }
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Result<Hypergraph> {
    Hypergraph::from_predicate(n, k, |_| rng.gen_bool(0.5))
}

fn random_family(rng: &mut ChaCha8Rng, n: usize, arity: usize, support: &[usize]) -> Result<SubsetFamily> {
    let mut members = Vec::new();
    for_each_subset_of(support, arity, |s| {
        if rng.gen_bool(0.6) {
            members.push(KSet::from_sorted(s.to_vec()).expect("sorted"));
        }
    });
    SubsetFamily::new(n, arity, members)
}

fn random_cylinder(rng: &mut ChaCha8Rng, n: usize, k: usize, coordinate: usize) -> Result<FactoredPredicate> {
    let density = rng.gen_range(0.3..1.0);
    let table: Vec<bool> = (0..n.pow(k as u32 - 1)).map(|_| rng.gen_bool(density)).collect();
    FactoredPredicate::complete_in(k, coordinate, move |t| table[t.iter().rev().fold(0, |acc, &v| acc * n + v)])
}

/// Random surjection `0..n -> 0..k`, `n >= k`.
fn random_partition(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Result<VertexKPartition> {
    let mut part_of: Vec<usize> = (0..n).map(|v| if v < k { v } else { rng.gen_range(0..k) }).collect();
    part_of.shuffle(rng);
    VertexKPartition::new(k, part_of)
}

/// Partition averaging for `k = 3`, two families with disjoint supports.
pub fn partite_suite(trials: usize, n_max: usize, seed: u64) -> Result<SuiteSummary> {
    let mut out = SuiteSummary::new("partite");
    let cfg = MeasureConfig::exact();
    for trial in 0..trials {
        let mut rng = sample_rng(seed, trial as u64);
        let n = rng.gen_range(3..=n_max.max(3));
        let h = random_graph(&mut rng, n, 3)?;
        let arities = if rng.gen_bool(0.5) { [2, 1] } else { [1, 2] };
        let mut vertices: Vec<usize> = (0..n).collect();
        vertices.shuffle(&mut rng);
        let cut = rng.gen_range(arities[0]..=n - arities[1]);
        let (mut left, mut right) = (vertices[..cut].to_vec(), vertices[cut..].to_vec());
        left.sort_unstable();
        right.sort_unstable();
        let families = vec![
            random_family(&mut rng, n, arities[0], &left)?,
            random_family(&mut rng, n, arities[1], &right)?,
        ];
        let rep = partite_expansion_identity_check(&h, &families, &cfg)?;
        out.record("sizes", rep.size_lhs == rep.size_rhs, || format!("trial {trial}: {rep:?}"));
        out.record("edges", rep.e_lhs == rep.e_rhs, || format!("trial {trial}: {rep:?}"));
        out.record("partition_count", rep.partitions_summed == rep.partitions_expected, || {
            format!("trial {trial}: {rep:?}")
        });
        out.instances += 1;
    }
    Ok(out)
}

/// The CD(l, s) identities for `k = 3`, `l = 2`.
pub fn cdells_suite(trials: usize, n_max: usize, seed: u64) -> Result<SuiteSummary> {
    let (k, l) = (3, 2);
    let top = binomial(k, l) as usize;
    let mut out = SuiteSummary::new("cdells");
    let cfg = MeasureConfig::exact();
    for trial in 0..trials {
        let mut rng = sample_rng(seed, trial as u64);
        let n = rng.gen_range(k..=n_max.max(k));
        let g = random_graph(&mut rng, n, l)?;
        let h = random_graph(&mut rng, n, k)?;
        let ctx = |what: &str| format!("trial {trial} (n = {n}, {what})");

        let p = random_partition(&mut rng, n, k)?;
        let mut masks = IntersectionPatternSet::all(k, l)?.masks().to_vec();
        masks.shuffle(&mut rng);
        let r_size = rng.gen_range(1..top);
        let r = IntersectionPatternSet::from_masks(k, l, masks[..r_size].to_vec())?;
        let missing = masks[r_size];
        let i: Vec<usize> = (0..k).filter(|b| missing >> b & 1 == 1).collect();
        let claims = partite_claims_check(&g, &p, &r, &i, Some(&h))?;
        out.record("mobius_pair", claims.g_is_sum_of_f && claims.f_is_mobius_of_g, || ctx(&format!("{claims:?}")));
        out.record(
            "transversal_equalities",
            claims.transversal_shift && claims.augmented_matches_restricted() && claims.f_full_matches_w(),
            || ctx(&format!("{claims:?}")),
        );

        let s = rng.gen_range(1..=top);
        let over = overcount_identity_check(&g, k, s, Some(&h), &cfg)?;
        out.record("overcount", over.pass(), || {
            ctx(&format!(
                "s = {s}: lhs·k!k^(n-k) = {}, sum = {}; weighted lhs = {}",
                over.lhs * over.normalization,
                over.rhs,
                over.lhs_weighted * over.normalization
            ))
        });
        out.record("overcount_weighted", over.weighted_holds(), || ctx(&format!("{over:?}")));

        let comp = complement_threshold_check(&g, k, Some(&h), Some(RationalDensity::HALF))?;
        out.record("complement", comp.pass(), || ctx(&format!("{comp:?}")));
        let general = complement_general_check(&g, k, s, Some(&h), Some(RationalDensity::HALF))?;
        out.record("complement_general", general.pass(), || ctx(&format!("{general:?}")));
        out.instances += 1;
    }
    Ok(out)
}

/// Deviation inequalities for `k = 3` at a random level in `1..=3`.
pub fn appendix_suite(trials: usize, n_max: usize, seed: u64, conv: OctahedronConvention) -> Result<SuiteSummary> {
    let k = 3;
    let mut out = SuiteSummary::new("appendix");
    let cfg = MeasureConfig::exact();
    for trial in 0..trials {
        let mut rng = sample_rng(seed, trial as u64);
        let n = rng.gen_range(3..=n_max.max(3));
        let l = rng.gen_range(1..=k);
        let h = random_graph(&mut rng, n, k)?;
        let p = match rng.gen_range(0..3) {
            0 => FactoredPredicate::all(k),
            1 => {
                let c = rng.gen_range(1..=k);
                random_cylinder(&mut rng, n, k, c)?
            }
            _ => clique_predicate(&random_graph(&mut rng, n, 2)?, k)?,
        };
        let i = rng.gen_range(k - l + 1..=k);
        let q = random_cylinder(&mut rng, n, k, i)?;
        let ctx = |what: String| format!("trial {trial} (n = {n}, l = {l}, i = {i}): {what}");

        let sub = subdev_inequality_check(&h, l, &p, &q, &cfg, conv)?;
        out.record("subdev", sub.pass(), || ctx(format!("{sub:?}")));
        let cauchy = cauchy_step_check(&h, l, &p, &cfg, conv)?;
        out.record("cauchy", cauchy.pass(), || ctx(format!("{cauchy:?}")));

        // doubled-coordinate cylinders only
        let mut doubled = q.clone();
        if l >= 2 && rng.gen_bool(0.5) {
            let j = rng.gen_range(k - l + 1..=k);
            doubled = doubled.intersect(&random_cylinder(&mut rng, n, k, j)?)?;
        }
        let nonneg = nonnegativity_check(&h, l, &doubled, &cfg, conv)?;
        out.record("nonnegative", nonneg.pass(), || ctx(format!("{nonneg:?}")));
        out.record("square_regrouping", nonneg.regrouping_matches(), || ctx(format!("{nonneg:?}")));
        out.instances += 1;
    }
    Ok(out)
}
