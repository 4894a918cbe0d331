//! Named separation experiments with pinned defaults and thresholds.

use serde::Serialize;

use hqr_core::constructions::{
    color_class_graph, octahedron_parity_census, sample_a, sample_b, sample_d, witness_cd_from_a,
    witness_expand_from_b, CensusFilter, CensusMode, ConstructionHandle,
};
use hqr_core::hypercore::{to_f64, Exact};
use hqr_core::measures::{
    cd_threshold_defect, deviation, expansion_count, expansion_defect, CdScope, MeasureConfig,
};
use hqr_core::partitions::OrderedPartition;
use hqr_core::patterns::{build_cycle, count_labeled};
use hqr_core::report::{exact_value, ReportEntry};
use hqr_core::{binomial, RationalDensity};

use crate::args::SeparateArgs;
use crate::commands::{exact_pair, info};
use crate::{usage, CliResult};

const DENSITY_TOLERANCE: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    A,
    B,
    D,
}

/// Resolved parameters of one run.
#[derive(Clone, Debug, Serialize)]
pub struct Params {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub pi: Option<OrderedPartition>,
    pub p: RationalDensity,
    pub samples: u64,
}

pub struct Lemma {
    pub name: &'static str,
    pub summary: &'static str,
    family: Family,
    n: usize,
    samples: u64,
    pub run: fn(&Params, u64) -> CliResult<Vec<ReportEntry>>,
}

pub const REGISTRY: &[Lemma] = &[
    Lemma {
        name: "A-fails-cd",
        summary: "every k-clique of the zero-color l-graph is an edge of A_l(n,p)",
        family: Family::A,
        n: 60,
        samples: 100_000,
        run: a_fails_cd,
    },
    Lemma {
        name: "A-fails-dev",
        summary: "distinct-vertex octahedra at level l+1 of A_l(n,p) are all even",
        family: Family::A,
        n: 12,
        samples: 0,
        run: a_fails_dev,
    },
    Lemma {
        name: "A-satisfies-dev",
        summary: "exact dev_l of A_l(n,p) is at most 0.05 n^(k+l)",
        family: Family::A,
        n: 30,
        samples: 0,
        run: a_satisfies_dev,
    },
    Lemma {
        name: "A-satisfies-expand",
        summary: "sampled C_(k-1,1),4 count in A_l(n,p) is p^4 n(n-1)...(n-2k+1) within 5%",
        family: Family::A,
        n: 40,
        samples: 1_000_000,
        run: a_satisfies_expand,
    },
    Lemma {
        name: "cd22-counterexample",
        summary: "A_2(n,1/2) against its color-one graph at s = 2: 3/4 of qualifying triples are edges",
        family: Family::A,
        n: 60,
        samples: 100_000,
        run: cd22_counterexample,
    },
    Lemma {
        name: "B-fails-expand",
        summary: "the witness families of B_pi(n,p) span no edge, with defect above the stated constant",
        family: Family::B,
        n: 60,
        samples: 0,
        run: b_fails_expand,
    },
    Lemma {
        name: "B-fails-dev",
        summary: "B_(k-1,1)(n,p) pair-last octahedra are even and dev_2 >= 2^-8 n^(k+2)",
        family: Family::B,
        n: 30,
        samples: 100_000,
        run: fails_dev,
    },
    Lemma {
        name: "D-fails-dev",
        summary: "D(n,1/2) head-single octahedra are even and dev_2 >= 2^-8 n^(k+2)",
        family: Family::D,
        n: 30,
        samples: 100_000,
        run: fails_dev,
    },
    Lemma {
        name: "D-satisfies-expand",
        summary: "sampled C_(k-1,1),4 count in D(n,1/2) is n(n-1)...(n-2k+1)/16 within 5%",
        family: Family::D,
        n: 40,
        samples: 1_000_000,
        run: d_satisfies_expand,
    },
];

pub fn find(name: &str) -> Option<&'static Lemma> {
    REGISTRY.iter().find(|l| l.name.eq_ignore_ascii_case(name))
}

impl Lemma {
    pub fn resolve(&self, a: &SeparateArgs) -> CliResult<Params> {
        let p = a.p.unwrap_or(RationalDensity::HALF);
        let mut params = Params {
            n: a.n.unwrap_or(self.n),
            k: a.k.unwrap_or(3),
            l: a.l.unwrap_or(2),
            pi: None,
            p,
            samples: a.samples.unwrap_or(self.samples),
        };
        match self.family {
            Family::A => {
                if a.pi.is_some() {
                    return usage("--pi applies to B lemmas only");
                }
            }
            Family::B => {
                let pi = match &a.pi {
                    Some(pi) => pi.clone(),
                    None => OrderedPartition::new(vec![params.k.max(2) - 1, 1])?,
                };
                if a.k.is_some_and(|k| k != pi.k()) {
                    return usage(format!("--k {} disagrees with --pi summing to {}", params.k, pi.k()));
                }
                params.k = pi.k();
                params.pi = Some(pi);
            }
            Family::D => {
                if p != RationalDensity::HALF {
                    return usage("D is defined only for p = 1/2");
                }
            }
        }
        if self.name == "cd22-counterexample" && (params.k, params.l, params.p) != (3, 2, RationalDensity::HALF) {
            return usage("cd22-counterexample is pinned to k = 3, l = 2, p = 1/2");
        }
        if self.name == "B-fails-dev" && params.pi.as_ref().is_some_and(|pi| pi.parts() != [params.k - 1, 1]) {
            return usage("B-fails-dev needs pi = (k-1, 1)");
        }
        if params.n < params.k {
            return usage(format!("n = {} is below k = {}", params.n, params.k));
        }
        Ok(params)
    }
}

fn handle(family: Family, p: &Params, seed: u64) -> CliResult<ConstructionHandle> {
    Ok(match family {
        Family::A => sample_a(p.n, p.k, p.l, p.p, seed)?,
        Family::B => sample_b(p.n, p.pi.as_ref().expect("resolved"), p.p, seed)?,
        Family::D => sample_d(p.n, p.k, seed)?,
    })
}

fn density_entry(h: &ConstructionHandle) -> ReportEntry {
    let d = h.density();
    let target = h.p().as_f64();
    ReportEntry::new(
        "satisfied/density",
        d.into(),
        target.into(),
        DENSITY_TOLERANCE.into(),
        (d - target).abs() <= DENSITY_TOLERANCE,
    )
}

fn at_least(name: &str, value: Exact, bound: Exact) -> ReportEntry {
    ReportEntry::new(name, exact_pair(&value), exact_pair(&bound), 0.into(), value >= bound)
}

fn within(name: &str, value: f64, target: f64, tolerance: f64) -> ReportEntry {
    ReportEntry::new(name, value.into(), target.into(), tolerance.into(), (value - target).abs() <= tolerance)
}

fn falling(n: usize, m: usize) -> f64 {
    (0..m).map(|i| (n - i) as f64).product()
}

fn pow_i128(base: usize, exp: usize) -> i128 {
    (base as i128).pow(exp as u32)
}

fn a_fails_cd(p: &Params, seed: u64) -> CliResult<Vec<ReportEntry>> {
    let h = handle(Family::A, p, seed)?;
    let g = witness_cd_from_a(&h)?;
    let cliques = binomial(p.k, p.l) as usize;
    let r = cd_threshold_defect(h.hypergraph(), &g, cliques, p.p, CdScope::NonSpanning)?;
    let total = Exact::from_integer(r.total as i128);
    let b = Exact::from_integer(p.p.denom() as i128);
    // proof constant (1-p) b^-C(k,l) with a factor-2 margin
    let bound = (Exact::from_integer(1) - p.p.value()) / (Exact::from_integer(2) * b.pow(cliques as i32))
        * Exact::from_integer(binomial(p.n, p.k) as i128);
    let mut out = vec![
        info("witness/cliques", r.total),
        ReportEntry::equal("failed/cliques_are_edges", r.hits, r.total),
        ReportEntry::equal(
            "failed/defect_is_(1-p)cliques",
            exact_value(&r.defect),
            exact_value(&((Exact::from_integer(1) - p.p.value()) * total)),
        ),
        at_least("failed/defect_threshold", r.defect, bound),
        density_entry(&h),
    ];
    let dev = deviation(h.hypergraph(), p.l, None, &MeasureConfig::sampled(p.samples.max(1), seed))?;
    out.push(ReportEntry::new(
        "satisfied/dev_normalized",
        dev.normalized.into(),
        0.0.into(),
        0.05.into(),
        dev.normalized.abs() <= 0.05,
    ));
    Ok(out)
}

fn a_fails_dev(p: &Params, seed: u64) -> CliResult<Vec<ReportEntry>> {
    let h = handle(Family::A, p, seed)?;
    let mode = match p.samples {
        0 => CensusMode::Exhaustive,
        count => CensusMode::Sampled { count, seed },
    };
    let c = octahedron_parity_census(&h, p.l + 1, CensusFilter::ADistinct, mode)?;
    Ok(vec![
        info("failed/census_examined", c.examined),
        ReportEntry::new("failed/census_odd", c.odd.into(), 0.into(), 0.into(), c.pass()),
        density_entry(&h),
    ])
}

fn a_satisfies_dev(p: &Params, seed: u64) -> CliResult<Vec<ReportEntry>> {
    let h = handle(Family::A, p, seed)?;
    let dev = deviation(h.hypergraph(), p.l, None, &MeasureConfig::exact().with_threshold(u128::MAX))?;
    let value = dev.value.expect("exact mode");
    let bound = 0.05 * (p.n as f64).powi((p.k + p.l) as i32);
    Ok(vec![
        ReportEntry::new(
            "satisfied/dev_exact",
            value.to_string().into(),
            bound.into(),
            0.into(),
            (value as f64) <= bound,
        ),
        density_entry(&h),
    ])
}

fn a_satisfies_expand(p: &Params, seed: u64) -> CliResult<Vec<ReportEntry>> {
    satisfies_expand(Family::A, p, seed)
}

fn d_satisfies_expand(p: &Params, seed: u64) -> CliResult<Vec<ReportEntry>> {
    satisfies_expand(Family::D, p, seed)
}

fn satisfies_expand(family: Family, p: &Params, seed: u64) -> CliResult<Vec<ReportEntry>> {
    let h = handle(family, p, seed)?;
    let f = build_cycle(p.k - 1, 1)?;
    let c = count_labeled(&f, h.hypergraph(), &MeasureConfig::sampled(p.samples.max(1), seed))?;
    let expected = p.p.as_f64().powi(4) * falling(p.n, f.v());
    Ok(vec![
        within("satisfied/cycle_ratio", c.estimate / expected, 1.0, 0.05),
        info("satisfied/cycle_estimate", c.estimate),
        density_entry(&h),
    ])
}

fn cd22_counterexample(p: &Params, seed: u64) -> CliResult<Vec<ReportEntry>> {
    let h = handle(Family::A, p, seed)?;
    let g = color_class_graph(&h, 1)?;
    let r = cd_threshold_defect(h.hypergraph(), &g, 2, p.p, CdScope::NonSpanning)?;
    let all = binomial(p.n, 3) as f64;
    let (hits, total) = (r.hits as f64, r.total as f64);
    let mut out = vec![
        info("failed/hits", r.hits),
        info("failed/total", r.total),
        within("failed/total_fraction", total / all, 0.5, 0.02),
        within("failed/hit_rate", hits / total, 0.75, 0.02),
        within("failed/defect_fraction", to_f64(&r.defect) / all, 0.125, 0.02),
        density_entry(&h),
    ];
    let dev = deviation(h.hypergraph(), 2, None, &MeasureConfig::sampled(p.samples.max(1), seed))?;
    out.push(within("satisfied/dev_normalized", dev.normalized, 0.0, 0.05));
    Ok(out)
}

fn b_fails_expand(p: &Params, seed: u64) -> CliResult<Vec<ReportEntry>> {
    let h = handle(Family::B, p, seed)?;
    let pi = p.pi.as_ref().expect("resolved");
    let families = witness_expand_from_b(&h)?;
    let e = expansion_count(h.hypergraph(), &families)?;
    let defect = expansion_defect(h.hypergraph(), &families, p.p)?;
    let product: i128 = families.iter().map(|f| f.len() as i128).product();
    let t = pi.len();
    let multinomial = pi.parts().iter().fold((1i128, 0usize), |(acc, used), &ki| {
        (acc * binomial(used + ki, ki) as i128, used + ki)
    });
    let b = p.p.denom() as i128;
    let bound = Exact::new(multinomial.0, 2 * b.pow(t as u32) * pow_i128(t, p.k))
        * p.p.value()
        * Exact::from_integer(binomial(p.n, p.k) as i128);
    Ok(vec![
        info("witness/family_sizes", families.iter().map(|f| f.len()).collect::<Vec<_>>()),
        ReportEntry::equal("failed/cross_edges", e, 0),
        ReportEntry::equal(
            "failed/defect_is_p_product",
            exact_value(&defect),
            exact_value(&(p.p.value() * Exact::from_integer(product))),
        ),
        at_least("failed/defect_threshold", defect, bound),
        density_entry(&h),
    ])
}

fn fails_dev(p: &Params, seed: u64) -> CliResult<Vec<ReportEntry>> {
    let (family, filter) = match p.pi {
        Some(_) => (Family::B, CensusFilter::BPairLast),
        None => (Family::D, CensusFilter::DHeadSingles),
    };
    let h = handle(family, p, seed)?;
    let mode = match p.samples {
        0 => CensusMode::Exhaustive,
        count => CensusMode::Sampled { count, seed },
    };
    let c = octahedron_parity_census(&h, 2, filter, mode)?;
    let dev = deviation(h.hypergraph(), 2, None, &MeasureConfig::exact().with_threshold(u128::MAX))?;
    let value = dev.value.expect("exact mode");
    let bound = Exact::new(pow_i128(p.n, p.k + 2), 256);
    Ok(vec![
        info("failed/census_examined", c.examined),
        ReportEntry::new("failed/census_odd", c.odd.into(), 0.into(), 0.into(), c.pass()),
        at_least("failed/dev_exact", Exact::from_integer(value), bound),
        density_entry(&h),
    ])
}
