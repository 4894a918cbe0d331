use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use hqr_core::constructions::{
    octahedron_parity_census, sample_a, sample_b, sample_d, witness_cd_from_a, witness_expand_from_b,
    CensusFilter, CensusMode, ConstructionHandle,
};
use hqr_core::hypercore::{to_f64, Exact};
use hqr_core::measures::{
    cd_threshold_defect, deviation_with, disc_defect, expansion_count, expansion_defect, CdScope, MeasureConfig,
};
use hqr_core::partitions::{build_property_poset, export_dot, OrderedPartition};
use hqr_core::report::{exact_value, Report, ReportEntry};
use hqr_core::suites::{appendix_suite, cdells_suite, partite_suite};
use hqr_core::{binomial, Hypergraph, RationalDensity, SubsetFamily};

use crate::args::{
    CensusArgs, ConstructionArgs, Kind, MeasureArgs, MeasureKind, ModeArg, PosetArgs, SampleArgs, SeparateArgs,
    Suite, VerifyArgs,
};
use crate::{lemmas, usage, CliResult};

fn config_of(args: &impl Serialize) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}

/// A measured value with an optional upper bound.
pub fn at_most(name: impl Into<String>, value: f64, max: Option<f64>) -> ReportEntry {
    let pass = max.is_none_or(|m| value <= m);
    ReportEntry::new(name, value.into(), max.map_or(Value::Null, Value::from), 0.into(), pass)
}

/// An informational value that cannot fail.
pub fn info(name: impl Into<String>, value: impl Serialize) -> ReportEntry {
    ReportEntry::new(name, serde_json::to_value(value).unwrap_or(Value::Null), Value::Null, Value::Null, true)
}

/// Runs `f` for seeds `seed..seed+count` in parallel and concatenates the
/// entries in seed order, prefixing names when more than one seed ran.
pub fn fan_out(
    seed: u64,
    count: u64,
    f: impl Fn(u64) -> CliResult<Vec<ReportEntry>> + Sync,
) -> CliResult<Vec<ReportEntry>> {
    if count == 0 {
        return usage("--seeds must be positive");
    }
    if count == 1 {
        return f(seed);
    }
    let per_seed: Vec<Vec<ReportEntry>> = (seed..seed + count).into_par_iter().map(&f).collect::<CliResult<_>>()?;
    Ok(per_seed
        .into_iter()
        .zip(seed..)
        .flat_map(|(entries, s)| {
            entries.into_iter().map(move |mut e| {
                e.name = format!("seed={s}/{}", e.name);
                e
            })
        })
        .collect())
}

pub fn build(c: &ConstructionArgs, seed: u64) -> CliResult<ConstructionHandle> {
    Ok(match c.construction {
        Kind::A => sample_a(c.n, c.k, c.l, c.p, seed)?,
        Kind::B => {
            let pi = match &c.pi {
                Some(pi) => pi.clone(),
                None if c.k >= 2 => OrderedPartition::new(vec![c.k - 1, 1])?,
                None => return usage("B needs k >= 2"),
            };
            sample_b(c.n, &pi, c.p, seed)?
        }
        Kind::D => {
            if c.p != RationalDensity::HALF {
                return usage("D is defined only for p = 1/2");
            }
            sample_d(c.n, c.k, seed)?
        }
    })
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).or_else(|e| usage(format!("cannot read {}: {e}", path.display())))
}

pub fn sample(a: &SampleArgs) -> CliResult<Report> {
    let c = &a.construction;
    let handle = build(c, c.seed)?;
    let h = handle.hypergraph();
    fs::write(&a.out, h.to_text())?;
    let mut report = Report::new(config_of(a));
    report.push(info("sample/edges", h.edge_count()));
    report.push(info("sample/density", handle.density()));
    if let Some(path) = &a.witness {
        match c.construction {
            Kind::A => {
                let g = witness_cd_from_a(&handle)?;
                fs::write(path, g.to_text())?;
                report.push(info("sample/witness_edges", g.edge_count()));
            }
            Kind::B => {
                for (i, fam) in witness_expand_from_b(&handle)?.iter().enumerate() {
                    let file = format!("{}.{}", path.display(), i + 1);
                    fs::write(&file, fam.to_text())?;
                    report.push(info(format!("sample/witness_{}_size", i + 1), fam.len()));
                }
            }
            Kind::D => return usage("D has no extractable witness"),
        }
    }
    Ok(report)
}

pub fn measure(a: &MeasureArgs) -> CliResult<Report> {
    let h = Hypergraph::from_text(&read_text(&a.input)?)?;
    let mut cfg = match a.mode {
        ModeArg::Exact => MeasureConfig::exact(),
        ModeArg::Sampled => MeasureConfig::sampled(a.samples, a.seed),
    };
    if let Some(t) = a.exact_threshold {
        cfg = cfg.with_threshold(t);
    }
    let scale = (h.n() as f64).powi(h.k() as i32);
    let mut report = Report::new(config_of(a));
    match a.measure {
        MeasureKind::Disc => {
            let r = disc_defect(&h, a.p, &cfg)?;
            report.push(info("disc/defect", exact_value(&r.defect)));
            report.push(info("disc/witness", &r.witness));
            report.push(info("disc/lower_bound", r.lower_bound));
            report.push(at_most("disc/normalized", to_f64(&r.defect) / scale, a.max));
        }
        MeasureKind::Expand => {
            if a.families.is_empty() {
                return usage("expand needs at least one --family file");
            }
            let families = a
                .families
                .iter()
                .map(|f| Ok(SubsetFamily::from_text(&read_text(f)?)?))
                .collect::<CliResult<Vec<_>>>()?;
            let count = expansion_count(&h, &families)?;
            let defect = expansion_defect(&h, &families, a.p)?;
            report.push(info("expand/count", count));
            report.push(info("expand/defect", exact_value(&defect)));
            report.push(at_most("expand/normalized", to_f64(&defect) / scale, a.max));
        }
        MeasureKind::Cd => {
            let Some(gp) = &a.g else {
                return usage("cd needs --g");
            };
            let g = Hypergraph::from_text(&read_text(gp)?)?;
            if g.k() >= h.k() {
                return usage(format!("G must have uniformity below {}", h.k()));
            }
            let s = a.s.unwrap_or(binomial(h.k(), g.k()) as usize);
            let scope = if a.spanning { CdScope::Spanning } else { CdScope::NonSpanning };
            let r = cd_threshold_defect(&h, &g, s, a.p, scope)?;
            report.push(info("cd/hits", r.hits));
            report.push(info("cd/total", r.total));
            report.push(info("cd/defect", exact_value(&r.defect)));
            report.push(at_most("cd/normalized", to_f64(&r.defect) / scale, a.max));
        }
        MeasureKind::Dev => {
            let Some(l) = a.l else {
                return usage("dev needs --l");
            };
            let r = deviation_with(&h, l, None, &cfg, a.convention.into())?;
            if let Some(v) = r.value {
                report.push(info("dev/value", v.to_string()));
            }
            if let Some(se) = r.std_error {
                report.push(info("dev/std_error", se));
            }
            report.push(at_most("dev/normalized", r.normalized, a.max));
        }
    }
    Ok(report)
}

pub fn separate(a: &SeparateArgs) -> CliResult<Report> {
    let mut report = Report::new(config_of(a));
    if a.list {
        for lemma in lemmas::REGISTRY {
            report.push(info(format!("lemma/{}", lemma.name), lemma.summary));
        }
        return Ok(report);
    }
    let name = a.lemma.as_deref().unwrap_or_default();
    let Some(lemma) = lemmas::find(name) else {
        let known: Vec<&str> = lemmas::REGISTRY.iter().map(|l| l.name).collect();
        return usage(format!("unknown lemma {name:?}; known: {}", known.join(", ")));
    };
    let params = lemma.resolve(a)?;
    report.config = serde_json::json!({ "lemma": lemma.name, "params": params, "seeds": a.seeds });
    for e in fan_out(a.seed, a.seeds, |seed| (lemma.run)(&params, seed))? {
        report.push(e);
    }
    Ok(report)
}

pub fn poset(a: &PosetArgs) -> CliResult<Report> {
    let poset = build_property_poset(a.k)?;
    if let Some(path) = &a.dot {
        fs::write(path, export_dot(&poset))?;
    }
    if let Some(path) = &a.poset_json {
        fs::write(path, serde_json::to_string_pretty(&poset.to_json()).expect("plain JSON"))?;
    }
    let mut report = Report::new(config_of(a));
    report.push(info("poset/nodes", poset.nodes().len()));
    report.push(info("poset/classes", poset.class_count()));
    report.push(info("poset/hasse_edges", poset.hasse_edges().len()));
    Ok(report)
}

pub fn verify(a: &VerifyArgs) -> CliResult<Report> {
    if a.trials == 0 {
        return usage("--trials must be positive");
    }
    let mut report = Report::new(config_of(a));
    let run = |suite: Suite| -> CliResult<_> {
        Ok(match suite {
            Suite::Partite => partite_suite(a.trials, a.n, a.seed)?,
            Suite::Cdells => cdells_suite(a.trials, a.n, a.seed)?,
            _ => appendix_suite(a.trials, a.n, a.seed, a.convention.into())?,
        })
    };
    let suites = match a.suite {
        Suite::All => vec![Suite::Partite, Suite::Cdells, Suite::Appendix],
        s => vec![s],
    };
    for s in suites {
        let summary = run(s)?;
        for e in summary.entries() {
            report.push(e);
        }
        for (check, tally) in &summary.checks {
            if let Some(f) = &tally.first_failure {
                report.push(info(format!("{}/{check}/first_failure", summary.suite), f));
            }
        }
    }
    Ok(report)
}

pub fn census(a: &CensusArgs) -> CliResult<Report> {
    let c = &a.construction;
    let filter = a.filter.unwrap_or(match c.construction {
        Kind::A => CensusFilter::ADistinct,
        Kind::B => CensusFilter::BPairLast,
        Kind::D => CensusFilter::DHeadSingles,
    });
    let level = a.level.unwrap_or(if c.construction == Kind::A { c.l + 1 } else { 2 });
    let entries = fan_out(c.seed, a.seeds, |seed| {
        let handle = build(c, seed)?;
        let mode = match a.samples {
            Some(count) => CensusMode::Sampled { count, seed },
            None => CensusMode::Exhaustive,
        };
        let r = octahedron_parity_census(&handle, level, filter, mode)?;
        let mut out = vec![
            info("census/examined", r.examined),
            info("census/even", r.even),
            ReportEntry::new("census/odd", r.odd.into(), 0.into(), 0.into(), r.pass()),
        ];
        if let Some(spec) = &r.first_odd {
            out.push(info("census/first_odd", spec));
        }
        Ok(out)
    })?;
    let mut report = Report::new(config_of(a));
    for e in entries {
        report.push(e);
    }
    Ok(report)
}

/// `x` as a `"a/b"` string next to its float value.
pub fn exact_pair(x: &Exact) -> Value {
    serde_json::json!({ "exact": exact_value(x), "approx": to_f64(x) })
}
