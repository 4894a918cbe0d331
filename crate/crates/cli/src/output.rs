use std::fs;

use hqr_core::report::Report;

use crate::args::OutputArgs;
use crate::CliResult;

/// Writes the report where asked and prints it; returns whether every
/// check passed.
pub fn emit(report: &Report, out: &OutputArgs) -> CliResult<bool> {
    if let Some(path) = &out.report {
        fs::write(path, report.to_json())?;
        fs::write(path.with_extension("csv"), report.to_csv()?)?;
    }
    if out.json {
        println!("{}", report.to_json());
    } else {
        for r in &report.results {
            let status = match (r.pass, r.expected.is_null()) {
                (false, _) => "FAIL",
                (true, true) => "INFO",
                (true, false) => "PASS",
            };
            println!("{status} {} value={} expected={} tolerance={}", r.name, r.value, r.expected, r.tolerance);
        }
        let failed: Vec<&str> = report.failures().map(|r| r.name.as_str()).collect();
        if failed.is_empty() {
            println!("all {} checks passed", report.results.len());
        } else {
            println!("{} of {} checks failed: {}", failed.len(), report.results.len(), failed.join(", "));
        }
    }
    Ok(report.all_pass())
}
