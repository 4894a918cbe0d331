use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hqr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hqr")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read_report(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn result<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == name)
        .unwrap_or_else(|| panic!("no result {name}"))
}

#[test]
fn b_fails_expand_reports_empty_witness() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("b.json");
    let out = hqr(&[
        "separate", "--lemma", "B-fails-expand", "--k", "3", "--pi", "2,1", "--p", "1/2", "--n", "60", "--seed", "7",
        "--report", report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let r = read_report(&report);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(result(&r, "failed/cross_edges")["value"], 0);
    assert_eq!(result(&r, "failed/defect_threshold")["pass"], true);
    let csv = fs::read_to_string(report.with_extension("csv")).unwrap();
    assert!(csv.starts_with("name,value,expected,tolerance,pass"), "{csv}");
    assert!(csv.contains("failed/cross_edges"));
}

#[test]
fn appendix_suite_passes() {
    let out = hqr(&["verify", "--suite", "appendix", "--n", "6", "--trials", "200"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("PASS appendix/subdev value=200"));
}

#[test]
fn literal_overcount_failure_exits_one_and_is_named() {
    let out = hqr(&["verify", "--suite", "cdells", "--n", "6", "--trials", "20", "--seed", "1"]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("FAIL cdells/overcount "), "{text}");
    assert!(text.contains("PASS cdells/overcount_weighted"), "{text}");
}

#[test]
fn poset_dot_has_every_hasse_edge() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("out.dot");
    let json = dir.path().join("poset.json");
    let out = hqr(&["poset", "--k", "6", "--dot", dot.to_str().unwrap(), "--poset-json", json.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert_eq!(text.matches(" -> ").count(), 29);
    assert!(text.contains("\"Dev(3)\" -> \"CD(2)\""));
    let v: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["edges"].as_array().unwrap().len(), 29);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["separate", "--lemma", "no-such-lemma"],
        vec!["separate", "--lemma", "B-fails-expand", "--k", "4", "--pi", "2,1"],
        vec!["separate", "--lemma", "D-fails-dev", "--p", "1/3"],
        vec!["sample", "--construction", "a", "--n", "10", "--p", "3/2", "--out", "/dev/null"],
        vec!["measure", "dev", "--input", "/nonexistent/h.txt", "--l", "1"],
        vec!["verify", "--suite", "bogus"],
        vec!["census", "--construction", "b", "--n", "8", "--filter", "a-distinct"],
    ] {
        let out = hqr(&args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn failed_bound_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.txt");
    assert_eq!(code(&hqr(&["sample", "--construction", "d", "--n", "9", "--out", h.to_str().unwrap()])), 0);
    let out = hqr(&["measure", "disc", "--input", h.to_str().unwrap(), "--max", "0"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAIL disc/normalized"));
}

#[test]
fn sampled_witnesses_round_trip_through_measure() {
    let dir = tempfile::tempdir().unwrap();
    let (h, w) = (dir.path().join("a.txt"), dir.path().join("g.txt"));
    let out = hqr(&[
        "sample", "--construction", "a", "--n", "20", "--seed", "5", "--out", h.to_str().unwrap(), "--witness",
        w.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report = dir.path().join("cd.json");
    let out = hqr(&[
        "measure", "cd", "--input", h.to_str().unwrap(), "--g", w.to_str().unwrap(), "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let r = read_report(&report);
    assert_eq!(result(&r, "cd/hits")["value"], result(&r, "cd/total")["value"]);

    let (hb, wb) = (dir.path().join("b.txt"), dir.path().join("s"));
    let out = hqr(&[
        "sample", "--construction", "b", "--n", "18", "--seed", "5", "--out", hb.to_str().unwrap(), "--witness",
        wb.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let f1 = format!("{}.1", wb.display());
    let f2 = format!("{}.2", wb.display());
    let out = hqr(&["--json", "measure", "expand", "--input", hb.to_str().unwrap(), "--family", &f1, "--family", &f2]);
    assert_eq!(code(&out), 0);
    let r: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(result(&r, "expand/count")["value"], 0);
}

#[test]
fn reports_are_deterministic_and_merged_in_seed_order() {
    let args = ["--json", "census", "--construction", "d", "--n", "9", "--seed", "3", "--seeds", "3"];
    let a = hqr(&args);
    let b = hqr(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    let r: Value = serde_json::from_str(&stdout(&a)).unwrap();
    let names: Vec<&str> = r["results"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    let odd: Vec<&str> = names.iter().copied().filter(|n| n.ends_with("census/odd")).collect();
    assert_eq!(odd, ["seed=3/census/odd", "seed=4/census/odd", "seed=5/census/odd"]);
}

#[test]
fn worker_count_comes_from_the_environment() {
    let run = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_hqr"))
            .env("HQR_WORKERS", workers)
            .args(["verify", "--suite", "partite", "--trials", "5"])
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("2")), 0);
    assert_eq!(code(&run("0")), 2);
    assert_eq!(code(&run("many")), 2);
}
