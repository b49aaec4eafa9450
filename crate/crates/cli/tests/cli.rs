use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stoqwalk")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_reports_terms() {
    let out = run(&["check", "--instance", path(&data("plus.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["subcommand"], "check");
    assert_eq!(r["results"]["stoquastic"], true);
    assert_eq!(r["results"]["terms"][0]["half_integral_projector"], true);
    assert_eq!(r["input_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn check_flags_non_stoquastic_input() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    std::fs::write(&f, r#"{"n": 1, "terms": [{"support": [0], "matrix": [[1, 1], [1, 1]]}]}"#).unwrap();
    let out = run(&["check", "--instance", path(&f)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["results"]["stoquastic"], false);
}

#[test]
fn malformed_input_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    std::fs::write(&f, r#"{"n": 1, "terms": [{"support": [0], "matrix": [[1, 2], [0, 1]]}]}"#).unwrap();
    let out = run(&["oracle", "--instance", path(&f)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("terms[0].matrix"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["check", "--instance", "x", "--nope"]).status.code(), Some(2));
    assert_eq!(run(&["verify"]).status.code(), Some(2));
}

#[test]
fn soundness_on_the_one_qubit_no_instance() {
    let out = run(&["verify", "--instance", path(&data("no1.json")), "--witness", "1", "--seeds", "30000", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let rate = r["results"]["accept_rate"].as_f64().unwrap();
    let bound = r["results"]["soundness_bound"].as_f64().unwrap();
    assert!(rate <= bound, "{rate} > {bound}");
}

#[test]
fn seeded_runs_replay_exactly() {
    let f = data("plus.json");
    let args = ["walk", "--instance", path(&f), "--start", "0", "--steps", "20", "--trials", "200", "--seed", "9"];
    let (a, b) = (report(&run(&args)), report(&run(&args)));
    assert_eq!(a["results"], b["results"]);
    assert_eq!(a["input_digest"], b["input_digest"]);
    assert_eq!(a["seeds"][0], 9);
}

#[test]
fn missing_seed_is_generated_and_printed() {
    let out = run(&["walk", "--instance", path(&data("plus.json")), "--start", "0", "--steps", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let seed = report(&out)["seeds"][0].as_u64().unwrap();
    assert!(String::from_utf8_lossy(&out.stderr).contains(&seed.to_string()));
}

#[test]
fn walk_histogram_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("h.csv");
    let out = run(&[
        "walk", "--instance", path(&data("plus.json")), "--start", "0", "--steps", "10", "--trials", "1000", "--seed", "1",
        "--histogram", path(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("bitstring,count,frequency"));
    let total: u64 = lines.map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 1000);
}

#[test]
fn compile_then_prove_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("and.json");
    let out = run(&["compile", "--circuit", path(&data("and-circuit.json")), "--out", path(&inst)]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["certain_witnesses"][0], "11");
    assert!(r["results"]["max_locality"].as_u64().unwrap() <= 6);

    let out = run(&["prove", "--instance", path(&inst), "--report", path(&dir.path().join("p.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let w = String::from_utf8(out.stdout).unwrap().trim().to_string();
    let out = run(&["verify", "--instance", path(&inst), "--witness", &w, "--seeds", "500", "--seed", "2"]);
    assert_eq!(report(&out)["results"]["accept_rate"], 1.0);

    let out = run(&["graph", "--instance", path(&inst), "--witness", &w]);
    assert_eq!(report(&out)["results"]["result"], "all_good");
}

#[test]
fn transcripts_are_written_one_per_line() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.jsonl");
    let out = run(&[
        "verify", "--instance", path(&data("plus.json")), "--witness", "0", "--seeds", "7", "--seed", "4",
        "--transcripts", path(&t),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&t).unwrap();
    assert_eq!(text.lines().count(), 7);
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["verdict"], "yes");
    }
}

#[test]
fn prove_refuses_no_instances() {
    assert_eq!(run(&["prove", "--instance", path(&data("no1.json"))]).status.code(), Some(1));
}

#[test]
fn gibbs_and_anneal() {
    let out = run(&["gibbs", "--classical", path(&data("ising4.json")), "--beta", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"]["hamiltonian"]["terms"].as_array().unwrap().len(), 4);

    let out = run(&[
        "anneal", "--path", path(&data("ising4-path.json")), "--delta", "0.1", "--seed", "3", "--runs", "1",
        "--oracle", "on", "--stages", "16", "--steps", "400",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["parameters"]["schedule"]["t"], 16);
    assert_eq!(r["results"]["diagnostics"]["records"].as_array().unwrap().len(), 17);
}
