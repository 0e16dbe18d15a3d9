use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn cayley(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cayley"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn fixture(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("cayley-cli-{}-{name}", std::process::id()));
    fs::write(&path, contents).unwrap();
    path
}

const TWO_CYCLE: &str = "2\n1 1 x_1_1\n1 2 x_1_2\n2 1 x_2_1\n2 2 x_2_2\n";

#[test]
fn cperm_two_cycle_has_two_unit_terms() {
    let g = fixture("g.txt", TWO_CYCLE);
    let report = stdout_json(&cayley(&["cperm", "--graph", g.to_str().unwrap()]));
    assert_eq!(report["terms"], 2);
    let poly = report["polynomial"].as_array().unwrap();
    assert_eq!(poly.len(), 2);
    assert_eq!(poly[0]["word"], serde_json::json!(["x_1_1", "x_2_2"]));
    assert_eq!(poly[1]["word"], serde_json::json!(["x_1_2", "x_2_1"]));
    for term in poly {
        assert_eq!(term["coeff"], "1");
    }
}

#[test]
fn cdet_two_cycle_negates_the_swap() {
    let g = fixture("gd.txt", TWO_CYCLE);
    let report = stdout_json(&cayley(&["cdet", "--graph", g.to_str().unwrap()]));
    let poly = report["polynomial"].as_array().unwrap();
    assert_eq!(poly[0]["coeff"], "1");
    assert_eq!(poly[1]["coeff"], "-1");
}

#[test]
fn satcount_or_clause_has_three_models() {
    let f = fixture("f.cnf", "p cnf 2 1\n1 2 0\n");
    let report = stdout_json(&cayley(&["satcount", "--cnf", f.to_str().unwrap()]));
    assert_eq!(report["count"], 3);
    assert_eq!(report["variables"], 2);
}

#[test]
fn nisan_single_transposition_profile() {
    let report = stdout_json(&cayley(&["nisan", "--involution", "2 1"]));
    assert_eq!(report["B"], 4);
    assert_eq!(report["ranks"], serde_json::json!([1, 2, 1]));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let g = fixture("gr.txt", TWO_CYCLE);
    let args = ["cperm", "--graph", g.to_str().unwrap()];
    assert_eq!(cayley(&args).stdout, cayley(&args).stdout);

    let seeded = [
        "involution-experiment",
        "--n",
        "12",
        "--samples",
        "20",
        "--seed",
        "7",
    ];
    let first = cayley(&seeded);
    assert!(first.status.success());
    assert_eq!(first.stdout, cayley(&seeded).stdout);
}

#[test]
fn build_then_expand_recovers_the_permanent() {
    let g = fixture("gp.txt", TWO_CYCLE);
    let built = stdout_json(&cayley(&["abp-build", "--graph", g.to_str().unwrap()]));
    let prog = fixture("prog.json", &built["abp"].to_string());
    let expanded = stdout_json(&cayley(&["abp-expand", "--abp", prog.to_str().unwrap()]));
    let direct = stdout_json(&cayley(&["cperm", "--graph", g.to_str().unwrap()]));
    assert_eq!(expanded["polynomial"], direct["polynomial"]);
}

#[test]
fn expsum_eliminates_certified_variables() {
    let abp = fixture(
        "sum.json",
        r#"{"layers": [[0], [1], [2]],
            "edges": [{"from": 0, "to": 1, "coeff": "1", "var": "y1"},
                      {"from": 0, "to": 1, "coeff": "1", "var": null},
                      {"from": 1, "to": 2, "coeff": "1", "var": "x1"}],
            "source": 0, "sink": 2}"#,
    );
    let cert = fixture("cert.json", r#"{"cuts": [1], "block_vars": ["y1"]}"#);
    let report = stdout_json(&cayley(&[
        "abp-expsum",
        "--abp",
        abp.to_str().unwrap(),
        "--cert",
        cert.to_str().unwrap(),
    ]));
    // (y1 + 1) x1 summed over y1 in {0, 1} is 3 x1.
    let summed = fixture("summed.json", &report["abp"].to_string());
    let expanded = stdout_json(&cayley(&["abp-expand", "--abp", summed.to_str().unwrap()]));
    let poly = expanded["polynomial"].as_array().unwrap();
    assert_eq!(poly.len(), 1);
    assert_eq!(poly[0]["coeff"], "3");
    assert_eq!(poly[0]["word"], serde_json::json!(["x1"]));
}

#[test]
fn unknown_flags_and_bad_inputs_exit_nonzero() {
    assert!(!cayley(&["cperm", "--bogus"]).status.success());
    assert!(!cayley(&["cperm", "--graph", "/nonexistent/g.txt"]).status.success());

    let bad = fixture("bad.txt", "2\n1 1\n");
    let out = cayley(&["cperm", "--graph", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    let message = String::from_utf8_lossy(&out.stderr);
    assert!(message.contains("bad.txt"), "error names the file: {message}");
}

#[test]
fn failed_verdict_exits_nonzero_with_report() {
    // A mismatched check still prints its JSON report but signals failure.
    let out = cayley(&["sym-check", "--mode", "hadamard", "--n", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["equal"], true);
}

#[test]
fn selftests_pass_for_fast_verbs() {
    for verb in ["nisan", "near", "hard-involution", "cut", "satcount"] {
        let out = cayley(&[verb, "--selftest"]);
        assert!(
            out.status.success(),
            "{verb} selftest failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert_eq!(stdout_json(&out)["ok"], true);
    }
}

// (x1 + x2) * x1 + 1/2, so the polynomial is x1 x1 + x2 x1 + 1/2.
const SMALL_CIRCUIT: &str = r#"{"gates": [
    {"id": 0, "kind": "var", "var": "x1"},
    {"id": 1, "kind": "var", "var": "x2"},
    {"id": 2, "kind": "add", "left": 0, "right": 1},
    {"id": 3, "kind": "mul", "left": 2, "right": 0},
    {"id": 4, "kind": "const", "value": "1/2"},
    {"id": 5, "kind": "add", "left": 3, "right": 4}
], "output": 5}"#;

#[test]
fn mcoeff_extracts_word_coefficients() {
    let c = fixture("c.json", SMALL_CIRCUIT);
    let path = c.to_str().unwrap();
    for (word, coeff) in [("x1 x1", "1"), ("x2 x1", "1"), ("x1 x2", "0"), ("", "1/2")] {
        let report = stdout_json(&cayley(&["mcoeff", "--circuit", path, "--word", word]));
        assert_eq!(report["coefficient"], coeff, "word {word:?}");
    }
}

#[test]
fn pcoeff_quotients_by_a_prefix() {
    let c = fixture("cq.json", SMALL_CIRCUIT);
    let report = stdout_json(&cayley(&[
        "pcoeff",
        "--circuit",
        c.to_str().unwrap(),
        "--word",
        "x2",
    ]));
    let poly = report["polynomial"].as_array().unwrap();
    assert_eq!(poly.len(), 1);
    assert_eq!(poly[0]["word"], serde_json::json!(["x1"]));
}

#[test]
fn pc_check_accepts_the_fixture_circuit() {
    let c = fixture("cg.json", SMALL_CIRCUIT);
    let report = stdout_json(&cayley(&["pc-check", "--circuit", c.to_str().unwrap()]));
    assert_eq!(report["equal"], true);
}
