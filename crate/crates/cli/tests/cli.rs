use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

use hs_exterior::traces::trace_tensor_via_hs;
use hs_exterior::wire::{InputDocument, TensorJson};
use hs_exterior::{EndoTuple, Rational};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn hsx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hsx"))
        .args(args)
        .output()
        .expect("spawn hsx")
}

fn hsx_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hsx"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn hsx");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn entry<'a>(doc: &'a Value, index: &[u64]) -> &'a Value {
    doc["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["index"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).eq(index.iter().copied()))
        .map(|e| &e["value"])
        .unwrap_or_else(|| panic!("no entry {index:?}"))
}

#[test]
fn traces_of_plane_pair() {
    let out = hsx(&["traces", "--input", &fixture("pair.json"), "--oracle"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["n"], 2);
    assert_eq!(doc["seed"], 7);
    assert_eq!(entry(&doc, &[0, 0]), "1");
    assert_eq!(entry(&doc, &[1, 0]), "5");
    assert_eq!(entry(&doc, &[0, 1]), "9");
    assert_eq!(entry(&doc, &[2, 0]), "-2");
    assert_eq!(entry(&doc, &[0, 2]), "-57");
    // det(C1(A), C2(B)) + det(C1(B), C2(A)) = -4 - 22
    assert_eq!(entry(&doc, &[1, 1]), "-26");
    assert_eq!(doc["oracle"]["checked"], 6);
    assert_eq!(doc["oracle"]["mismatches"].as_array().unwrap().len(), 0);
    let order: Vec<Value> = doc["entries"].as_array().unwrap().iter().map(|e| e["index"].clone()).collect();
    assert_eq!(order, serde_json::from_str::<Vec<Value>>("[[0,0],[1,0],[0,1],[2,0],[1,1],[0,2]]").unwrap());
}

#[test]
fn traces_table_lists_identity_triple() {
    let out = hsx(&["traces", "--input", &fixture("identity_triple.json"), "--output", "table"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("tau(1,1,1) = 6"), "{text}");
    assert!(text.contains("tau(0,0,0) = 1"));
    assert_eq!(text.lines().filter(|l| l.starts_with("tau")).count(), 20);
}

#[test]
fn traces_round_trip() {
    let mut rng = hs_exterior::random::trial_rng(99, 0);
    let tuple: EndoTuple<Rational> = hs_exterior::random::tuple(&mut rng, 3, 3);
    let doc = InputDocument::from_matrices(3, tuple.maps(), Some(99));
    let mut file = tempfile::NamedTempFile::new().unwrap();
    serde_json::to_writer(&mut file, &doc).unwrap();
    let out = hsx(&["traces", "--input", file.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let parsed: TensorJson = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed.to_tensor::<Rational>().unwrap(), trace_tensor_via_hs(&tuple).unwrap());
}

#[test]
fn seeded_output_is_reproducible() {
    let a = hsx(&["traces", "--n", "3", "--seed", "42"]);
    let b = hsx(&["traces", "--n", "3", "--seed", "42"]);
    let c = hsx(&["traces", "--n", "3", "--seed", "43"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn verify_generalized_ch_on_random_triple() {
    let out = hsx(&["verify", "thm48", "--n", "3", "--seed", "5"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["identity"], "thm48");
    assert_eq!(r["is_zero"], true);
    assert_eq!(r["seed"], 5);
    assert_eq!(r["mode"], "rational");
    assert_eq!(r["residual"], serde_json::json!([["0", "0", "0"], ["0", "0", "0"], ["0", "0", "0"]]));
}

#[test]
fn verify_classical_on_4x4() {
    let out = hsx(&["verify", "classical-ch", "--input", &fixture("single_4x4.json")]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["n"], 4);
}

#[test]
fn corrupted_delta_is_detected() {
    let clean = hsx(&["verify", "star3", "--input", &fixture("star3_clean.json")]);
    assert_eq!(code(&clean), 0);
    let out = hsx(&["verify", "star3", "--input", &fixture("star3_corrupted_delta.json")]);
    assert_eq!(code(&out), 1);
    let r = json(&out);
    assert_eq!(r["is_zero"], false);
    assert_eq!(r["seed"], 11);
}

#[test]
fn every_identity_verifies_on_generated_input() {
    for id in ["thm48", "star2", "star3", "eq17", "ibp", "conjugacy", "trsq", "classical-ch"] {
        let out = hsx(&["verify", id, "--seed", "8"]);
        assert_eq!(code(&out), 0, "{id}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)["identity"], id);
    }
}

#[test]
fn stdin_input_and_explicit_extras() {
    let text = std::fs::read_to_string(fixture("ibp_elements.json")).unwrap();
    let out = hsx_stdin(&["verify", "ibp", "--input", "-"], &text);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = hsx_stdin(&["verify", "thm48", "--input", "-", "--output", "table"], &text);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout).unwrap().contains("result: zero"));
}

#[test]
fn float_mode_reports_error_size() {
    let out = hsx(&["verify", "thm48", "--input", &fixture("float_quadruple.json")]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["mode"], "float");
    assert!(r["max_abs"].as_f64().unwrap() >= 0.0);
    let strict = hsx(&["verify", "thm48", "--input", &fixture("float_quadruple.json"), "--tol", "0"]);
    assert_eq!(code(&strict), 1);
}

#[test]
fn oracle_mismatch_exit_code() {
    let ok = hsx(&["traces", "--input", &fixture("float_quadruple.json"), "--oracle"]);
    assert_eq!(code(&ok), 0);
    let out = hsx(&["traces", "--input", &fixture("float_quadruple.json"), "--oracle", "--tol", "0"]);
    assert_eq!(code(&out), 4);
    assert!(!json(&out)["oracle"]["mismatches"].as_array().unwrap().is_empty());
}

#[test]
fn parse_errors_exit_2() {
    assert_eq!(code(&hsx(&["verify", "jacobi"])), 2);
    assert_eq!(code(&hsx(&["verify", "thm48", "--input", &fixture("bad_scalar.json")])), 2);
    assert_eq!(code(&hsx(&["traces", "--input", &fixture("zero_denominator.json")])), 2);
    assert_eq!(code(&hsx_stdin(&["traces", "--input", "-"], "{not json")), 2);
    assert_eq!(code(&hsx(&["traces", "--input", "/nonexistent/input.json"])), 2);
    assert_eq!(code(&hsx(&["traces", "--mode", "complex"])), 2);
    assert_eq!(code(&hsx(&["verify", "thm48", "--tol", "-1"])), 2);
    assert_eq!(code(&hsx(&["verify", "conjugacy", "--input", &fixture("singular_conjugator.json")])), 2);
    assert_eq!(code(&hsx(&["verify", "thm48", "--input", &fixture("star3_corrupted_delta.json")])), 2);
}

#[test]
fn dimension_errors_exit_3() {
    assert_eq!(code(&hsx(&["verify", "thm48", "--input", &fixture("wrong_count.json")])), 3);
    assert_eq!(code(&hsx(&["traces", "--input", &fixture("ragged.json")])), 3);
    assert_eq!(code(&hsx(&["verify", "star2", "--input", &fixture("identity_triple.json")])), 3);
    assert_eq!(code(&hsx(&["verify", "star3", "--n", "2"])), 3);
    assert_eq!(code(&hsx(&["traces", "--input", &fixture("pair.json"), "--n", "3"])), 3);
    assert_eq!(code(&hsx(&["random-suite", "--n", "7", "--trials", "1"])), 3);
}

#[test]
fn suite_plane_hundred_trials() {
    let out = hsx(&["random-suite", "--n", "2", "--trials", "100", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let s = json(&out);
    assert_eq!(s["all_passed"], true);
    assert_eq!(s["completed_trials"], 100);
    let names: Vec<&str> = s["checks"].as_array().unwrap().iter().map(|c| c["identity"].as_str().unwrap()).collect();
    assert_eq!(names, ["thm48", "oracle", "conjugacy", "ibp", "classical-ch", "star2", "trsq"]);
    for c in s["checks"].as_array().unwrap() {
        assert_eq!(c["passed"], 100);
        assert_eq!(c["failed"], 0);
    }
    let again = json(&hsx(&["random-suite", "--n", "2", "--trials", "100", "--seed", "1"]));
    assert_eq!(again["checks"], s["checks"]);
}

#[test]
fn suite_line_is_classical_only() {
    let out = hsx(&["random-suite", "--n", "1", "--trials", "10", "--output", "table"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("classical-ch   10/10"), "{text}");
    assert!(!text.contains("thm48"));
}

#[test]
fn suite_space_includes_trilinear_checks() {
    let s = json(&hsx(&["random-suite", "--n", "3", "--trials", "4", "--seed", "2"]));
    assert_eq!(s["all_passed"], true);
    let names: Vec<&str> = s["checks"].as_array().unwrap().iter().map(|c| c["identity"].as_str().unwrap()).collect();
    assert!(names.contains(&"star3") && names.contains(&"eq17"));
}

#[test]
fn suite_budget_exceeded_exit_5() {
    assert_eq!(code(&hsx(&["random-suite", "--n", "2", "--trials", "5", "--time-budget", "0"])), 5);
    assert_eq!(code(&hsx(&["random-suite", "--n", "2", "--trials", "1", "--memory-budget-mb", "0"])), 5);
}

#[test]
fn suite_requires_n() {
    assert_eq!(code(&hsx(&["random-suite", "--trials", "1"])), 2);
    assert_eq!(code(&hsx(&["random-suite", "--n", "2", "--trials", "0"])), 2);
}
