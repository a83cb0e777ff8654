//! End-to-end tests of the command-line binary: output shapes, exit codes,
//! and determinism of the full verification sweep.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_gl2rep");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .output()
        .expect("binary launches")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).expect("stdout parses as JSON")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process exits normally")
}

fn temp_path(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!("gl2rep-test-{}-{tag}.json", std::process::id()))
}

#[test]
fn proorder_output_is_frozen() {
    let out = run(&["proorder", "--n", "2", "--p", "3"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout(&out), "2^4 * 3^inf\n");
}

#[test]
fn decmatrix_at_a_good_prime_is_a_permutation() {
    let out = run(&["decmatrix", "--q", "5", "--mod", "7"]);
    assert_eq!(exit_code(&out), 0);
    let v = json(&out);
    assert_eq!(v["q"], 5);
    assert_eq!(v["ell"], 7);
    assert_eq!(v["permutation"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 24);
    assert_eq!(v["cols"].as_array().unwrap().len(), 24);
}

#[test]
fn verify_single_lemma_reports_every_assertion() {
    let out = run(&["verify", "--lemma", "4.1", "--p", "5"]);
    assert_eq!(exit_code(&out), 0);
    let v = json(&out);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["lemma_id"], "4.1");
    assert_eq!(v["parameters"]["p"], "5");
    // 16 exponent pairs with a factor check each, plus a non-splitness
    // check for the 12 pairs with distinct exponents
    assert_eq!(v["details"].as_array().unwrap().len(), 28);
}

#[test]
fn verify_skips_when_the_hypothesis_fails() {
    let out = run(&["verify", "--lemma", "3.2a", "--q", "7", "--mod", "3"]);
    assert_eq!(exit_code(&out), 0);
    let v = json(&out);
    assert_eq!(v["status"], "skipped");
    assert_eq!(v["reason"], "hypothesis l | q + 1 fails");
}

#[test]
fn verify_rejects_unknown_lemma_ids() {
    let out = run(&["verify", "--lemma", "bogus"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("unknown lemma"));
}

#[test]
fn verify_all_rejects_extra_parameters() {
    let out = run(&["verify", "--lemma", "all", "--p", "5"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("--max-p"));
}

#[test]
fn verify_all_passes_and_is_byte_identical_across_runs() {
    let a = temp_path("all7-a");
    let b = temp_path("all7-b");
    for path in [&a, &b] {
        let out = run(&[
            "verify",
            "--lemma",
            "all",
            "--max-p",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0);
        assert_eq!(stdout(&out), "");
    }
    let ba = std::fs::read(&a).unwrap();
    let bb = std::fs::read(&b).unwrap();
    assert!(!ba.is_empty());
    assert_eq!(ba, bb, "verification sweep output differs between runs");
    let v: Value = serde_json::from_slice(&ba).unwrap();
    let reports = v["reports"].as_array().unwrap();
    assert!(reports.len() >= 50);
    for r in reports {
        assert_eq!(r["status"], "pass", "lemma {} fails", r["lemma_id"]);
    }
    let _ = std::fs::remove_file(&a);
    let _ = std::fs::remove_file(&b);
}

#[test]
fn chartable_formats_parse_and_are_deterministic() {
    let j1 = run(&["chartable", "--q", "3", "--format", "json"]);
    let j2 = run(&["chartable", "--q", "3", "--format", "json"]);
    assert_eq!(exit_code(&j1), 0);
    assert_eq!(stdout(&j1), stdout(&j2));
    let v = json(&j1);
    assert_eq!(v["q"], 3);
    assert_eq!(v["classes"].as_array().unwrap().len(), 8);
    assert_eq!(v["rows"].as_array().unwrap().len(), 8);
    let csv = run(&["chartable", "--q", "3", "--format", "csv"]);
    assert_eq!(exit_code(&csv), 0);
    assert_eq!(stdout(&csv).lines().count(), 9); // header plus q^2-1 rows
    let table = run(&["chartable", "--q", "3"]);
    assert_eq!(exit_code(&table), 0);
    assert!(stdout(&table).contains("St(0)"));
}

#[test]
fn decompose_reports_the_steinberg_splitting() {
    let out = run(&["decompose", "--q", "5", "--mod", "2", "--rep", "St(0)"]);
    assert_eq!(exit_code(&out), 0);
    let v = json(&out);
    assert_eq!(v["rep"], "St(0)");
    assert_eq!(v["degree"], 5);
    // 2 divides q+1, so the Steinberg row splits into two constituents
    let cons = v["constituents"].as_array().unwrap();
    assert_eq!(cons.len(), 2);
    for c in cons {
        assert_eq!(c["multiplicity"], 1);
    }
}

#[test]
fn decompose_rejects_unknown_row_labels() {
    let out = run(&["decompose", "--q", "5", "--mod", "2", "--rep", "Nope(1)"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("no ordinary character"));
}

#[test]
fn classes_filter_keeps_exactly_the_regular_classes() {
    let all = run(&["classes", "--q", "5"]);
    assert_eq!(exit_code(&all), 0);
    let orders: Vec<u64> = stdout(&all)
        .lines()
        .skip(1)
        .map(|l| l.rsplit('\t').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(orders.len(), 24);
    let odd = orders.iter().filter(|&&o| o % 2 == 1).count();
    let filtered = run(&["classes", "--q", "5", "--mod", "2"]);
    assert_eq!(exit_code(&filtered), 0);
    let kept: Vec<u64> = stdout(&filtered)
        .lines()
        .skip(1)
        .map(|l| l.rsplit('\t').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(kept.len(), odd);
    assert!(kept.iter().all(|&o| o % 2 == 1));
}

#[test]
fn irreducibles_lists_twisted_tensor_labels() {
    let out = run(&["irreducibles", "--q", "4", "--mod", "2"]);
    assert_eq!(exit_code(&out), 0);
    let v = json(&out);
    let modules = v["modules"].as_array().unwrap();
    assert_eq!(modules.len(), 12);
    for m in modules {
        let label = m["label"].as_str().unwrap();
        assert!(label.starts_with("det^") && label.contains("*Sym("), "{label}");
    }
}

#[test]
fn cartan_weyl_evaluates_the_torus_character() {
    let out = run(&["cartan-weyl", "--lambda", "2,1", "--t", "2,3"]);
    assert_eq!(exit_code(&out), 0);
    let v = json(&out);
    assert_eq!(v["dimension"], 2);
    assert_eq!(v["value"]["conductor"], 1);
    // s_(2,1)(2,3) = 2*3*(2+3) = 30
    assert_eq!(v["value"]["coords"][0][0], 30);
    assert_eq!(v["value"]["coords"][0][1], 1);
}

#[test]
fn cartan_weyl_validates_its_inputs() {
    for args in [
        ["cartan-weyl", "--lambda", "1,2", "--t", "2,3"],  // not dominant
        ["cartan-weyl", "--lambda", "2,1", "--t", "2,2"],  // repeated point
        ["cartan-weyl", "--lambda", "2,1", "--t", "0,3"],  // non-invertible point
        ["cartan-weyl", "--lambda", "2,1", "--t", "2,3,4"], // length mismatch
    ] {
        let out = run(&args);
        assert_eq!(exit_code(&out), 2, "args {args:?}");
        assert!(stderr(&out).starts_with("error:"), "args {args:?}");
    }
}

#[test]
fn unwritable_output_path_exits_2() {
    let out = run(&[
        "classes",
        "--q",
        "3",
        "--out",
        "/nonexistent-dir/gl2rep-out.txt",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("cannot write"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(exit_code(&run(&["classes"])), 2); // missing --q
    assert_eq!(exit_code(&run(&["classes", "--q", "5", "--bogus"])), 2);
    assert_eq!(exit_code(&run(&["nonsense"])), 2);
}
