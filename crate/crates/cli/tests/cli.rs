//! The `hclosed` binary: documented examples, exit codes and JSON reports.

use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).to_string_lossy().into_owned()
}

fn hclosed(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_hclosed")).args(args).output().unwrap();
    (String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap(), out.status.code().unwrap())
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let (out, _, code) = hclosed(&all);
    (serde_json::from_str(&out).unwrap(), code)
}

#[test]
fn hausdorff_check_reports_witness() {
    let f = fixture("finite.pt");
    let (out, _, code) = hclosed(&["check", "hausdorff", "-f", &f, "--space", "Q3"]);
    assert_eq!(code, 1);
    assert_eq!(out, "false\nwitness: (1, 2)\n");
    let (v, code) = json(&["check", "hausdorff", "-f", &f, "--space", "Q3"]);
    assert_eq!(code, 1);
    assert_eq!(v["result"], Value::Bool(false));
    assert_eq!(v["witness"], serde_json::json!(["1", "2"]));
}

#[test]
fn finite_adherence() {
    let f = fixture("finite.pt");
    let (out, _, code) = hclosed(&["compute", "adh", "-f", &f, "--space", "Q3", "--set", "{3}"]);
    assert_eq!((out.as_str(), code), ("{2 3}\n", 0));
    // named sets resolve inside literals
    let (out, _, _) = hclosed(&["compute", "adh", "-f", &f, "--space", "Q3", "--set", "LOW"]);
    assert_eq!(out, "{1 2}\n");
    let (out, _, _) = hclosed(&["compute", "adh", "-f", &f, "--space", "Q3", "--set", "TOP", "--iterations", "2"]);
    assert_eq!(out, "{1 2 3}\n");
}

#[test]
fn urysohn_theta_closure_twice() {
    let (out, _, code) = hclosed(&["builtin", "urysohn", "--compute", "cl-theta", "--set", "grid(G; cols>0)", "--iterations", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out, "atom(pinf) | atom(minf) | grid(G; cols=0..)\n");
    let (out, _, _) = hclosed(&["compute", "cl-theta", "-f", &fixture("urysohn.pt"), "--space", "U", "--set", "B"]);
    assert_eq!(out, "atom(pinf) | grid(G; cols=0..)\n");
}

#[test]
fn h_closed_but_not_compact() {
    let f = fixture("urysohn.pt");
    assert_eq!(hclosed(&["check", "h-closed", "-f", &f, "--space", "U"]).2, 0);
    let (out, _, code) = hclosed(&["check", "compact", "-f", &f, "--space", "U"]);
    assert_eq!(code, 1);
    assert!(out.contains("(row +end, col 0)"), "{out}");
    assert_eq!(hclosed(&["check", "h-set", "-f", &f, "--space", "U", "--set", "A"]).2, 0);
}

#[test]
fn map_checks() {
    let f = fixture("finite.pt");
    assert_eq!(hclosed(&["map", "continuous", "-f", &f, "--map", "f"]).2, 0);
    for m in ["definition", "adh-inequality", "a-and-b"] {
        assert_eq!(hclosed(&["map", "perfect", "-f", &f, "--map", "f", "--method", m]).2, 1, "{m}");
    }
    let (out, _, _) = hclosed(&["map", "image", "-f", &f, "--map", "g", "--set", "{2 3}"]);
    assert_eq!(out, "{1 2}\n");
}

#[test]
fn constructions_print_models() {
    let f = fixture("finite.pt");
    let (out, _, code) = hclosed(&["construct", "regularize", "-f", &f, "--space", "Q3"]);
    assert_eq!(code, 0);
    let doc = hclosed_cli::parse_model(&out).unwrap();
    let m = hclosed_cli::Model::resolve(&doc).unwrap();
    let x = m.finite("Q3_r", Default::default()).unwrap();
    assert_eq!(x.to_string(), "M(1)={1 2}, M(2)={1 2 3}, M(3)={2 3}");
    // the constant map witnesses Y# <= Y on {x, p, q}
    let (out, _, code) = hclosed(&["construct", "projective", "-f", &f, "--space", "E2", "--space", "E2"]);
    assert_eq!(code, 0, "{out}");
    let (out, _, code) = hclosed(&["construct", "kappa", "-f", &fixture("urysohn.pt"), "--space", "R2"]);
    assert_eq!(code, 0);
    assert!(out.contains("compact: true"), "{out}");
}

#[test]
fn exit_codes() {
    let (_, err, code) = hclosed(&["validate", "-f", &fixture("bad_syntax.pt")]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2, column 12"), "{err}");
    let (_, err, code) = hclosed(&["validate", "-f", &fixture("bad_axiom.pt")]);
    assert_eq!(code, 3);
    assert!(err.contains("line 3, column 5") && err.contains("axiom"), "{err}");
    assert_eq!(hclosed(&["validate", "-f", &fixture("dangling.pt")]).2, 3);
    assert_eq!(hclosed(&["check", "hausdorff", "-f", &fixture("finite.pt"), "--space", "NOPE"]).2, 3);
    assert_eq!(hclosed(&["compute", "adh", "-f", &fixture("finite.pt"), "--space", "Q3", "--set", "{9}"]).2, 2);
    assert_eq!(hclosed(&["compute", "adh", "-f", &fixture("finite.pt"), "--space", "Q3", "--set", "{1"]).2, 2);
    assert_eq!(hclosed(&["check", "bogus", "-f", &fixture("finite.pt"), "--space", "Q3"]).2, 2);
    assert_eq!(hclosed(&["validate", "-f", "/nonexistent/model.pt"]).2, 2);
    assert_eq!(hclosed(&["oracle", "--max-points", "5"]).2, 4);
    assert_eq!(hclosed(&["validate", "-f", &fixture("finite.pt")]).2, 0);
}

#[test]
fn json_reports_are_stable() {
    let f = fixture("finite.pt");
    let args = ["map", "strongly-irreducible", "-f", &f, "--map", "g"];
    let strip = |args: &[&str]| {
        let (mut v, code) = json(args);
        v["elapsed_ms"] = Value::Null;
        (serde_json::to_string(&v).unwrap(), code)
    };
    let (a, code) = strip(&args);
    assert_eq!(code, 1);
    assert_eq!(strip(&args).0, a);
    let (raw, _, _) = hclosed(&["--json", "map", "strongly-irreducible", "-f", &f, "--map", "g"]);
    let keys = ["\"result\"", "\"witness\"", "\"elapsed_ms\"", "\"provenance\""];
    let pos: Vec<usize> = keys.iter().map(|k| raw.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{raw}");
}

#[test]
fn oracle_command() {
    let (v, code) = json(&["oracle", "--max-points", "2", "--suite", "continuity-5way", "--workers", "2"]);
    assert_eq!(code, 0);
    let s = &v["result"]["suites"][0];
    // five pretopologies on at most two points, every pair of them
    assert_eq!(s["exhaustive_instances"], 25);
    let sizes = [1u64, 2, 2, 2, 2];
    let maps: u64 = sizes.iter().flat_map(|&a| sizes.iter().map(move |&b| b.pow(a as u32))).sum();
    assert_eq!(s["checks"], maps);
    let run = |w: &str| {
        let (mut v, _) = json(&["oracle", "--max-points", "4", "--seed", "9", "--workers", w, "--suite", "phc-4way"]);
        v["elapsed_ms"] = Value::Null;
        v
    };
    assert_eq!(run("1"), run("3"));
}
