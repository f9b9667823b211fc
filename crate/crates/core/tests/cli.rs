use std::io::Write as _;
use std::process::{Command, Output};

use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planebundles"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn bundle_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn splitting_on_a_jumping_line() {
    let out = cli(&["--format", "json", "splitting", "--family", "en:3", "--line", "[0,1,0]"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["a"], 1);
    assert_eq!(v["b"], -2);
    assert_eq!(v["schema"], 1);
}

#[test]
fn exhaustive_scan_of_ex61() {
    let out = cli(&[
        "--format", "json", "scan", "--family", "ex61:r=2,k=1,c1=0,f=z^6", "--field", "Fp:7", "--exhaustive",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["classification"]["kind"], "pencil");
    assert_eq!(v["classification"]["point"], "(0:0:1)");
    assert_eq!(v["classification"]["order"], 2);
    assert_eq!(v["jumps"].as_array().unwrap().len(), 8);
}

#[test]
fn exhaustive_scan_needs_a_prime_field() {
    let out = cli(&["scan", "--family", "en:3", "--exhaustive"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("prime field"));
}

#[test]
fn sampled_scan_is_reproducible() {
    let args = ["--format", "json", "--seed", "4", "scan", "--family", "en:2", "--samples", "40"];
    assert_eq!(cli(&args).stdout, cli(&args).stdout);
}

#[test]
fn bundle_files_and_field_conflicts() {
    let f = bundle_file("field: Fp 7\nsub: 3\nquotients: 2 2 0\nentries: y | z | x^3\n");
    let path = f.path().to_str().unwrap();
    let out = cli(&["--format", "json", "chern", "--bundle", path]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!((v["c1"].as_i64(), v["c2"].as_i64()), (Some(-1), Some(1)));
    assert_eq!(v["stability"], "unstable");
    let clash = cli(&["chern", "--bundle", path, "--field", "Fp:5"]);
    assert_eq!(clash.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&clash.stderr).contains("--field"));
    assert!(cli(&["chern", "--bundle", path, "--field", "Fp:7"]).status.success());
}

#[test]
fn bad_bundle_is_a_parse_error() {
    let f = bundle_file("sub: 3\nquotients: 2 2 0\nentries: y | z | x^2\n");
    let out = cli(&["chern", "--bundle", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn isomorphic_bundles() {
    let a = bundle_file("sub: 3\nquotients: 2 2 0\nentries: y | z | x^3\n");
    let b = bundle_file("sub: 3\nquotients: 2 2 0\nentries: y + 2*z | z | x^3 + y^2*z\n");
    let (pa, pb) = (a.path().to_str().unwrap(), b.path().to_str().unwrap());
    let out = cli(&["--format", "json", "isomorphic", "--bundle", pa, "--bundle", pb]);
    assert!(out.status.success());
    assert_eq!(json(&out)["isomorphic"], true);
    let out = cli(&["--format", "json", "isomorphic", "--family", "kaneyama:1,2,2", "--family", "kaneyama:1,2,3"]);
    let v = json(&out);
    assert_eq!(v["isomorphic"], false);
    assert_eq!(v["outcome"]["certified"], true);
    assert_eq!(cli(&["isomorphic", "--bundle", pa]).status.code(), Some(2));
}

#[test]
fn invariance_commands() {
    let out = cli(&["--format", "json", "invariance", "--family", "en:3", "--group", "Gp", "--p", "1:0:0", "--samples", "10"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["verdict"]["kind"], "invariant");
    let out = cli(&[
        "invariance", "--family", "en:3", "--group", "GL", "--L", "[0,0,1]", "--samples", "10",
        "--expect", "verdict=not_invariant",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = cli(&["invariance", "--family", "en:3", "--group", "B", "--p", "0:1:0", "--L", "[0,0,1]", "--samples", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = cli(&["invariance", "--family", "en:3", "--group", "B", "--p", "0:0:1", "--L", "[0,0,1]"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sections_text() {
    let out = cli(&["sections", "--family", "ex62:r=1", "--twist", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("h0(F(1)) = 1"), "{text}");
    assert!(text.contains("zero scheme length 4"), "{text}");
}

#[test]
fn expect_mismatch_exits_one() {
    let out = cli(&["chern", "--family", "en:1", "--expect", "stability=unstable"]);
    assert_eq!(out.status.code(), Some(1));
    let out = cli(&["chern", "--family", "en:1", "--expect", "stability=stable", "--expect", "c2=1"]);
    assert_eq!(out.status.code(), Some(0));
    let out = cli(&["chern", "--family", "en:1", "--expect", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_paper_quick_and_mutated() {
    let out = cli(&["--format", "json", "verify-paper", "--quick"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 11);
    assert!(v["checks"][0].get("seconds").is_none());

    let out = cli(&["--format", "json", "verify-paper", "--quick", "--mutate", "ex62-pencils"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["ex62-pencils"]);
    assert_eq!(cli(&["verify-paper", "--mutate", "nope"]).status.code(), Some(2));
}
