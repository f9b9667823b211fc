//! The acceptance criteria, one line each. Run with `cargo test --test acceptance`.

use std::process::{Command, ExitCode};
use std::time::Instant;

use planebundles::shell::verify::{SuiteOptions, CHECKS};

fn verify_paper_json() -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_planebundles"))
        .args(["--format", "json", "verify-paper"])
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "verify-paper exited with {}", out.status);
    out.stdout
}

fn main() -> ExitCode {
    let opts = SuiteOptions::default();
    let mut failed = 0;
    for (i, check) in CHECKS.iter().enumerate() {
        let start = Instant::now();
        let result = check.run(&opts);
        let elapsed = start.elapsed().as_secs_f64();
        let (ok, note) = if check.id == "determinism" {
            // Beyond the in-suite reruns: two full verify-paper runs, byte for byte.
            let same = verify_paper_json() == verify_paper_json();
            (result.passed && same, format!("full suite JSON identical: {same}"))
        } else {
            let in_time = elapsed <= check.limit_seconds;
            (
                result.passed && in_time,
                format!("{elapsed:.2}s of {:.0}s allowed; {}", check.limit_seconds, result.detail),
            )
        };
        if !ok {
            failed += 1;
        }
        let status = if ok { "PASS" } else { "FAIL" };
        let note = if note.chars().count() > 160 {
            format!("{}...", note.chars().take(157).collect::<String>())
        } else {
            note
        };
        println!("{status} [{:>2}] {:<22} {}  ({note})", i + 1, check.id, check.title);
    }
    println!("acceptance: {} passed, {} failed", CHECKS.len() - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
