//! Runs `besov-dunkl verify` on the bundled profile twice and prints one
//! pass/fail line per acceptance criterion.

use std::collections::BTreeMap;
use std::io::Write;
use std::process::Command;
use std::time::Instant;

use besov_dunkl::verify::{criterion, VerifyReport, CHECKS};

const CRITERIA: [&str; 14] = [
    "kernel bound |E| <= 1 + 1e-10",
    "Plancherel ratio within 1e-8",
    "inversion round trip within 1e-7 ||f||_inf",
    "Gaussian fixed point within 1e-8",
    "translation identities",
    "kernel cross-check, |W| mass and scaling",
    "convolution identities and Young bounds",
    "Taylor remainder identity within 1e-5 (1 + ||Lambda f||_inf)",
    "Theta mass within 1e-9 relative",
    "K-functional / modulus sandwich",
    "Bernstein ratios and halving",
    "ED <= C BD and mollifier defect",
    "BD <= C (||f|| + ED) at p = 2, E monotone",
    "determinism modulo timestamp",
];

fn run_once(tag: &str) -> (VerifyReport, i32, f64) {
    let out = std::env::temp_dir().join(format!("besov_dunkl_acceptance_{}_{tag}.json", std::process::id()));
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_besov-dunkl"))
        .args(["verify", "--out"])
        .arg(&out)
        .status()
        .expect("verify runs");
    let secs = start.elapsed().as_secs_f64();
    let text = std::fs::read_to_string(&out).expect("report written");
    let _ = std::fs::remove_file(&out);
    (serde_json::from_str(&text).expect("report parses"), status.code().unwrap_or(-1), secs)
}

#[test]
fn acceptance() {
    let (first, code, secs) = run_once("a");
    let (second, _, _) = run_once("b");

    let mut by_criterion: BTreeMap<u8, Vec<String>> = BTreeMap::new();
    let mut seen = 0;
    for c in first.checks() {
        let n = criterion(&c.id).expect("known check id");
        seen += 1;
        if !c.pass {
            by_criterion.entry(n).or_default().push(format!("{} observed {:?} > {}", c.id, c.observed, c.ceiling));
        } else {
            by_criterion.entry(n).or_default();
        }
    }
    assert_eq!(seen, CHECKS.len());
    let same = first.canonical_json().unwrap() == second.canonical_json().unwrap();
    by_criterion.insert(14, if same { vec![] } else { vec!["reports differ".into()] });

    // written to the handle directly so the lines survive output capture
    let mut err = std::io::stderr().lock();
    writeln!(err, "verify: exit {code}, {secs:.0} s").unwrap();
    let mut all = true;
    for (i, name) in CRITERIA.iter().enumerate() {
        let n = i as u8 + 1;
        let fails = by_criterion.get(&n).expect("every criterion has checks");
        all &= fails.is_empty();
        let verdict = if fails.is_empty() { "PASS" } else { "FAIL" };
        writeln!(err, "AC{n:<2} {verdict}  {name}").unwrap();
        for f in fails {
            writeln!(err, "       {f}").unwrap();
        }
    }
    assert_eq!(code == 0, first.pass);
    assert!(secs <= 15.0 * 60.0, "verify took {secs:.0} s");
    assert!(all, "acceptance criteria failed");
}
