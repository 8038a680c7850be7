//! Every acceptance criterion at its stated tolerance, one line each.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the report.

use std::time::{Duration, Instant};

use phi_calderon::verify::{verify_all, Criterion, VerifyOptions};

/// Criterion key and its runtime budget.
const BUDGETS: [(&str, u64); 12] = [
    ("dn-symbol", 1),
    ("calderon-closed-form", 1),
    ("complementarity", 30),
    ("orthogonalization", 10),
    ("inversion-lemma", 10),
    ("extension-algebra", 20),
    ("normal-family", 30),
    ("unique-continuation", 30),
    ("path-agreement", 60),
    ("green-identity", 10),
    ("normal-probe", 600),
    ("trace-stability", 10),
];

fn line(c: &Criterion, budget: Duration) -> (bool, String) {
    let in_time = c.elapsed <= budget;
    let ok = c.passed && in_time;
    let text = format!(
        "{} {:<22} value {:.3e} tol {:.1e} runtime {:.2} s (budget {} s)  {}",
        if ok { "PASS" } else { "FAIL" },
        c.key,
        c.value,
        c.tolerance,
        c.elapsed.as_secs_f64(),
        budget.as_secs(),
        c.detail
    );
    (ok, text)
}

#[test]
fn acceptance_criteria() {
    let opts = VerifyOptions::default();
    let first = verify_all(&opts).expect("verify run");
    let mut failures = Vec::new();
    for (key, secs) in BUDGETS {
        let c = first.criteria().find(|c| c.key == key).unwrap_or_else(|| panic!("criterion {key} missing"));
        let (ok, text) = line(c, Duration::from_secs(secs));
        println!("{text}");
        if !ok {
            failures.push(key.to_string());
        }
    }
    assert_eq!(first.criteria().count(), BUDGETS.len(), "unexpected criteria in the report");

    // determinism: a second run writes the same bytes
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    first.write(a.path()).unwrap();
    let start = Instant::now();
    let second = verify_all(&opts).expect("second verify run");
    second.write(b.path()).unwrap();
    let mut same = true;
    for (name, _) in first.files().unwrap() {
        let x = std::fs::read(a.path().join(&name)).unwrap();
        let y = std::fs::read(b.path().join(&name)).unwrap();
        same &= x == y;
    }
    println!(
        "{} {:<22} {} files compared, second run {:.1} s",
        if same { "PASS" } else { "FAIL" },
        "determinism",
        first.files().unwrap().len(),
        start.elapsed().as_secs_f64()
    );
    if !same {
        failures.push("determinism".into());
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
