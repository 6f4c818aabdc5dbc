//! One line per acceptance criterion: suite outcome and wall-clock budget.
//! Exits nonzero if any row fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use maassp_core::suites::{run_suite, SuiteConfig};

const ROWS: [(u32, &str, u64); 10] = [
    (1, "splitting", 5),
    (2, "explicit-formula", 10),
    (3, "coleman", 30),
    (4, "ks-symplectic", 1),
    (5, "quaternion", 10),
    (6, "hilbert", 10),
    (7, "graded", 5),
    (8, "tree", 15),
    (9, "cm", 10),
    (10, "invariance", 10),
];

fn main() -> ExitCode {
    let cfg = SuiteConfig { p: 5, prec: 20, seed: 0, ..SuiteConfig::default() };
    let mut failed = Vec::new();
    for (row, suite, budget) in ROWS {
        let start = Instant::now();
        let report = run_suite(suite, &cfg).expect("known suite");
        let elapsed = start.elapsed();
        let ok = report.passed && elapsed < Duration::from_secs(budget);
        println!(
            "criterion {row:>2} [{suite}]: {} ({}/{} assertions, {:.2?} of {budget} s)",
            if ok { "PASS" } else { "FAIL" },
            report.total - report.failed,
            report.total,
            elapsed,
        );
        for a in report.failures() {
            println!("    {}: {}", a.id, a.detail);
        }
        if !ok {
            failed.push(row);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
