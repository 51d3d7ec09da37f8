//! Runs every randomized invariant suite with a fixed seed and prints one line per suite.

use macromic::verify::{run_suite, SUITES};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    for suite in SUITES {
        let trials = suite.default_trials.min(100);
        let report = run_suite(suite, trials, seed);
        let verdict = if report.passed() { "ok" } else { "FAILED" };
        println!("{:24} {trials:5} trials  {verdict:6} worst slack {:?}", suite.name, report.worst_slack);
    }
}
