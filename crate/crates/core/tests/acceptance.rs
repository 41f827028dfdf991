//! Acceptance criteria: one PASS/FAIL line per check, nonzero exit if any fails.

use std::process::ExitCode;

use spectral_core::acceptance::run_all;

fn main() -> ExitCode {
    let checks = run_all(true);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.id.as_str()).collect();
    println!("{} of {} checks passed", checks.len() - failed.len(), checks.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed checks: {failed:?}");
        ExitCode::FAILURE
    }
}
