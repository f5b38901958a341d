//! Verification harness and command plumbing for `esum-lab`.

pub mod cases;
pub mod inputs;
pub mod report;

use rayon::prelude::*;

pub use cases::{builtin_cases, VerificationCase};
pub use report::{emit_tables, Format, RunReport, Status};

/// Default restarts for the bracket searches.
pub const DEFAULT_BUDGET: usize = 200;

/// Runs `cases` in parallel; the report is sorted by case id whatever the schedule.
pub fn verify_cases(cases: &[VerificationCase], seed: u64, budget: usize) -> RunReport {
    let mut results: Vec<_> = cases.par_iter().map(|c| c.run(seed, budget)).collect();
    results.sort_by(|a, b| a.id.cmp(&b.id));
    RunReport {
        seed,
        budget,
        cases: results,
    }
}

pub fn verify_all(seed: u64, budget: usize) -> RunReport {
    verify_cases(&builtin_cases(), seed, budget)
}
