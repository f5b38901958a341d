//! One PASS/FAIL line per acceptance criterion, judged on the built-in suite.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use esum_lab::report::CaseResult;
use esum_lab::{verify_all, RunReport, Status, DEFAULT_BUDGET};

/// All cases whose id starts with one of `prefixes`, after checking how many there are.
fn select<'a>(
    report: &'a RunReport,
    prefixes: &[&str],
    expected: usize,
) -> Result<Vec<&'a CaseResult>, String> {
    let rows: Vec<_> = report
        .cases
        .iter()
        .filter(|c| prefixes.iter().any(|p| c.id.starts_with(p)))
        .collect();
    if rows.len() != expected {
        return Err(format!(
            "expected {expected} cases under {prefixes:?}, found {}",
            rows.len()
        ));
    }
    Ok(rows)
}

fn all_pass(report: &RunReport, prefixes: &[&str], expected: usize) -> Result<String, String> {
    let rows = select(report, prefixes, expected)?;
    let bad: Vec<String> = rows
        .iter()
        .filter(|c| c.status != Status::Pass)
        .map(|c| format!("{} ({}: {})", c.id, c.status.as_str(), c.detail))
        .collect();
    if bad.is_empty() {
        Ok(format!("{} cases", rows.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn sharpness(report: &RunReport) -> Result<String, String> {
    let summary = all_pass(report, &["am.sharp.l2."], 6)?;
    let slow: Vec<_> = select(report, &["am.sharp.l2."], 6)?
        .into_iter()
        .filter(|c| c.wall >= Duration::from_secs(10))
        .map(|c| format!("{} took {:?}", c.id, c.wall))
        .collect();
    if slow.is_empty() {
        Ok(summary)
    } else {
        Err(slow.join("; "))
    }
}

fn full_suite(report: &RunReport) -> Result<String, String> {
    let bin = env!("CARGO_BIN_EXE_esum-lab");
    let mut outputs = Vec::new();
    let mut slowest = Duration::ZERO;
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let start = Instant::now();
        let status = Command::new(bin)
            .args(["verify", "--seed", "0", "--format", "json", "--out"])
            .arg(dir.path())
            .output()
            .map_err(|e| e.to_string())?
            .status;
        slowest = slowest.max(start.elapsed());
        if !status.success() {
            return Err(format!("exit status {status}"));
        }
        outputs.push(std::fs::read(dir.path().join("report.json")).map_err(|e| e.to_string())?);
    }
    if outputs[0] != outputs[1] {
        return Err("two runs with the same seed differ".into());
    }
    if outputs[0] != report.to_json().as_bytes() {
        return Err("binary report differs from the in-process run".into());
    }
    if slowest >= Duration::from_secs(300) {
        return Err(format!("verify took {slowest:?}"));
    }
    Ok(format!("byte-identical reruns, exit 0, {slowest:.1?}"))
}

// Runs without the libtest harness so the criterion lines are never captured.
fn main() {
    let report = verify_all(0, DEFAULT_BUDGET);
    type Check<'a> = Box<dyn Fn() -> Result<String, String> + 'a>;
    let criteria: Vec<(&str, Check)> = vec![
        (
            "sharpness of C_E^2 on l2, n = 1..6",
            Box::new(|| sharpness(&report)),
        ),
        (
            "sup sums have constant one, n = 1..8",
            Box::new(|| all_pass(&report, &["am.c0."], 8)),
        ),
        (
            "two-sided estimate on 30 random lattices",
            Box::new(|| all_pass(&report, &["am.sandwich."], 30)),
        ),
        (
            "indicator closed forms and C_E limits",
            Box::new(|| {
                all_pass(
                    &report,
                    &["lattice.chi.", "lattice.ce.", "lattice.orlicz-limit."],
                    20,
                )
            }),
        ),
        (
            "J-norm recursion, elementary bounds, singleton isometry",
            Box::new(|| {
                all_pass(
                    &report,
                    &["jsum.recursion", "jsum.elementary", "jsum.singleton"],
                    3,
                )
            }),
        ),
        (
            "J-sum product rule and 3/sqrt2 bound",
            Box::new(|| all_pass(&report, &["jsum.product."], 2)),
        ),
        (
            "weak amenability decisions",
            Box::new(|| all_pass(&report, &["wa.pointwise.", "wa.m2", "wa.square-zero"], 10)),
        ),
        (
            "WAM of sup sums of M2 and block structure",
            Box::new(|| all_pass(&report, &["wam.sup-sum."], 4)),
        ),
        (
            "lp obstruction per coordinate",
            Box::new(|| all_pass(&report, &["wa.lp-obstruction."], 3)),
        ),
        (
            "full suite deterministic, fast, exit 0",
            Box::new(|| full_suite(&report)),
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(note) => println!("criterion {:>2}: PASS  {name} [{note}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name} [{why}]", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
