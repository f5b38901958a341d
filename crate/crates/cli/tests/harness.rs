use std::fs;

use esum_lab::cases::{anchor_known, case_seed, Expectation, Got, Measured};
use esum_lab::report::{read_csv, write_csv, TableRow};
use esum_lab::{
    builtin_cases, emit_tables, verify_cases, Format, RunReport, Status, VerificationCase,
};

fn quick_cases() -> Vec<VerificationCase> {
    builtin_cases()
        .into_iter()
        .filter(|c| c.id.starts_with("lattice.") || c.id.starts_with("am.sharp") || c.id == "wa.m2")
        .collect()
}

#[test]
fn seeds_are_stable_hashes_of_the_id() {
    assert_eq!(case_seed(0, "am.c0.n1"), 5489015114666777387);
    assert_eq!(case_seed(42, "jsum.recursion"), 1733897853431414278);
}

#[test]
fn every_anchor_is_mapped_and_ids_are_unique() {
    let cases = builtin_cases();
    let mut ids: Vec<&str> = cases.iter().map(|c| c.id.as_str()).collect();
    assert!(cases.iter().all(|c| anchor_known(&c.anchor)));
    ids.dedup();
    assert_eq!(ids.len(), cases.len());
}

#[test]
fn report_does_not_depend_on_case_order() {
    let mut cases = quick_cases();
    let a = verify_cases(&cases, 9, 50).to_json();
    cases.reverse();
    assert_eq!(a, verify_cases(&cases, 9, 50).to_json());
}

#[test]
fn csv_round_trips_through_the_json_mirror() {
    let dir = tempfile::tempdir().unwrap();
    let report = verify_cases(&quick_cases(), 0, 50);
    let paths = emit_tables(&report, dir.path(), &[Format::Csv, Format::Json]).unwrap();
    let rows = read_csv(fs::File::open(&paths[0]).unwrap()).unwrap();
    let mirror: RunReport = serde_json::from_str(&fs::read_to_string(&paths[1]).unwrap()).unwrap();
    let from_json: Vec<TableRow> = mirror.cases.iter().map(TableRow::from).collect();
    assert_eq!(rows, from_json);
}

#[test]
fn empty_report_gives_a_header_only_csv() {
    let mut out = Vec::new();
    write_csv(
        &RunReport {
            seed: 0,
            budget: 0,
            cases: vec![],
        },
        &mut out,
    )
    .unwrap();
    assert_eq!(
        String::from_utf8(out).unwrap(),
        "case_id,anchor,expected,got,tol,status\n"
    );
}

#[test]
fn sharpness_row_for_four_points() {
    let report = verify_cases(&quick_cases(), 0, 200);
    let row = report.case("am.sharp.l2.n4").unwrap();
    assert_eq!(row.expected, "4");
    assert_eq!(row.status, Status::Pass);
    let inner = row.got.trim_matches(|c| c == '[' || c == ']');
    for v in inner.split(", ").map(|s| s.parse::<f64>().unwrap()) {
        assert!((v - 4.0).abs() <= 4e-6, "{v}");
    }
}

#[test]
fn broken_inputs_and_panics_stay_inside_their_case() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("broken.json"),
        "{\"check\": \"am_pointwise\", \"id\": ",
    )
    .unwrap();
    fs::write(
        dir.path().join("good.json"),
        r#"{"check": "chi_norm", "id": "doc.chi", "spec": {"kind": "lp", "p": 2.0, "index_size": 9}, "n": 9, "expected": 3.0, "tol": 1e-12}"#,
    )
    .unwrap();
    let mut cases = esum_lab::inputs::load_case_dir(dir.path()).unwrap();
    cases.push(VerificationCase::new(
        "boom",
        "input-document",
        Expectation::Holds,
        0.0,
        |_| panic!("deliberate"),
    ));
    cases.push(VerificationCase::new(
        "wrong",
        "input-document",
        Expectation::exact(1.0),
        0.0,
        |_| Ok(Measured::value(2.0)),
    ));
    let report = verify_cases(&cases, 0, 10);
    let status = |id: &str| report.case(id).unwrap().status;
    assert_eq!(status("file.broken"), Status::Error);
    assert!(report
        .case("file.broken")
        .unwrap()
        .detail
        .starts_with("load error"));
    assert_eq!(status("doc.chi"), Status::Pass);
    assert_eq!(status("boom"), Status::Error);
    assert!(report.case("boom").unwrap().detail.contains("deliberate"));
    assert_eq!(status("wrong"), Status::Fail);
    assert!(!report.passed());
}

#[test]
fn zero_budget_flags_brackets_instead_of_failing() {
    let cases: Vec<_> = builtin_cases()
        .into_iter()
        .filter(|c| c.id.starts_with("am."))
        .collect();
    let report = verify_cases(&cases, 0, 0);
    assert!(report.passed());
    assert_eq!(report.count(Status::Fail), 0);
    assert!(report.count(Status::TooLoose) > 0);
    let loose = report.case("am.sharp.l2.n4").unwrap();
    assert_eq!(loose.status, Status::TooLoose);
}

#[test]
fn mismatched_measurement_is_an_error() {
    let c = VerificationCase::new("shape", "input-document", Expectation::Holds, 0.0, |_| {
        Ok(Measured {
            got: Got::Value(1.0),
            too_loose: false,
            detail: String::new(),
        })
    });
    assert_eq!(c.run(0, 0).status, Status::Error);
}
