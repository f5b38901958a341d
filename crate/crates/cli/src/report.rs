use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The bracket search ran out of budget before the check could be decided.
    TooLoose,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::TooLoose => "too_loose",
            Status::Error => "error",
        }
    }

    /// Flagged cases do not count against the exit code.
    pub fn is_ok(self) -> bool {
        matches!(self, Status::Pass | Status::TooLoose)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub id: String,
    pub anchor: String,
    pub expected: String,
    pub got: String,
    pub tol: f64,
    pub status: Status,
    pub detail: String,
    /// Kept out of the serialized report so reruns stay byte-identical.
    #[serde(skip)]
    pub wall: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub budget: usize,
    pub cases: Vec<CaseResult>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.status.is_ok())
    }

    pub fn count(&self, status: Status) -> usize {
        self.cases.iter().filter(|c| c.status == status).count()
    }

    pub fn case(&self, id: &str) -> Option<&CaseResult> {
        self.cases.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// One CSV line; the JSON mirror carries the same fields plus `detail`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub case_id: String,
    pub anchor: String,
    pub expected: String,
    pub got: String,
    pub tol: f64,
    pub status: Status,
}

impl From<&CaseResult> for TableRow {
    fn from(c: &CaseResult) -> Self {
        Self {
            case_id: c.id.clone(),
            anchor: c.anchor.clone(),
            expected: c.expected.clone(),
            got: c.got.clone(),
            tol: c.tol,
            status: c.status,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub fn write_csv<W: io::Write>(report: &RunReport, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    if report.cases.is_empty() {
        w.write_record(["case_id", "anchor", "expected", "got", "tol", "status"])?;
    }
    for c in &report.cases {
        w.serialize(TableRow::from(c))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<TableRow>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// Writes `report.csv` and/or `report.json` into `dir`, returning the paths.
pub fn emit_tables(
    report: &RunReport,
    dir: &Path,
    formats: &[Format],
) -> Result<Vec<PathBuf>, EmitError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| EmitError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for f in formats {
        let path = dir.join(match f {
            Format::Csv => "report.csv",
            Format::Json => "report.json",
        });
        let mut bytes = Vec::new();
        match f {
            Format::Csv => write_csv(report, &mut bytes)?,
            Format::Json => bytes.extend_from_slice(report.to_json().as_bytes()),
        }
        fs::write(&path, bytes).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}
