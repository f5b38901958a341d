use std::fs;
use std::path::{Path, PathBuf};

use esum_core::tensor::am_pointwise;
use esum_core::LatticeNorm;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::cases::{Expectation, Measured, VerificationCase};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    let text = fs::read_to_string(path).map_err(|source| InputError::Read {
        path: path.into(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| InputError::Parse {
        path: path.into(),
        source,
    })
}

/// A user-supplied case: a lattice spec, the quantity to compute and its expected value.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum CaseDocument {
    AmPointwise {
        id: String,
        spec: LatticeNorm,
        expected: f64,
        tol: f64,
    },
    ChiNorm {
        id: String,
        spec: LatticeNorm,
        n: usize,
        expected: f64,
        tol: f64,
    },
    CeConstant {
        id: String,
        spec: LatticeNorm,
        expected: f64,
        tol: f64,
    },
}

impl CaseDocument {
    fn into_case(self) -> VerificationCase {
        let e = |s: esum_core::Error| s.to_string();
        match self {
            CaseDocument::AmPointwise {
                id,
                spec,
                expected,
                tol,
            } => VerificationCase::new(
                id,
                "input-document",
                Expectation::relative(expected),
                tol,
                move |ctx| {
                    let b = am_pointwise(&spec, ctx.budget()).map_err(e)?;
                    Ok(Measured::bracket(b.lower, b.upper, b.too_loose))
                },
            ),
            CaseDocument::ChiNorm {
                id,
                spec,
                n,
                expected,
                tol,
            } => VerificationCase::new(
                id,
                "input-document",
                Expectation::relative(expected),
                tol,
                move |_| Ok(Measured::value(spec.chi_norm(n).map_err(e)?)),
            ),
            CaseDocument::CeConstant {
                id,
                spec,
                expected,
                tol,
            } => VerificationCase::new(
                id,
                "input-document",
                Expectation::relative(expected),
                tol,
                move |_| {
                    Ok(Measured::value(
                        spec.ce_constant().map_err(e)?.horizon_value,
                    ))
                },
            ),
        }
    }
}

/// Loads every `*.json` in `dir` as a case. A file that fails to load still yields a
/// case (id `file.<stem>`) which reports the load error when run.
pub fn load_case_dir(dir: &Path) -> Result<Vec<VerificationCase>, InputError> {
    let read = |source| InputError::Read {
        path: dir.into(),
        source,
    };
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(read)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    Ok(paths.iter().map(|p| load_case(p)).collect())
}

pub fn load_case(path: &Path) -> VerificationCase {
    match read_json::<CaseDocument>(path) {
        Ok(doc) => doc.into_case(),
        Err(error) => {
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let message = format!("load error: {error}");
            VerificationCase::new(
                format!("file.{stem}"),
                "input-document",
                Expectation::Holds,
                0.0,
                move |_| Err(message.clone()),
            )
        }
    }
}
