//! JSON formats for matrices and secular problems.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, C64};
use crate::secular::SecularProblem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    n: usize,
    entries: Vec<Entry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    poles: Vec<f64>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {} column {}: {e}", e.line(), e.column()))
}

/// Parses `{"n": n, "entries": [...]}` with `n²` row-major entries, each a
/// number or a `[re, im]` pair.
pub fn parse_matrix(text: &str) -> Result<HermitianMatrix> {
    let file: MatrixFile = serde_json::from_str(text).map_err(parse_error)?;
    if file.entries.len() != file.n * file.n {
        return Err(Error::NotSquare {
            rows: file.n,
            len: file.entries.len(),
        });
    }
    let entries = file
        .entries
        .into_iter()
        .map(|e| match e {
            Entry::Real(x) => C64::new(x, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        })
        .collect();
    HermitianMatrix::new(file.n, entries)
}

pub fn matrix_to_json(a: &HermitianMatrix) -> String {
    let real = a.entries().iter().all(|z| z.im == 0.0);
    let entries = a
        .entries()
        .iter()
        .map(|z| {
            if real {
                Entry::Real(z.re)
            } else {
                Entry::Complex([z.re, z.im])
            }
        })
        .collect();
    let file = MatrixFile { n: a.dim(), entries };
    serde_json::to_string_pretty(&file).expect("matrix serializes")
}

/// Parses `{"poles": [...], "weights": [...]}`; absent weights mean equal
/// weights.
pub fn parse_problem(text: &str) -> Result<SecularProblem> {
    let file: ProblemFile = serde_json::from_str(text).map_err(parse_error)?;
    match file.weights {
        Some(w) => SecularProblem::new(file.poles, w),
        None => SecularProblem::equal_weights(file.poles),
    }
}

pub fn read_matrix(path: &Path) -> Result<HermitianMatrix> {
    parse_matrix(&fs::read_to_string(path)?)
}

pub fn read_problem(path: &Path) -> Result<SecularProblem> {
    parse_problem(&fs::read_to_string(path)?)
}

pub fn write_matrix(path: &Path, a: &HermitianMatrix) -> Result<()> {
    fs::write(path, matrix_to_json(a) + "\n")?;
    Ok(())
}
