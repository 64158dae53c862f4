//! Matrix and system files.
//!
//! A matrix file is `{"n": 2, "entries": [[[re, im], ...], ...]}`, row
//! major. A system file describes an affine family
//! `A(u) = offset + Σᵢ uⁱ·basisᵢ` as `{"offset": <matrix>, "basis":
//! [<matrix>, ...]}`; `offset` defaults to zero.

use std::fs;
use std::path::Path;

use hpd_core::matrix::{ComplexMatrix, HermitianMatrix, HpdMatrix, C64};
use hpd_core::system::AffineSystem;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::format::fmt_sig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            n: m.dim(),
            entries: m
                .to_rows()
                .into_iter()
                .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> hpd_core::Result<ComplexMatrix> {
        let rows = self.entries.len();
        if rows != self.n {
            return Err(hpd_core::Error::NotSquare { rows, cols: self.n });
        }
        if let Some(row) = self.entries.iter().find(|r| r.len() != self.n) {
            return Err(hpd_core::Error::NotSquare {
                rows,
                cols: row.len(),
            });
        }
        let flat: Vec<C64> = self
            .entries
            .iter()
            .flatten()
            .map(|&[re, im]| C64::new(re, im))
            .collect();
        ComplexMatrix::from_row_major(self.n, &flat)
    }

    /// Compact JSON with every number at 12 significant digits.
    pub fn to_json(&self) -> String {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|row| {
                let cells: Vec<String> = row
                    .iter()
                    .map(|[re, im]| format!("[{},{}]", fmt_sig(*re), fmt_sig(*im)))
                    .collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        format!("{{\"n\":{},\"entries\":[{}]}}", self.n, rows.join(","))
    }
}

pub fn matrix_json(m: &ComplexMatrix) -> String {
    MatrixFile::from_matrix(m).to_json()
}

fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        origin: origin.to_owned(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn matrix_error(origin: &str) -> impl Fn(hpd_core::Error) -> CliError + '_ {
    move |source| CliError::Matrix {
        origin: origin.to_owned(),
        source,
    }
}

pub fn parse_hermitian(text: &str, origin: &str) -> Result<HermitianMatrix, CliError> {
    let file: MatrixFile = parse_json(text, origin)?;
    file.to_matrix()
        .and_then(HermitianMatrix::new)
        .map_err(matrix_error(origin))
}

pub fn parse_hpd(text: &str, origin: &str) -> Result<HpdMatrix, CliError> {
    HpdMatrix::new(parse_hermitian(text, origin)?).map_err(matrix_error(origin))
}

pub fn read_hermitian(path: &Path) -> Result<HermitianMatrix, CliError> {
    parse_hermitian(&read_text(path)?, &path.display().to_string())
}

pub fn read_hpd(path: &Path) -> Result<HpdMatrix, CliError> {
    parse_hpd(&read_text(path)?, &path.display().to_string())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    offset: Option<MatrixFile>,
    basis: Vec<MatrixFile>,
}

pub fn parse_system(text: &str, origin: &str) -> Result<AffineSystem, CliError> {
    let file: SystemFile = parse_json(text, origin)?;
    let to_herm = |m: &MatrixFile| m.to_matrix().and_then(HermitianMatrix::new);
    let build = || -> hpd_core::Result<AffineSystem> {
        let basis = file
            .basis
            .iter()
            .map(to_herm)
            .collect::<hpd_core::Result<Vec<_>>>()?;
        let n = basis
            .first()
            .map(HermitianMatrix::dim)
            .ok_or(hpd_core::Error::EmptyInput)?;
        let offset = match &file.offset {
            Some(m) => to_herm(m)?,
            None => HermitianMatrix::zeros(n),
        };
        AffineSystem::new(offset, basis)
    };
    build().map_err(matrix_error(origin))
}

pub fn read_system(path: &Path) -> Result<AffineSystem, CliError> {
    parse_system(&read_text(path)?, &path.display().to_string())
}

/// Parses `"1,2.5,-3"`.
pub fn parse_csv_floats(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Usage(format!("'{t}' is not a finite number")))
        })
        .collect()
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}
