//! JSON file formats: block specs, complex matrices and rendered reports.

use serde::{Deserialize, Serialize};

use crate::canonical::{CanonicalBlock, CanonicalSpec, ComplexMatrix, C64};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct ScalarJson {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    data: Vec<Vec<ScalarJson>>,
}

impl MatrixJson {
    fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixJson {
            rows: m.nrows(),
            cols: m.ncols(),
            data: m
                .row_iter()
                .map(|row| row.iter().map(|z| ScalarJson { re: z.re, im: z.im }).collect())
                .collect(),
        }
    }

    fn into_matrix(self) -> std::result::Result<ComplexMatrix, String> {
        if self.rows == 0 || self.cols == 0 {
            return Err("matrix dimensions must be positive".into());
        }
        if self.data.len() != self.rows {
            return Err(format!(
                "expected {} rows, found {}",
                self.rows,
                self.data.len()
            ));
        }
        let mut out = ComplexMatrix::zeros(self.rows, self.cols);
        for (i, row) in self.data.into_iter().enumerate() {
            if row.len() != self.cols {
                return Err(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    self.cols
                ));
            }
            for (j, z) in row.into_iter().enumerate() {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(format!("entry ({i}, {j}) is not finite"));
                }
                out[(i, j)] = C64::new(z.re, z.im);
            }
        }
        Ok(out)
    }
}

/// Serde adapter for `ComplexMatrix` in the row-major `{"rows","cols","data"}` layout.
pub mod matrix_json {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &ComplexMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from_matrix(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ComplexMatrix, D::Error> {
        MatrixJson::deserialize(d)?
            .into_matrix()
            .map_err(serde::de::Error::custom)
    }
}

fn parse_error(err: serde_json::Error) -> Error {
    Error::Parse(format!(
        "line {}, column {}: {}",
        err.line(),
        err.column(),
        err
    ))
}

/// Syntax and shape problems are parse errors; out-of-range block
/// parameters are rejected as precondition violations.
pub fn parse_spec(text: &str) -> Result<CanonicalSpec> {
    #[derive(Deserialize)]
    struct Raw {
        blocks: Vec<CanonicalBlock>,
    }
    let raw: Raw = serde_json::from_str(text).map_err(parse_error)?;
    CanonicalSpec::new(raw.blocks)
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    #[derive(Deserialize)]
    #[serde(transparent)]
    struct Wrapper(#[serde(with = "matrix_json")] ComplexMatrix);
    serde_json::from_str::<Wrapper>(text)
        .map(|w| w.0)
        .map_err(parse_error)
}

pub fn spec_to_json(spec: &CanonicalSpec) -> String {
    serde_json::to_string(spec).expect("spec serialization is infallible")
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string(&MatrixJson::from_matrix(m)).expect("matrix serialization is infallible")
}
