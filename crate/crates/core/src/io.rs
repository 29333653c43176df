//! JSON density-matrix files.
//!
//! ```json
//! { "local_dim": 2,
//!   "matrix": [[[0.5, 0.0], [0.0, 0.0], ...], ...],
//!   "unnormalized": false,
//!   "metadata": { "source": "..." } }
//! ```
//!
//! Each entry is `[re, im]`. Floats are written in shortest round-trip form,
//! so a written file reloads bit-identically.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bipartite::{BipartiteOperator, TRACE_TOL};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixFile {
    pub local_dim: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unnormalized: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

/// Failure to read or parse a matrix file.
#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: malformed JSON: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Invalid(#[from] Error),
}

impl DensityMatrixFile {
    pub fn from_operator(op: &BipartiteOperator, metadata: BTreeMap<String, String>) -> Result<Self> {
        let matrix: Vec<Vec<[f64; 2]>> = op
            .matrix()
            .to_rows()
            .into_iter()
            .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
            .collect();
        if matrix.iter().flatten().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NumericalIntegrity("matrix has non-finite entries".into()));
        }
        Ok(Self {
            local_dim: op.local_dim(),
            matrix,
            unnormalized: (op.trace() - 1.0).abs() > TRACE_TOL,
            metadata,
        })
    }

    /// Validates shape, Hermiticity, and (unless flagged unnormalized) unit trace.
    pub fn to_operator(&self) -> Result<BipartiteOperator> {
        let n = self.local_dim * self.local_dim;
        if self.local_dim < 1 {
            return Err(Error::param("local_dim", "must be positive"));
        }
        if self.matrix.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.matrix.len(),
            });
        }
        let mut rows = Vec::with_capacity(n);
        for row in &self.matrix {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            if row.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::param("matrix", "entries must be finite"));
            }
            rows.push(row.iter().map(|[re, im]| Complex64::new(*re, *im)).collect());
        }
        let m = ComplexMatrix::from_rows(&rows)?;
        BipartiteOperator::new(m, self.local_dim, !self.unnormalized)
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn read(path: impl AsRef<Path>) -> std::result::Result<Self, FileError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text).map_err(|source| FileError::Json {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> std::result::Result<(), FileError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|source| FileError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distill::paper_example_state;
    use crate::states::subset_mixture;
    use proptest::prelude::*;

    #[test]
    fn example_state_round_trip() {
        let rho = paper_example_state();
        let file = DensityMatrixFile::from_operator(&rho, BTreeMap::new()).unwrap();
        assert!(!file.unnormalized);
        let back = DensityMatrixFile::from_json(&file.to_json()).unwrap().to_operator().unwrap();
        assert_eq!(back, rho);
    }

    #[test]
    fn unnormalized_flag_required() {
        let mix = subset_mixture(3, 2, None).unwrap();
        let mut file = DensityMatrixFile::from_operator(&mix, BTreeMap::new()).unwrap();
        assert!(file.unnormalized);
        assert!(file.to_json().contains("\"unnormalized\": true"));
        file.unnormalized = false;
        assert!(matches!(file.to_operator(), Err(Error::NotAState(_))));
    }

    #[test]
    fn rejects_bad_shapes_and_non_hermitian() {
        let text = r#"{"local_dim": 2, "matrix": [[[1,0]]]}"#;
        let f = DensityMatrixFile::from_json(text).unwrap();
        assert!(matches!(f.to_operator(), Err(Error::DimensionMismatch { .. })));

        let text = r#"{"local_dim": 1, "matrix": [[[1,0]]], "metadata": {"k": "v"}}"#;
        let f = DensityMatrixFile::from_json(text).unwrap();
        assert_eq!(f.metadata["k"], "v");
        assert!(f.to_operator().is_ok());

        let mut rows = vec![vec![[0.0, 0.0]; 4]; 4];
        rows[0][0] = [1.0, 0.0];
        rows[0][1] = [0.3, 0.0];
        let f = DensityMatrixFile { local_dim: 2, matrix: rows, unnormalized: false, metadata: BTreeMap::new() };
        assert!(matches!(f.to_operator(), Err(Error::NotHermitian { .. })));
        assert!(DensityMatrixFile::from_json("{not json").is_err());
    }

    proptest! {
        #[test]
        fn entries_reload_bit_identically(entries in proptest::collection::vec(-1e3f64..1e3, 16)) {
            // symmetric real 4x4 built from arbitrary doubles
            let m = ComplexMatrix::from_fn(4, |i, j| {
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                Complex64::new(entries[a * 4 + b], 0.0)
            });
            let op = BipartiteOperator::new(m, 2, false).unwrap();
            let file = DensityMatrixFile::from_operator(&op, BTreeMap::new()).unwrap();
            let back = DensityMatrixFile::from_json(&file.to_json()).unwrap();
            prop_assert_eq!(back.matrix, file.matrix);
        }
    }
}
