//! JSON interchange format for measurement sets.
//!
//! Schema: `{"dimension": d, "operators": [matrix, ...]}` where each matrix is
//! a row-major `d x d` nesting of `[re, im]` pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::MeasurementSet;
use crate::qlin::CMatrix;
use num_complex::Complex64;

#[derive(Debug, Serialize, Deserialize)]
pub struct MeasurementSetDoc {
    pub dimension: usize,
    pub operators: Vec<Vec<Vec<[f64; 2]>>>,
}

impl MeasurementSetDoc {
    pub fn from_set(set: &MeasurementSet) -> Self {
        let d = set.dimension();
        let operators = set
            .operators()
            .iter()
            .map(|op| {
                (0..d)
                    .map(|i| {
                        (0..d)
                            .map(|j| {
                                let z = op.matrix()[(i, j)];
                                [z.re, z.im]
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self {
            dimension: d,
            operators,
        }
    }

    pub fn into_set(self) -> Result<MeasurementSet> {
        self.into_set_with_tolerance(crate::measurement::COMPLETENESS_TOL)
    }

    pub fn into_set_with_tolerance(self, completeness_tol: f64) -> Result<MeasurementSet> {
        let d = self.dimension;
        let mut matrices = Vec::with_capacity(self.operators.len());
        for rows in &self.operators {
            if rows.len() != d || rows.iter().any(|row| row.len() != d) {
                return Err(Error::Dimension(format!(
                    "operator entry grid does not match dimension {d}"
                )));
            }
            matrices.push(CMatrix::from_fn(d, d, |i, j| {
                Complex64::new(rows[i][j][0], rows[i][j][1])
            }));
        }
        MeasurementSet::with_tolerance(d, matrices, completeness_tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::example_weak_eta;
    use crate::qlin::frobenius_distance;

    #[test]
    fn round_trip_preserves_operators() {
        let set = example_weak_eta(0.36).unwrap();
        let doc = MeasurementSetDoc::from_set(&set);
        let text = serde_json::to_string(&doc).unwrap();
        let parsed: MeasurementSetDoc = serde_json::from_str(&text).unwrap();
        let back = parsed.into_set().unwrap();
        for (a, b) in set.operators().iter().zip(back.operators()) {
            assert!(frobenius_distance(a.matrix(), b.matrix()) < 1e-15);
        }
    }

    #[test]
    fn malformed_grid_is_rejected() {
        let doc = MeasurementSetDoc {
            dimension: 2,
            operators: vec![vec![vec![[1.0, 0.0]]]],
        };
        assert!(doc.into_set().is_err());
    }
}
