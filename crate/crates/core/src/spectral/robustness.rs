use serde::{Deserialize, Serialize};

use super::eigen::eigen_symmetric;
use super::jmatrix::QuadMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoffmanWielandt {
    /// `Σ (λ_i^A − λ_i^B)²` with both spectra sorted descending.
    pub lhs: f64,
    /// `‖A − B‖_F²`.
    pub rhs: f64,
    pub holds: bool,
}

pub fn hoffman_wielandt_check(a: &QuadMatrix, b: &QuadMatrix) -> Result<HoffmanWielandt> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { expected: a.n(), got: b.n() });
    }
    let la = eigen_symmetric(a)?.eigenvalues;
    let lb = eigen_symmetric(b)?.eigenvalues;
    let lhs = la.iter().zip(&lb).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
    let rhs = a.entries().iter().zip(b.entries()).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
    Ok(HoffmanWielandt { lhs, rhs, holds: lhs <= rhs + 1e-9 })
}
