use serde::{Deserialize, Serialize};

use super::jmatrix::QuadMatrix;
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;
pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;

/// Eigenvalues sorted descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSpectrum {
    pub eigenvalues: Vec<f64>,
}

/// Eigenvalues (descending) and matching unit eigenvectors, stored as the
/// columns of a row-major `n × n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub vectors: Vec<f64>,
}

impl EigenDecomposition {
    /// `V diag(λ) Vᵀ`, row-major.
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.eigenvalues.len();
        let v = &self.vectors;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n).map(|k| v[i * n + k] * self.eigenvalues[k] * v[j * n + k]).sum();
            }
        }
        out
    }
}

pub fn eigen_symmetric(j: &QuadMatrix) -> Result<EigenSpectrum> {
    eigen_decompose(j).map(|d| EigenSpectrum { eigenvalues: d.eigenvalues })
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops
/// below `1e-12·‖J‖_F`.
pub fn eigen_decompose(j: &QuadMatrix) -> Result<EigenDecomposition> {
    let n = j.n();
    let mut a = j.entries().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let norm = j.frobenius();
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    s += a[p * n + q] * a[p * n + q];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = norm == 0.0 || off(&a) <= OFF_DIAGONAL_TOLERANCE * norm;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[p * n + p], a[q * n + q]);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        converged = off(&a) <= OFF_DIAGONAL_TOLERANCE * norm;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[y * n + y].total_cmp(&a[x * n + x]));
    let eigenvalues = order.iter().map(|&k| a[k * n + k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + col] = v[i * n + k];
        }
    }
    Ok(EigenDecomposition { eigenvalues, vectors })
}
