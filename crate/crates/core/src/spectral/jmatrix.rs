use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadcore::QuadraticNeuron;

/// Symmetric `n × n` matrix, row-major. Only constructed symmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl QuadMatrix {
    /// Builds a symmetric matrix from its upper triangle (`f(i, j)` is only
    /// called with `i <= j`).
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        QuadMatrix { n, entries }
    }

    /// Accepts row-major entries only if they are exactly symmetric.
    pub fn from_rows(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: entries.len() });
        }
        for i in 0..n {
            for j in i + 1..n {
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(Error::InvalidParameter(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(QuadMatrix { n, entries })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        QuadMatrix::from_upper(values.len(), |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `xᵀ J x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let n = self.n;
        (0..n).map(|i| x[i] * (0..n).map(|j| self.get(i, j) * x[j]).sum::<f64>()).sum()
    }

    /// `QᵀJQ` for a square `q` given row-major, symmetrized from the upper
    /// triangle of the product.
    pub fn congruent(&self, q: &[f64]) -> QuadMatrix {
        let n = self.n;
        let mut jq = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                jq[i * n + k] = (0..n).map(|j| self.get(i, j) * q[j * n + k]).sum();
            }
        }
        QuadMatrix::from_upper(n, |a, b| (0..n).map(|i| q[i * n + a] * jq[i * n + b]).sum())
    }
}

/// The matrix of a neuron's pure quadratic part:
/// `J_ii = w_r,i·w_g,i + w_b,i`, `J_ij = (w_r,i·w_g,j + w_r,j·w_g,i)/2`.
pub fn build_j_matrix(neuron: &QuadraticNeuron) -> QuadMatrix {
    let (r, g, b) = (&neuron.w_r, &neuron.w_g, &neuron.w_b);
    QuadMatrix::from_upper(neuron.inputs(), |i, j| {
        if i == j {
            r[i] * g[i] + b[i]
        } else {
            (r[i] * g[j] + r[j] * g[i]) / 2.0
        }
    })
}

/// `(w_r·x)(w_g·x) + w_b·(x⊙x)`: the neuron with offsets removed.
pub fn pure_quadratic_part(neuron: &QuadraticNeuron, x: &[f64]) -> f64 {
    let p: f64 = neuron.w_r.iter().zip(x).map(|(a, b)| a * b).sum();
    let q: f64 = neuron.w_g.iter().zip(x).map(|(a, b)| a * b).sum();
    let s: f64 = neuron.w_b.iter().zip(x).map(|(a, b)| a * b * b).sum();
    p * q + s
}
