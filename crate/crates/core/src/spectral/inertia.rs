use serde::{Deserialize, Serialize};

use super::eigen::EigenSpectrum;
use crate::error::{Error, Result};

pub const DEFAULT_EPSILON_REL: f64 = 1e-6;

/// Counts of positive, negative and zero eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InertiaSignature {
    pub n_pos: usize,
    pub n_neg: usize,
    pub n_zero: usize,
}

impl InertiaSignature {
    pub fn dim(&self) -> usize {
        self.n_pos + self.n_neg + self.n_zero
    }

    /// Positive-index count with zeros absorbed as positive.
    pub fn simplified(&self) -> usize {
        self.n_pos + self.n_zero
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TypeMode {
    /// `(n_pos, n_neg, n_zero)` triples: `(n+2)(n+1)/2` types.
    Full,
    /// Positive-index count only: `n+1` types.
    Simplified,
}

impl std::str::FromStr for TypeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(TypeMode::Full),
            "simplified" => Ok(TypeMode::Simplified),
            other => Err(Error::InvalidParameter(format!("unknown mode {other:?} (full|simplified)"))),
        }
    }
}

/// An eigenvalue counts as zero when `|λ| < ε_rel·max|λ|`; an all-zero
/// spectrum is all zeros.
pub fn classify_inertia(spectrum: &EigenSpectrum, epsilon_rel: f64) -> Result<InertiaSignature> {
    if !(epsilon_rel > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon_rel must be positive, got {epsilon_rel}")));
    }
    let scale = spectrum.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = epsilon_rel * scale;
    let mut sig = InertiaSignature { n_pos: 0, n_neg: 0, n_zero: 0 };
    for &l in &spectrum.eigenvalues {
        if scale == 0.0 || l.abs() < threshold {
            sig.n_zero += 1;
        } else if l > 0.0 {
            sig.n_pos += 1;
        } else {
            sig.n_neg += 1;
        }
    }
    Ok(sig)
}

/// Number of gate types for `n`-input neurons.
pub fn type_count(n: usize, mode: TypeMode) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidParameter("type_count needs n >= 1".into()));
    }
    Ok(match mode {
        TypeMode::Full => (n + 2) * (n + 1) / 2,
        TypeMode::Simplified => n + 1,
    })
}

/// All full-mode signatures for dimension `n` in canonical key order:
/// descending `n_pos`, then descending `n_zero`.
pub fn full_types(n: usize) -> Vec<InertiaSignature> {
    let mut out = Vec::with_capacity((n + 2) * (n + 1) / 2);
    for n_pos in (0..=n).rev() {
        for n_zero in (0..=n - n_pos).rev() {
            out.push(InertiaSignature { n_pos, n_neg: n - n_pos - n_zero, n_zero });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: &[f64]) -> EigenSpectrum {
        EigenSpectrum { eigenvalues: v.to_vec() }
    }

    #[test]
    fn figure_cases() {
        let s = classify_inertia(&spec(&[1.0, 1.0]), 1e-6).unwrap();
        assert_eq!(s, InertiaSignature { n_pos: 2, n_neg: 0, n_zero: 0 });
        let s = classify_inertia(&spec(&[1.0, -1.0]), 1e-6).unwrap();
        assert_eq!(s, InertiaSignature { n_pos: 1, n_neg: 1, n_zero: 0 });
        let s = classify_inertia(&spec(&[0.0, -2.0]), 1e-6).unwrap();
        assert_eq!(s, InertiaSignature { n_pos: 0, n_neg: 1, n_zero: 1 });
        assert_eq!(s.simplified(), 1);
    }

    #[test]
    fn relative_threshold() {
        let s = classify_inertia(&spec(&[1e-9, -1.0]), 1e-6).unwrap();
        assert_eq!(s.n_zero, 1);
        let s = classify_inertia(&spec(&[0.0, 0.0]), 1e-6).unwrap();
        assert_eq!(s.n_zero, 2);
        assert!(classify_inertia(&spec(&[1.0]), 0.0).is_err());
    }

    #[test]
    fn type_counts() {
        assert_eq!(type_count(4, TypeMode::Full).unwrap(), 15);
        assert_eq!(type_count(9, TypeMode::Simplified).unwrap(), 10);
        assert_eq!(type_count(16, TypeMode::Simplified).unwrap(), 17);
        assert!(type_count(0, TypeMode::Full).is_err());
        for n in 1..12 {
            assert_eq!(full_types(n).len(), type_count(n, TypeMode::Full).unwrap());
        }
    }
}
