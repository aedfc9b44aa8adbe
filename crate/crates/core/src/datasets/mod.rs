//! Deterministic Tai Ji and XOR generators, and IDX (MNIST) ingestion.

mod idx;
mod taiji;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use idx::{encode_idx, load_idx, load_idx_prefix, IDX_IMAGES_MAGIC, IDX_LABELS_MAGIC};
pub use taiji::{gen_taiji, taiji_label, TaiJiSpec};

/// Feature vectors stored contiguously, with integer class labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    features: Vec<f64>,
    labels: Vec<usize>,
    feature_shape: Vec<usize>,
    classes: usize,
}

impl LabeledDataset {
    pub fn new(
        features: Vec<f64>,
        labels: Vec<usize>,
        feature_shape: Vec<usize>,
        classes: usize,
    ) -> Result<Self> {
        let dim: usize = feature_shape.iter().product();
        if dim == 0 {
            return Err(Error::InvalidParameter(format!("bad feature shape {feature_shape:?}")));
        }
        if features.len() != labels.len() * dim {
            return Err(Error::DimensionMismatch { expected: labels.len() * dim, got: features.len() });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= classes) {
            return Err(Error::InvalidParameter(format!("label {bad} out of range for {classes} classes")));
        }
        Ok(LabeledDataset { features, labels, feature_shape, classes })
    }

    pub fn from_points(points: &[Vec<f64>], labels: Vec<usize>, classes: usize) -> Result<Self> {
        let dim = points.first().map_or(1, Vec::len);
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
        }
        if points.len() != labels.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), got: labels.len() });
        }
        LabeledDataset::new(points.concat(), labels, vec![dim], classes)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.feature_shape.iter().product()
    }

    pub fn feature_shape(&self) -> &[usize] {
        &self.feature_shape
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.features[i * d..(i + 1) * d]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], usize)> {
        self.features.chunks_exact(self.dim()).zip(self.labels.iter().copied())
    }

    /// The first `n` examples (or all, if fewer).
    pub fn take(&self, n: usize) -> LabeledDataset {
        let n = n.min(self.len());
        LabeledDataset {
            features: self.features[..n * self.dim()].to_vec(),
            labels: self.labels[..n].to_vec(),
            feature_shape: self.feature_shape.clone(),
            classes: self.classes,
        }
    }

    /// Examples at `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> LabeledDataset {
        let end = end.min(self.len());
        let start = start.min(end);
        let d = self.dim();
        LabeledDataset {
            features: self.features[start * d..end * d].to_vec(),
            labels: self.labels[start..end].to_vec(),
            feature_shape: self.feature_shape.clone(),
            classes: self.classes,
        }
    }
}

/// The four XOR points: `(0,0)→0, (0,1)→1, (1,0)→1, (1,1)→0`.
pub fn gen_xor() -> LabeledDataset {
    let points = [vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
    LabeledDataset::from_points(&points, vec![0, 1, 1, 0], 2).expect("static dataset is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_points() {
        let d = gen_xor();
        assert_eq!(d.len(), 4);
        assert_eq!(d.labels().iter().sum::<usize>(), 2);
        for (p, l) in d.iter() {
            let swapped = [p[1], p[0]];
            let (_, l2) = d.iter().find(|(q, _)| *q == swapped).unwrap();
            assert_eq!(l, l2);
        }
    }

    #[test]
    fn rejects_out_of_range_labels() {
        assert!(LabeledDataset::from_points(&[vec![0.0]], vec![2], 2).is_err());
        assert!(LabeledDataset::from_points(&[vec![0.0], vec![1.0, 2.0]], vec![0, 1], 2).is_err());
    }
}
