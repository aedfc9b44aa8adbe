use serde::{Deserialize, Serialize};

use super::LabeledDataset;
use crate::error::{Error, Result};

/// Grid reciprocal `R`: points sit on the lattice `(i/R, j/R)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaiJiSpec {
    pub reciprocal: u32,
}

impl TaiJiSpec {
    pub const TRAIN: TaiJiSpec = TaiJiSpec { reciprocal: 20 };
    pub const TEST: TaiJiSpec = TaiJiSpec { reciprocal: 50 };
}

/// Yin-yang label of a point in the open unit disk.
///
/// Class 1 is the left half-disk, minus the left half of the lower eye-disk,
/// plus the whole upper eye-disk (eye radius ½ centred at `(0, ±½)`).
pub fn taiji_label(x: f64, y: f64) -> Result<usize> {
    if x * x + y * y >= 1.0 {
        return Err(Error::OutsideDisk { x, y });
    }
    let upper = x * x + (y - 0.5) * (y - 0.5) < 0.25;
    let outside_lower = x * x + (y + 0.5) * (y + 0.5) >= 0.25;
    Ok(usize::from(upper || (outside_lower && x < 0.0)))
}

/// Same rule on lattice coordinates `(i/R, j/R)`, in exact integer
/// arithmetic (all quantities scaled by `4R²`).
fn lattice_label(i: i64, j: i64, r: i64) -> usize {
    let lhs_x = 4 * i * i;
    let upper = lhs_x + (2 * j - r) * (2 * j - r) < r * r;
    let outside_lower = lhs_x + (2 * j + r) * (2 * j + r) >= r * r;
    usize::from(upper || (outside_lower && i < 0))
}

/// Lattice points strictly inside the unit circle, row-major (`j` outer,
/// `i` inner, both ascending).
pub fn gen_taiji(spec: TaiJiSpec) -> Result<LabeledDataset> {
    if spec.reciprocal == 0 {
        return Err(Error::InvalidParameter("Tai Ji grid reciprocal must be >= 1".into()));
    }
    let r = i64::from(spec.reciprocal);
    let rf = r as f64;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for j in -r..=r {
        for i in -r..=r {
            if i * i + j * j < r * r {
                features.push(i as f64 / rf);
                features.push(j as f64 / rf);
                labels.push(lattice_label(i, j, r));
            }
        }
    }
    LabeledDataset::new(features, labels, vec![2], 2)
}
