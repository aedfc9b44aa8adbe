use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{frequency_table, KeyFrequency, MinimaSurveyRecord};

/// Generalization of the `k` most frequent spectrum keys against the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpFlatSplit {
    pub k: usize,
    pub top_keys: Vec<Vec<usize>>,
    /// Share of records whose key is in the top group.
    pub top_frequency: f64,
    /// Mean test accuracy over the records of each group.
    pub top_mean_accuracy: f64,
    pub rest_mean_accuracy: f64,
    /// `top_mean_accuracy − rest_mean_accuracy`.
    pub difference: f64,
    /// Every key, most frequent first (ties in lexicographic key order).
    pub per_key: Vec<KeyFrequency>,
}

pub fn sharp_vs_flat(records: &[MinimaSurveyRecord], k: usize) -> Result<SharpFlatSplit> {
    let table = frequency_table(records)?;
    if k == 0 || k >= table.len() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must be in 1..{} (the number of distinct keys)",
            table.len()
        )));
    }
    let (top, rest) = table.split_at(k);
    let group_mean = |group: &[KeyFrequency]| {
        let n: usize = group.iter().map(|f| f.count).sum();
        let sum: f64 = group.iter().map(|f| f.mean_test_accuracy * f.count as f64).sum();
        sum / n as f64
    };
    let top_mean_accuracy = group_mean(top);
    let rest_mean_accuracy = group_mean(rest);
    Ok(SharpFlatSplit {
        k,
        top_keys: top.iter().map(|f| f.key.clone()).collect(),
        top_frequency: top.iter().map(|f| f.count).sum::<usize>() as f64 / records.len() as f64,
        top_mean_accuracy,
        rest_mean_accuracy,
        difference: top_mean_accuracy - rest_mean_accuracy,
        per_key: table,
    })
}
