use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shannon entropy in bits of a probability vector. Zero-probability terms
/// contribute nothing.
pub fn entropy_bits(probabilities: &[f64]) -> Result<f64> {
    if let Some(&p) = probabilities.iter().find(|&&p| p < 0.0 || p.is_nan()) {
        return Err(Error::NegativeProbability(p));
    }
    let sum: f64 = probabilities.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("probabilities sum to {sum}, not 1")));
    }
    Ok(probabilities.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum())
}

/// Entropy of the distribution obtained by normalizing `counts`.
pub fn entropy_of_counts(counts: &[usize]) -> Result<f64> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyInput("entropy of an all-zero histogram"));
    }
    let p: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    entropy_bits(&p)
}

/// One trained network: its spectrum key, training and test accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaSurveyRecord {
    pub key: Vec<usize>,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub seed: u64,
}

/// Frequency of one spectrum key across a set of records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyFrequency {
    pub key: Vec<usize>,
    pub count: usize,
    pub frequency: f64,
    pub mean_test_accuracy: f64,
}

/// Keys ordered by descending count, then lexicographically.
pub fn frequency_table(records: &[MinimaSurveyRecord]) -> Result<Vec<KeyFrequency>> {
    if records.is_empty() {
        return Err(Error::EmptyInput("no survey records"));
    }
    let mut groups: BTreeMap<&[usize], (usize, f64)> = BTreeMap::new();
    for r in records {
        let e = groups.entry(&r.key).or_insert((0, 0.0));
        e.0 += 1;
        e.1 += r.test_accuracy;
    }
    let total = records.len() as f64;
    let mut table: Vec<KeyFrequency> = groups
        .into_iter()
        .map(|(key, (count, acc))| KeyFrequency {
            key: key.to_vec(),
            count,
            frequency: count as f64 / total,
            mean_test_accuracy: acc / count as f64,
        })
        .collect();
    // BTreeMap order is lexicographic; a stable sort keeps it within ties.
    table.sort_by(|a, b| b.count.cmp(&a.count));
    Ok(table)
}

/// Entropy of good minima: spectrum keys stand in for minima.
pub fn egm(records: &[MinimaSurveyRecord]) -> Result<f64> {
    let p: Vec<f64> = frequency_table(records)?.iter().map(|k| k.frequency).collect();
    entropy_bits(&p)
}

/// Population variance of the key frequencies.
pub fn frequency_variance(records: &[MinimaSurveyRecord]) -> Result<f64> {
    let p: Vec<f64> = frequency_table(records)?.iter().map(|k| k.frequency).collect();
    let mean = p.iter().sum::<f64>() / p.len() as f64;
    Ok(p.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / p.len() as f64)
}

/// `Σ p_i K_i` with `p_i` the key frequency and `K_i` the mean test
/// accuracy of that key.
pub fn m_measure(records: &[MinimaSurveyRecord]) -> Result<f64> {
    if let Some(r) = records.iter().find(|r| !(0.0..=1.0).contains(&r.test_accuracy)) {
        return Err(Error::InvalidParameter(format!("test accuracy {} outside [0, 1]", r.test_accuracy)));
    }
    Ok(frequency_table(records)?.iter().map(|k| k.frequency * k.mean_test_accuracy).sum())
}
