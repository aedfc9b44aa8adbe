use serde::{Deserialize, Serialize};

use crate::quadcore::{Activation, ForwardTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LossKind {
    /// Mean over output components of `(o − t)²`; a single output is
    /// compared with the label itself, several outputs with its one-hot code.
    Mse,
    /// `−ln o_label` on a softmax output.
    CrossEntropy,
    /// `−[y ln o + (1 − y) ln(1 − o)]` on a single sigmoid output.
    BinaryCrossEntropy,
}

/// How per-example losses combine into the batch objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reduction {
    Mean,
    Sum,
}

/// Where a loss gradient should be injected into the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradSite {
    Output,
    PreActivation,
}

fn target(label: usize, k: usize, width: usize) -> f64 {
    if width == 1 {
        label as f64
    } else {
        f64::from(u8::from(label == k))
    }
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl LossKind {
    /// Loss of one example from its output (and pre-activation `logits`
    /// when available, for numerically stable fused forms).
    pub fn value(self, output: &[f64], logits: Option<&[f64]>, final_act: Option<Activation>, label: usize) -> f64 {
        match self {
            LossKind::Mse => {
                let w = output.len();
                output
                    .iter()
                    .enumerate()
                    .map(|(k, &o)| (o - target(label, k, w)).powi(2))
                    .sum::<f64>()
                    / w as f64
            }
            LossKind::CrossEntropy => match (final_act, logits) {
                (Some(Activation::Softmax), Some(z)) => {
                    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
                    lse - z[label]
                }
                _ => -output[label].ln(),
            },
            LossKind::BinaryCrossEntropy => {
                let y = label as f64;
                match (final_act, logits) {
                    (Some(Activation::Sigmoid), Some(z)) => softplus(z[0]) - y * z[0],
                    _ => -(y * output[0].ln() + (1.0 - y) * (1.0 - output[0]).ln()),
                }
            }
        }
    }

    /// Gradient of [`LossKind::value`], written into `grad`, and the site it
    /// refers to.
    pub fn gradient(self, output: &[f64], final_act: Option<Activation>, label: usize, grad: &mut Vec<f64>) -> GradSite {
        grad.clear();
        let w = output.len();
        match self {
            LossKind::Mse => {
                grad.extend(output.iter().enumerate().map(|(k, &o)| 2.0 * (o - target(label, k, w)) / w as f64));
                GradSite::Output
            }
            LossKind::CrossEntropy => {
                if final_act == Some(Activation::Softmax) {
                    grad.extend(output.iter().enumerate().map(|(k, &s)| s - target(label, k, w.max(2))));
                    GradSite::PreActivation
                } else {
                    grad.extend((0..w).map(|k| if k == label { -1.0 / output[k] } else { 0.0 }));
                    GradSite::Output
                }
            }
            LossKind::BinaryCrossEntropy => {
                let y = label as f64;
                let o = output[0];
                if final_act == Some(Activation::Sigmoid) {
                    grad.push(o - y);
                    GradSite::PreActivation
                } else {
                    grad.push(-(y / o) + (1.0 - y) / (1.0 - o));
                    GradSite::Output
                }
            }
        }
    }

    pub fn value_from_trace(self, trace: &ForwardTrace, final_act: Option<Activation>, label: usize) -> f64 {
        self.value(trace.output(), trace.logits(), final_act, label)
    }
}
