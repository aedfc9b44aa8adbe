use serde::{Deserialize, Serialize};

use crate::datasets::LabeledDataset;
use crate::error::{Error, Result};
use crate::quadcore::{Layer, Network};
use crate::spectral::{entropy_of_counts, layer_spectrum, TypeMode};
use crate::trainer::{train_with_observer, TrainConfig, TrainReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropySample {
    pub step: u64,
    pub layer: usize,
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropySeries {
    pub cadence: u64,
    pub layers: Vec<usize>,
    /// Grouped by step, then by layer in network order.
    pub samples: Vec<EntropySample>,
}

impl EntropySeries {
    /// Entropies of one layer in step order.
    pub fn layer_values(&self, layer: usize) -> Vec<f64> {
        self.samples.iter().filter(|s| s.layer == layer).map(|s| s.entropy).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,layer,entropy\n");
        for s in &self.samples {
            out.push_str(&format!("{},{},{}\n", s.step, s.layer, s.entropy));
        }
        out
    }
}

/// Layers tracked by default: the conv layers, or every dense layer when
/// there are none.
pub fn analyzed_layers(network: &Network) -> Vec<usize> {
    let layers = network.layers();
    let conv: Vec<usize> = (0..layers.len()).filter(|&i| matches!(layers[i], Layer::Conv(_))).collect();
    if !conv.is_empty() {
        return conv;
    }
    (0..layers.len()).filter(|&i| matches!(layers[i], Layer::Dense(_))).collect()
}

/// Entropy in bits of the simplified gate types across one layer's kernels.
pub fn layer_entropy(network: &Network, layer: usize, epsilon_rel: f64) -> Result<f64> {
    let l = network
        .layers()
        .get(layer)
        .ok_or_else(|| Error::InvalidParameter(format!("no layer {layer}")))?;
    entropy_of_counts(&layer_spectrum(l, TypeMode::Simplified, epsilon_rel)?.counts)
}

/// Trains once, recording each analyzed layer's entropy every `cadence`
/// steps (step 0 excluded).
pub fn entropy_dynamics(
    network: Network,
    dataset: &LabeledDataset,
    config: &TrainConfig,
    cadence: u64,
    layers: &[usize],
    epsilon_rel: f64,
) -> Result<(EntropySeries, TrainReport)> {
    if cadence == 0 {
        return Err(Error::InvalidParameter("cadence must be at least 1".into()));
    }
    if let Some(&bad) = layers.iter().find(|&&i| network.layers().get(i).and_then(Layer::neurons).is_none()) {
        return Err(Error::InvalidParameter(format!("layer {bad} has no kernels to analyze")));
    }
    let mut samples = Vec::new();
    let report = train_with_observer(network, dataset, config, |step, net| {
        if step % cadence == 0 {
            for &layer in layers {
                samples.push(EntropySample { step, layer, entropy: layer_entropy(net, layer, epsilon_rel)? });
            }
        }
        Ok(())
    })?;
    Ok((EntropySeries { cadence, layers: layers.to_vec(), samples }, report))
}

/// Population standard deviation.
pub fn std_dev(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::gen_xor;
    use crate::quadcore::Activation;
    use crate::spectral::DEFAULT_EPSILON_REL;
    use crate::trainer::{apply_init, BatchMode, InitScheme, LossKind, LrSchedule, Optimizer, Reduction};

    fn cfg(iterations: u64, init: InitScheme) -> TrainConfig {
        TrainConfig {
            seed: 1,
            schedule: LrSchedule::constant(iterations, 0.1).unwrap(),
            iterations,
            batch: BatchMode::FullBatch,
            init,
            loss: LossKind::Mse,
            reduction: Reduction::Mean,
            optimizer: Optimizer::Sgd,
            checkpoints: Vec::new(),
        }
    }

    #[test]
    fn sample_count_follows_cadence() {
        let net = Network::mlp(&[2, 4, 1], Activation::Sigmoid, Activation::Sigmoid).unwrap();
        let layers = analyzed_layers(&net);
        assert_eq!(layers, vec![0, 1]);
        let (series, _) =
            entropy_dynamics(net, &gen_xor(), &cfg(50, InitScheme::TruncatedGaussian { sigma: 0.5 }), 10, &layers, DEFAULT_EPSILON_REL)
                .unwrap();
        assert_eq!(series.layer_values(0).len(), 5);
        assert_eq!(series.samples[0].step, 10);
        assert!(series.samples.iter().all(|s| s.entropy >= 0.0 && s.entropy <= 3f64.log2() + 1e-12));
        let csv = series.to_csv();
        assert!(csv.starts_with("step,layer,entropy\n10,0,"));
        assert_eq!(csv.lines().count(), 11);
    }

    #[test]
    fn linear_collapse_starts_at_zero_entropy() {
        let mut net = Network::mlp(&[2, 6, 1], Activation::Sigmoid, Activation::Sigmoid).unwrap();
        apply_init(&mut net, InitScheme::LinearCollapse, 9).unwrap();
        assert_eq!(layer_entropy(&net, 0, DEFAULT_EPSILON_REL).unwrap(), 0.0);
    }

    #[test]
    fn unchanged_network_has_constant_entropy() {
        let mut net = Network::mlp(&[2, 6, 1], Activation::Sigmoid, Activation::Sigmoid).unwrap();
        apply_init(&mut net, InitScheme::TruncatedGaussian { sigma: 1.0 }, 4).unwrap();
        let first = layer_entropy(&net, 0, DEFAULT_EPSILON_REL).unwrap();
        for _ in 0..5 {
            assert_eq!(layer_entropy(&net, 0, DEFAULT_EPSILON_REL).unwrap(), first);
        }
    }

    #[test]
    fn rejects_pool_layers_and_zero_cadence() {
        let net = Network::mlp(&[2, 2, 1], Activation::Sigmoid, Activation::Sigmoid).unwrap();
        let c = cfg(2, InitScheme::Keep);
        assert!(entropy_dynamics(net.clone(), &gen_xor(), &c, 0, &[0], DEFAULT_EPSILON_REL).is_err());
        assert!(entropy_dynamics(net, &gen_xor(), &c, 1, &[5], DEFAULT_EPSILON_REL).is_err());
    }

    #[test]
    fn std_dev_examples() {
        assert_eq!(std_dev(&[1.0, 1.0]), 0.0);
        assert_eq!(std_dev(&[0.0, 2.0]), 1.0);
    }
}
