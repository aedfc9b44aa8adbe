use serde::{Deserialize, Serialize};

use super::eigen::eigen_symmetric;
use super::inertia::{classify_inertia, full_types, type_count, InertiaSignature, TypeMode};
use super::jmatrix::build_j_matrix;
use crate::error::{Error, Result};
use crate::quadcore::{Layer, Network, QuadraticNeuron};

/// Gate-type tally of one layer, stored densely in canonical key order:
/// simplified mode counts positive-index values `n, n−1, …, 0`; full mode
/// follows [`full_types`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LayerSpectrum {
    pub mode: TypeMode,
    /// Neuron input dimension.
    pub inputs: usize,
    pub counts: Vec<usize>,
}

impl LayerSpectrum {
    /// Canonical key, e.g. `[2, 3, 1]` for six 2-input neurons.
    pub fn key(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Count of neurons whose simplified type (positive-index count) is `k`.
    /// Only meaningful in simplified mode.
    pub fn simplified_count(&self, k: usize) -> usize {
        self.counts[self.inputs - k]
    }

    /// Histogram indexed by positive-index count `0..=n` (ascending).
    pub fn positive_index_histogram(&self) -> Vec<usize> {
        match self.mode {
            TypeMode::Simplified => self.counts.iter().rev().copied().collect(),
            TypeMode::Full => {
                let mut h = vec![0; self.inputs + 1];
                for (sig, &c) in full_types(self.inputs).iter().zip(&self.counts) {
                    h[sig.n_pos] += c;
                }
                h
            }
        }
    }
}

pub fn neuron_signature(neuron: &QuadraticNeuron, epsilon_rel: f64) -> Result<InertiaSignature> {
    classify_inertia(&eigen_symmetric(&build_j_matrix(neuron))?, epsilon_rel)
}

pub fn neurons_spectrum(neurons: &[QuadraticNeuron], mode: TypeMode, epsilon_rel: f64) -> Result<LayerSpectrum> {
    let first = neurons.first().ok_or(Error::EmptyInput("layer spectrum needs at least one neuron"))?;
    let n = first.inputs();
    let mut counts = vec![0; type_count(n, mode)?];
    let full = if mode == TypeMode::Full { full_types(n) } else { Vec::new() };
    for neuron in neurons {
        let sig = neuron_signature(neuron, epsilon_rel)?;
        let slot = match mode {
            TypeMode::Simplified => n - sig.simplified(),
            TypeMode::Full => full.iter().position(|t| *t == sig).expect("signature of dimension n"),
        };
        counts[slot] += 1;
    }
    Ok(LayerSpectrum { mode, inputs: n, counts })
}

pub fn layer_spectrum(layer: &Layer, mode: TypeMode, epsilon_rel: f64) -> Result<LayerSpectrum> {
    let neurons = layer
        .neurons()
        .ok_or_else(|| Error::InvalidParameter("pooling layers have no spectrum".into()))?;
    neurons_spectrum(neurons, mode, epsilon_rel)
}

/// Per-layer spectra of the selected parametric layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpectrum {
    /// `(layer index, spectrum)` pairs in network order.
    pub layers: Vec<(usize, LayerSpectrum)>,
}

/// Spectra of every parametric layer whose index passes `select`.
pub fn network_spectrum(
    network: &Network,
    mode: TypeMode,
    epsilon_rel: f64,
    mut select: impl FnMut(usize, &Layer) -> bool,
) -> Result<NetworkSpectrum> {
    let mut layers = Vec::new();
    for (i, layer) in network.layers().iter().enumerate() {
        if layer.neurons().is_some() && select(i, layer) {
            layers.push((i, layer_spectrum(layer, mode, epsilon_rel)?));
        }
    }
    Ok(NetworkSpectrum { layers })
}

/// Index of the first parametric layer.
pub fn first_hidden_layer(network: &Network) -> Option<usize> {
    network.layers().iter().position(|l| l.neurons().is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_input(w_r: [f64; 2], w_g: [f64; 2], w_b: [f64; 2]) -> QuadraticNeuron {
        QuadraticNeuron::new(w_r.to_vec(), w_g.to_vec(), w_b.to_vec(), 0.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn compact_key_of_a_six_neuron_layer() {
        let pp = two_input([0.0; 2], [0.0; 2], [1.0, 2.0]);
        let pm = two_input([0.0; 2], [0.0; 2], [1.0, -2.0]);
        let mm = two_input([0.0; 2], [0.0; 2], [-1.0, -0.5]);
        let neurons = vec![pp.clone(), pm.clone(), mm, pm.clone(), pp, pm];
        let s = neurons_spectrum(&neurons, TypeMode::Simplified, 1e-6).unwrap();
        assert_eq!(s.key(), &[2, 3, 1]);
        assert_eq!(s.positive_index_histogram(), vec![1, 3, 2]);
        let f = neurons_spectrum(&neurons, TypeMode::Full, 1e-6).unwrap();
        assert_eq!(f.total(), 6);
        assert_eq!(f.positive_index_histogram(), vec![1, 3, 2]);
    }

    #[test]
    fn identical_neurons_one_bin() {
        let n = two_input([1.0, 0.5], [-0.3, 0.2], [0.1, 0.0]);
        let s = neurons_spectrum(&vec![n; 5], TypeMode::Full, 1e-6).unwrap();
        assert_eq!(s.counts.iter().filter(|&&c| c > 0).count(), 1);
        assert_eq!(s.total(), 5);
    }

    #[test]
    fn linear_collapse_neurons_are_all_zero_type() {
        let n = QuadraticNeuron::linear(vec![0.3; 9], 0.0);
        let sig = neuron_signature(&n, 1e-6).unwrap();
        assert_eq!(sig, InertiaSignature { n_pos: 0, n_neg: 0, n_zero: 9 });
        let s = neurons_spectrum(&vec![n; 4], TypeMode::Simplified, 1e-6).unwrap();
        assert_eq!(s.simplified_count(9), 4);
    }

    #[test]
    fn empty_layer_rejected() {
        assert!(neurons_spectrum(&[], TypeMode::Full, 1e-6).is_err());
    }
}
