use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadcore::Network;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InitScheme {
    /// Every weight and bias from `N(0, σ²)`, resampling beyond `±2σ`.
    TruncatedGaussian { sigma: f64 },
    /// Xavier-uniform `w_r`, with the quadratic part switched off
    /// (`w_g = w_b = 0`, `b_r = 0`, `b_g = 1`, `c = 0`).
    LinearCollapse,
    /// Leave parameters untouched.
    Keep,
}

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn truncated_gaussian<R: Rng>(rng: &mut R, sigma: f64) -> f64 {
    loop {
        let z: f64 = rng.sample(StandardNormal);
        if z.abs() <= 2.0 {
            return sigma * z;
        }
    }
}

pub fn init_truncated_gaussian(network: &mut Network, sigma: f64, seed: u64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    let mut rng = rng_for(seed, 0);
    for v in network.params_mut() {
        *v = truncated_gaussian(&mut rng, sigma);
    }
    Ok(())
}

/// Fan-in is the neuron input length; fan-out is the number of neurons
/// (or kernels) in the layer.
pub fn xavier_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

pub fn init_linear_collapse(network: &mut Network, seed: u64) {
    let mut rng = rng_for(seed, 0);
    for neurons in network.parametric_layers_mut() {
        let bound = xavier_bound(neurons[0].inputs(), neurons.len());
        for n in neurons.iter_mut() {
            for w in n.w_r.iter_mut() {
                *w = rng.random_range(-bound..=bound);
            }
            n.w_g.fill(0.0);
            n.w_b.fill(0.0);
            n.b_r = 0.0;
            n.b_g = 1.0;
            n.c = 0.0;
        }
    }
}
