use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadcore::{Gradients, Network};

/// Update rule applied to each gradient.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum Optimizer {
    /// `θ ← θ − η g`.
    #[default]
    Sgd,
    /// Adam with bias-corrected first and second moments.
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
}

impl Optimizer {
    pub const ADAM: Optimizer = Optimizer::Adam { beta1: 0.9, beta2: 0.999, epsilon: 1e-8 };

    pub fn validate(&self) -> Result<()> {
        if let Optimizer::Adam { beta1, beta2, epsilon } = *self {
            let unit = |b: f64| (0.0..1.0).contains(&b);
            if !unit(beta1) || !unit(beta2) || !(epsilon > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "Adam needs betas in [0, 1) and epsilon > 0, got {beta1}, {beta2}, {epsilon}"
                )));
            }
        }
        Ok(())
    }
}

/// Optimizer plus whatever per-parameter state it keeps.
#[derive(Debug, Clone)]
pub(crate) struct OptimizerState {
    kind: Optimizer,
    m: Vec<f64>,
    v: Vec<f64>,
    steps: i32,
}

impl OptimizerState {
    pub(crate) fn new(kind: Optimizer, network: &Network) -> Self {
        let n = match kind {
            Optimizer::Sgd => 0,
            Optimizer::Adam { .. } => network.param_count(),
        };
        OptimizerState { kind, m: vec![0.0; n], v: vec![0.0; n], steps: 0 }
    }

    pub(crate) fn step(&mut self, network: &mut Network, grads: &Gradients, rate: f64) {
        match self.kind {
            Optimizer::Sgd => network.apply_gradients(grads, rate),
            Optimizer::Adam { beta1, beta2, epsilon } => {
                self.steps = self.steps.saturating_add(1);
                let c1 = 1.0 - beta1.powi(self.steps);
                let c2 = 1.0 - beta2.powi(self.steps);
                let state = self.m.iter_mut().zip(self.v.iter_mut());
                for ((theta, &g), (m, v)) in network.params_mut().zip(grads.params()).zip(state) {
                    *m = beta1 * *m + (1.0 - beta1) * g;
                    *v = beta2 * *v + (1.0 - beta2) * g * g;
                    *theta -= rate * (*m / c1) / ((*v / c2).sqrt() + epsilon);
                }
            }
        }
    }
}
