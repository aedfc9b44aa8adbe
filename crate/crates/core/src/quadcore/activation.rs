use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Activation {
    Identity,
    ReLU,
    Sigmoid,
    /// Normalizes the whole layer output into a probability vector.
    Softmax,
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl Activation {
    pub fn apply(self, z: &[f64], out: &mut [f64]) {
        match self {
            Activation::Identity => out.copy_from_slice(z),
            Activation::ReLU => {
                for (o, &v) in out.iter_mut().zip(z) {
                    *o = v.max(0.0);
                }
            }
            Activation::Sigmoid => {
                for (o, &v) in out.iter_mut().zip(z) {
                    *o = sigmoid(v);
                }
            }
            Activation::Softmax => {
                let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut sum = 0.0;
                for (o, &v) in out.iter_mut().zip(z) {
                    *o = (v - max).exp();
                    sum += *o;
                }
                for o in out.iter_mut() {
                    *o /= sum;
                }
            }
        }
    }

    /// Maps `grad` (w.r.t. the activation output `a`, computed from `z`)
    /// to the gradient w.r.t. `z`, in place.
    pub fn backprop(self, z: &[f64], a: &[f64], grad: &mut [f64]) {
        match self {
            Activation::Identity => {}
            Activation::ReLU => {
                for (g, &v) in grad.iter_mut().zip(z) {
                    if v <= 0.0 {
                        *g = 0.0;
                    }
                }
            }
            Activation::Sigmoid => {
                for (g, &s) in grad.iter_mut().zip(a) {
                    *g *= s * (1.0 - s);
                }
            }
            Activation::Softmax => {
                let dot: f64 = grad.iter().zip(a).map(|(g, s)| g * s).sum();
                for (g, &s) in grad.iter_mut().zip(a) {
                    *g = s * (*g - dot);
                }
            }
        }
    }
}
