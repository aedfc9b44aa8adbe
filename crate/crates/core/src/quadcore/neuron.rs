use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A second-order unit computing
/// `(w_r·x + b_r)(w_g·x + b_g) + w_b·(x⊙x) + c`.
///
/// With `w_g = 0`, `w_b = 0`, `b_g = 1` and `c = 0` it is exactly the
/// first-order neuron `w_r·x + b_r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticNeuron {
    pub w_r: Vec<f64>,
    pub w_g: Vec<f64>,
    pub w_b: Vec<f64>,
    pub b_r: f64,
    pub b_g: f64,
    pub c: f64,
}

/// Parameter-shaped gradient of a single neuron, plus the input gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuronBackward {
    pub params: QuadraticNeuron,
    pub x: Vec<f64>,
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

impl QuadraticNeuron {
    pub fn new(
        w_r: Vec<f64>,
        w_g: Vec<f64>,
        w_b: Vec<f64>,
        b_r: f64,
        b_g: f64,
        c: f64,
    ) -> Result<Self> {
        let n = w_r.len();
        if n == 0 {
            return Err(Error::InvalidParameter("neuron needs at least one input".into()));
        }
        for len in [w_g.len(), w_b.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, got: len });
            }
        }
        Ok(QuadraticNeuron { w_r, w_g, w_b, b_r, b_g, c })
    }

    /// All-zero parameters. Used as a gradient accumulator and as the blank
    /// state before initialization.
    pub fn zeros(n: usize) -> Self {
        QuadraticNeuron {
            w_r: vec![0.0; n],
            w_g: vec![0.0; n],
            w_b: vec![0.0; n],
            b_r: 0.0,
            b_g: 0.0,
            c: 0.0,
        }
    }

    /// A first-order neuron `w·x + b` embedded as a quadratic one.
    pub fn linear(w: Vec<f64>, b: f64) -> Self {
        let n = w.len();
        QuadraticNeuron {
            w_r: w,
            w_g: vec![0.0; n],
            w_b: vec![0.0; n],
            b_r: b,
            b_g: 1.0,
            c: 0.0,
        }
    }

    pub fn inputs(&self) -> usize {
        self.w_r.len()
    }

    pub fn param_count(&self) -> usize {
        3 * self.inputs() + 3
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.inputs() {
            return Err(Error::DimensionMismatch { expected: self.inputs(), got: x.len() });
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        Ok(self.eval(x).2)
    }

    /// Returns `(p, q, f)` with `p = w_r·x + b_r`, `q = w_g·x + b_g`.
    /// The caller guarantees `x.len() == self.inputs()`.
    #[inline]
    pub(crate) fn eval(&self, x: &[f64]) -> (f64, f64, f64) {
        let mut p = self.b_r;
        let mut q = self.b_g;
        let mut s = self.c;
        for (i, &xi) in x.iter().enumerate() {
            p += self.w_r[i] * xi;
            q += self.w_g[i] * xi;
            s += self.w_b[i] * xi * xi;
        }
        (p, q, p * q + s)
    }

    pub fn backward(&self, x: &[f64], upstream: f64) -> Result<NeuronBackward> {
        self.check_input(x)?;
        let n = self.inputs();
        let mut params = QuadraticNeuron::zeros(n);
        let mut dx = vec![0.0; n];
        let p = dot(&self.w_r, x) + self.b_r;
        let q = dot(&self.w_g, x) + self.b_g;
        self.accumulate(x, p, q, upstream, &mut params, &mut dx);
        Ok(NeuronBackward { params, x: dx })
    }

    /// Adds `upstream · ∂f/∂θ` into `grad` and `upstream · ∂f/∂x` into `dx`.
    #[inline]
    pub(crate) fn accumulate(
        &self,
        x: &[f64],
        p: f64,
        q: f64,
        upstream: f64,
        grad: &mut QuadraticNeuron,
        dx: &mut [f64],
    ) {
        let gq = upstream * q;
        let gp = upstream * p;
        for (i, &xi) in x.iter().enumerate() {
            grad.w_r[i] += gq * xi;
            grad.w_g[i] += gp * xi;
            grad.w_b[i] += upstream * xi * xi;
            dx[i] += gq * self.w_r[i] + gp * self.w_g[i] + 2.0 * upstream * self.w_b[i] * xi;
        }
        grad.b_r += gq;
        grad.b_g += gp;
        grad.c += upstream;
    }

    /// Parameter-wise accumulation without an input gradient.
    #[inline]
    pub(crate) fn accumulate_params(
        x: &[f64],
        p: f64,
        q: f64,
        upstream: f64,
        grad: &mut QuadraticNeuron,
    ) {
        let gq = upstream * q;
        let gp = upstream * p;
        for (i, &xi) in x.iter().enumerate() {
            grad.w_r[i] += gq * xi;
            grad.w_g[i] += gp * xi;
            grad.w_b[i] += upstream * xi * xi;
        }
        grad.b_r += gq;
        grad.b_g += gp;
        grad.c += upstream;
    }

    /// `self += scale · other`, field by field.
    pub fn add_scaled(&mut self, other: &QuadraticNeuron, scale: f64) {
        for (a, b) in self.w_r.iter_mut().zip(&other.w_r) {
            *a += scale * b;
        }
        for (a, b) in self.w_g.iter_mut().zip(&other.w_g) {
            *a += scale * b;
        }
        for (a, b) in self.w_b.iter_mut().zip(&other.w_b) {
            *a += scale * b;
        }
        self.b_r += scale * other.b_r;
        self.b_g += scale * other.b_g;
        self.c += scale * other.c;
    }

    pub fn fill(&mut self, value: f64) {
        self.w_r.fill(value);
        self.w_g.fill(value);
        self.w_b.fill(value);
        self.b_r = value;
        self.b_g = value;
        self.c = value;
    }

    /// Parameters in the fixed order `w_r, w_g, w_b, b_r, b_g, c`.
    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.w_r
            .iter()
            .chain(&self.w_g)
            .chain(&self.w_b)
            .chain([&self.b_r, &self.b_g, &self.c])
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.w_r
            .iter_mut()
            .chain(self.w_g.iter_mut())
            .chain(self.w_b.iter_mut())
            .chain([&mut self.b_r, &mut self.b_g, &mut self.c])
    }

    pub fn is_finite(&self) -> bool {
        self.params().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn xor_neuron() -> QuadraticNeuron {
        QuadraticNeuron::new(vec![1.0, 1.0], vec![-1.0, -1.0], vec![0.0, 0.0], -0.5, 1.5, 0.0)
            .unwrap()
    }

    #[test]
    fn xor_neuron_values() {
        let n = xor_neuron();
        let cases = [([0.0, 0.0], -0.75), ([1.0, 0.0], 0.25), ([0.0, 1.0], 0.25), ([1.0, 1.0], -0.75)];
        for (x, want) in cases {
            assert!((n.forward(&x).unwrap() - want).abs() < 1e-15, "x={x:?}");
        }
    }

    #[test]
    fn linear_collapse_is_first_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let w: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let b = rng.random_range(-1.0..1.0);
            let x: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
            let n = QuadraticNeuron::linear(w.clone(), b);
            let want = w.iter().zip(&x).fold(b, |acc, (wi, xi)| acc + wi * xi);
            assert_eq!(n.forward(&x).unwrap(), want);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let n = xor_neuron();
        assert!(matches!(n.forward(&[1.0]), Err(Error::DimensionMismatch { expected: 2, got: 1 })));
        assert!(n.backward(&[1.0, 2.0, 3.0], 1.0).is_err());
        assert!(QuadraticNeuron::new(vec![1.0], vec![1.0, 2.0], vec![0.0], 0.0, 0.0, 0.0).is_err());
        assert!(QuadraticNeuron::new(vec![], vec![], vec![], 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn zero_upstream_gives_zero_gradients() {
        let g = xor_neuron().backward(&[0.3, -0.7], 0.0).unwrap();
        assert!(g.params.params().all(|&v| v == 0.0));
        assert!(g.x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn xor_neuron_bias_partials() {
        let g = xor_neuron().backward(&[1.0, 0.0], 1.0).unwrap();
        assert_eq!(g.params.b_r, 0.5);
        assert_eq!(g.params.b_g, 0.5);
        assert_eq!(g.params.c, 1.0);
    }

    fn rel_err(a: f64, b: f64) -> f64 {
        let d = (a - b).abs();
        if d < 1e-8 {
            0.0
        } else {
            d / a.abs().max(b.abs())
        }
    }

    #[test]
    fn partials_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-5;
        for _ in 0..40 {
            let n = 1 + rng.random_range(0..5);
            let mut neuron = QuadraticNeuron::zeros(n);
            neuron.params_mut().for_each(|v| *v = rng.random_range(-1.0..1.0));
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let up = rng.random_range(-2.0..2.0);
            let g = neuron.backward(&x, up).unwrap();

            let analytic: Vec<f64> = g.params.params().copied().collect();
            for (k, &a) in analytic.iter().enumerate() {
                let mut plus = neuron.clone();
                *plus.params_mut().nth(k).unwrap() += h;
                let mut minus = neuron.clone();
                *minus.params_mut().nth(k).unwrap() -= h;
                let fd = up * (plus.forward(&x).unwrap() - minus.forward(&x).unwrap()) / (2.0 * h);
                assert!(rel_err(a, fd) < 1e-6, "param {k}: {a} vs {fd}");
            }
            for i in 0..n {
                let mut xp = x.clone();
                xp[i] += h;
                let mut xm = x.clone();
                xm[i] -= h;
                let fd = up * (neuron.forward(&xp).unwrap() - neuron.forward(&xm).unwrap()) / (2.0 * h);
                assert!(rel_err(g.x[i], fd) < 1e-6, "x{i}: {} vs {fd}", g.x[i]);
            }
        }
    }
}
