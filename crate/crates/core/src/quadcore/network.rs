use serde::{Deserialize, Serialize};

use super::activation::Activation;
use super::layer::{DenseQuadraticLayer, Layer, MaxPool, QuadConvLayer};
use super::neuron::QuadraticNeuron;
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// A feed-forward stack of quadratic layers and pooling. Layer shape
/// compatibility is checked once at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkDef", into = "NetworkDef")]
pub struct Network {
    input_shape: Vec<usize>,
    layers: Vec<Layer>,
    /// Output shape of every layer.
    shapes: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct NetworkDef {
    input_shape: Vec<usize>,
    layers: Vec<Layer>,
}

impl TryFrom<NetworkDef> for Network {
    type Error = Error;

    fn try_from(def: NetworkDef) -> Result<Self> {
        Network::new(def.input_shape, def.layers)
    }
}

impl From<Network> for NetworkDef {
    fn from(net: Network) -> Self {
        NetworkDef { input_shape: net.input_shape, layers: net.layers }
    }
}

/// Intermediate values of one forward pass, consumed by [`Network::backward`].
#[derive(Debug, Clone, Default)]
pub struct ForwardTrace {
    input: Vec<f64>,
    caches: Vec<LayerCache>,
    scratch: (Vec<f64>, Vec<f64>),
}

#[derive(Debug, Clone)]
enum LayerCache {
    Dense { p: Vec<f64>, q: Vec<f64>, z: Vec<f64>, a: Vec<f64> },
    Conv { z: Vec<f64>, a: Vec<f64> },
    Pool { argmax: Vec<usize>, out: Vec<f64> },
}

impl LayerCache {
    fn output(&self) -> &[f64] {
        match self {
            LayerCache::Dense { a, .. } | LayerCache::Conv { a, .. } => a,
            LayerCache::Pool { out, .. } => out,
        }
    }
}

impl ForwardTrace {
    pub fn output(&self) -> &[f64] {
        self.caches.last().map(LayerCache::output).unwrap_or(&self.input)
    }

    /// Pre-activation values of the final layer, when it is parametric.
    pub fn logits(&self) -> Option<&[f64]> {
        match self.caches.last()? {
            LayerCache::Dense { z, .. } | LayerCache::Conv { z, .. } => Some(z),
            LayerCache::Pool { .. } => None,
        }
    }
}

/// Where the gradient handed to [`Network::backward`] is taken.
#[derive(Debug, Clone, Copy)]
pub enum OutputGrad<'a> {
    /// w.r.t. the network output (after the final activation)
    Output(&'a [f64]),
    /// w.r.t. the final layer's pre-activation, skipping its activation
    PreActivation(&'a [f64]),
}

/// Parameter gradients, laid out like the network: one entry per neuron or
/// kernel of every layer (pooling layers have none).
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Vec<QuadraticNeuron>>,
}

impl Gradients {
    pub fn zeros_like(net: &Network) -> Self {
        let layers = net
            .layers
            .iter()
            .map(|l| match l.neurons() {
                Some(ns) => ns.iter().map(|n| QuadraticNeuron::zeros(n.inputs())).collect(),
                None => Vec::new(),
            })
            .collect();
        Gradients { layers }
    }

    pub fn clear(&mut self) {
        self.layers.iter_mut().flatten().for_each(|n| n.fill(0.0));
    }

    pub fn scale(&mut self, factor: f64) {
        for n in self.layers.iter_mut().flatten() {
            n.params_mut().for_each(|v| *v *= factor);
        }
    }

    /// Same order as [`Network::params`].
    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.layers.iter().flatten().flat_map(QuadraticNeuron::params)
    }

    pub fn add(&mut self, other: &Gradients) {
        for (a, b) in self.layers.iter_mut().flatten().zip(other.layers.iter().flatten()) {
            a.add_scaled(b, 1.0);
        }
    }
}

impl Network {
    pub fn new(input_shape: Vec<usize>, layers: Vec<Layer>) -> Result<Self> {
        if input_shape.is_empty() || input_shape.contains(&0) {
            return Err(Error::InvalidArchitecture(format!("bad input shape {input_shape:?}")));
        }
        if layers.is_empty() {
            return Err(Error::InvalidArchitecture("network without layers".into()));
        }
        let mut shapes = Vec::with_capacity(layers.len());
        let mut current = input_shape.clone();
        for (i, layer) in layers.iter().enumerate() {
            current = layer
                .output_shape(&current)
                .map_err(|e| Error::InvalidArchitecture(format!("layer {i}: {e}")))?;
            shapes.push(current.clone());
        }
        Ok(Network { input_shape, layers, shapes })
    }

    /// Dense quadratic MLP with zero parameters; `widths[0]` is the input
    /// dimension (e.g. `[2, 6, 6, 1]`).
    pub fn mlp(widths: &[usize], hidden: Activation, output: Activation) -> Result<Self> {
        if widths.len() < 2 {
            return Err(Error::InvalidArchitecture(
                "an MLP needs an input width and at least one layer".into(),
            ));
        }
        let last = widths.len() - 2;
        let layers = widths
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let act = if i == last { output } else { hidden };
                DenseQuadraticLayer::zeros(w[0], w[1], act).map(Layer::Dense)
            })
            .collect::<Result<Vec<_>>>()?;
        Network::new(vec![widths[0]], layers)
    }

    pub fn input_shape(&self) -> &[usize] {
        &self.input_shape
    }

    pub fn input_len(&self) -> usize {
        self.input_shape.iter().product()
    }

    pub fn output_shape(&self) -> &[usize] {
        self.shapes.last().expect("network has layers")
    }

    pub fn output_len(&self) -> usize {
        self.output_shape().iter().product()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Mutable access to neurons and kernels; the layer structure itself is
    /// fixed once built.
    pub fn neurons_mut(&mut self) -> impl Iterator<Item = &mut QuadraticNeuron> {
        self.layers.iter_mut().filter_map(Layer::neurons_mut).flatten()
    }

    /// Neurons or kernels of each parametric layer, in order.
    pub fn parametric_layers_mut(&mut self) -> impl Iterator<Item = &mut [QuadraticNeuron]> {
        self.layers.iter_mut().filter_map(Layer::neurons_mut)
    }

    /// Input shape seen by layer `index`.
    pub fn layer_input_shape(&self, index: usize) -> &[usize] {
        if index == 0 {
            &self.input_shape
        } else {
            &self.shapes[index - 1]
        }
    }

    pub fn final_activation(&self) -> Option<Activation> {
        self.layers.last().and_then(Layer::activation)
    }

    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.layers
            .iter()
            .filter_map(Layer::neurons)
            .flatten()
            .flat_map(QuadraticNeuron::params)
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.neurons_mut().flat_map(QuadraticNeuron::params_mut)
    }

    pub fn param_count(&self) -> usize {
        self.params().count()
    }

    pub fn is_finite(&self) -> bool {
        self.params().all(|v| v.is_finite())
    }

    /// Gradient step: `θ ← θ − rate · g`.
    pub fn apply_gradients(&mut self, grads: &Gradients, rate: f64) {
        let layers = self.layers.iter_mut().filter_map(Layer::neurons_mut);
        let glayers = grads.layers.iter().filter(|g| !g.is_empty());
        for (ns, gs) in layers.zip(glayers) {
            for (n, g) in ns.iter_mut().zip(gs) {
                n.add_scaled(g, -rate);
            }
        }
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_len() {
            return Err(Error::DimensionMismatch { expected: self.input_len(), got: input.len() });
        }
        Ok(())
    }

    pub fn forward(&self, input: &Tensor) -> Result<Tensor> {
        if input.shape() != self.input_shape.as_slice() && input.len() != self.input_len() {
            return Err(Error::ShapeMismatch {
                expected: self.input_shape.clone(),
                got: input.shape().to_vec(),
            });
        }
        let out = self.forward_slice(input.data())?;
        Tensor::new(self.output_shape().to_vec(), out)
    }

    /// Forward pass on a flat input, returning the flat output.
    pub fn forward_slice(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let mut current = input.to_vec();
        for (i, layer) in self.layers.iter().enumerate() {
            current = match run_layer(layer, self.layer_input_shape(i), &current) {
                LayerCache::Dense { a, .. } | LayerCache::Conv { a, .. } => a,
                LayerCache::Pool { out, .. } => out,
            };
        }
        Ok(current)
    }

    /// Forward pass keeping everything the backward pass needs.
    pub fn forward_trace(&self, input: &[f64]) -> Result<ForwardTrace> {
        let mut trace = ForwardTrace { input: Vec::new(), caches: Vec::new(), scratch: Default::default() };
        self.forward_trace_into(input, &mut trace)?;
        Ok(trace)
    }

    /// Like [`Network::forward_trace`], reusing the buffers of `trace`.
    pub fn forward_trace_into(&self, input: &[f64], trace: &mut ForwardTrace) -> Result<()> {
        self.check_input(input)?;
        trace.input.clear();
        trace.input.extend_from_slice(input);
        trace.caches.truncate(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate() {
            let (done, rest) = trace.caches.split_at_mut(i);
            let x = done.last().map(LayerCache::output).unwrap_or(&trace.input);
            match rest.first_mut() {
                Some(cache) => run_layer_into(layer, self.layer_input_shape(i), x, cache),
                None => {
                    let cache = run_layer(layer, self.layer_input_shape(i), x);
                    trace.caches.push(cache);
                }
            }
        }
        Ok(())
    }

    pub fn backward(&self, trace: &mut ForwardTrace, grad: OutputGrad<'_>) -> Result<Gradients> {
        let mut grads = Gradients::zeros_like(self);
        self.accumulate_backward(trace, grad, &mut grads)?;
        Ok(grads)
    }

    fn check_trace(&self, trace: &ForwardTrace) -> Result<()> {
        if trace.caches.len() != self.layers.len() || trace.input.len() != self.input_len() {
            return Err(Error::BackwardMismatch("trace was recorded on another network".into()));
        }
        for (i, (layer, cache)) in self.layers.iter().zip(&trace.caches).enumerate() {
            let len: usize = self.shapes[i].iter().product();
            let ok = match (layer, cache) {
                (Layer::Dense(_), LayerCache::Dense { a, .. })
                | (Layer::Conv(_), LayerCache::Conv { a, .. }) => a.len() == len,
                (Layer::MaxPool(_), LayerCache::Pool { out, .. }) => out.len() == len,
                _ => false,
            };
            if !ok {
                return Err(Error::BackwardMismatch(format!("layer {i} does not match the trace")));
            }
        }
        Ok(())
    }

    /// Reverse-mode pass adding parameter gradients into `grads`.
    pub fn accumulate_backward(
        &self,
        trace: &mut ForwardTrace,
        grad: OutputGrad<'_>,
        grads: &mut Gradients,
    ) -> Result<()> {
        self.check_trace(trace)?;
        if grads.layers.len() != self.layers.len() {
            return Err(Error::BackwardMismatch("gradient buffer has the wrong layout".into()));
        }
        let (g, skip_last_activation) = match grad {
            OutputGrad::Output(g) => (g, false),
            OutputGrad::PreActivation(g) => {
                if trace.logits().is_none() {
                    return Err(Error::BackwardMismatch(
                        "final layer has no pre-activation to differentiate".into(),
                    ));
                }
                (g, true)
            }
        };
        if g.len() != self.output_len() {
            return Err(Error::DimensionMismatch { expected: self.output_len(), got: g.len() });
        }
        let ForwardTrace { input: x0, caches, scratch: (up_buf, dx_buf) } = trace;
        let (x0, caches) = (&*x0, &*caches);
        let mut upstream = std::mem::take(up_buf);
        upstream.clear();
        upstream.extend_from_slice(g);
        let mut dx_buf = std::mem::take(dx_buf);

        let last = self.layers.len() - 1;
        for i in (0..self.layers.len()).rev() {
            let input = if i == 0 { x0 } else { caches[i - 1].output() };
            let need_dx = i > 0;
            let skip_act = skip_last_activation && i == last;
            let in_shape = self.layer_input_shape(i);
            let dx = match (&self.layers[i], &caches[i]) {
                (Layer::Dense(layer), LayerCache::Dense { p, q, z, a }) => {
                    if !skip_act {
                        layer.activation.backprop(z, a, &mut upstream);
                    }
                    let mut dx = std::mem::take(&mut dx_buf);
                    dx.clear();
                    dx.resize(if need_dx { input.len() } else { 0 }, 0.0);
                    for (j, neuron) in layer.neurons.iter().enumerate() {
                        let g = upstream[j];
                        if g == 0.0 {
                            continue;
                        }
                        if need_dx {
                            neuron.accumulate(input, p[j], q[j], g, &mut grads.layers[i][j], &mut dx);
                        } else {
                            QuadraticNeuron::accumulate_params(input, p[j], q[j], g, &mut grads.layers[i][j]);
                        }
                    }
                    dx
                }
                (Layer::Conv(layer), LayerCache::Conv { z, a }) => {
                    if !skip_act {
                        layer.activation.backprop(z, a, &mut upstream);
                    }
                    conv_backward(layer, in_shape, input, &upstream, &mut grads.layers[i], need_dx)
                }
                (Layer::MaxPool(_), LayerCache::Pool { argmax, .. }) => {
                    let mut dx = std::mem::take(&mut dx_buf);
                    dx.clear();
                    dx.resize(input.len(), 0.0);
                    for (&src, &g) in argmax.iter().zip(&upstream) {
                        dx[src] += g;
                    }
                    dx
                }
                _ => unreachable!("trace layout checked above"),
            };
            dx_buf = std::mem::replace(&mut upstream, dx);
        }
        trace.scratch = (upstream, dx_buf);
        Ok(())
    }
}

/// Applies one layer to a tensor, independently of any network.
pub fn layer_forward(layer: &Layer, input: &Tensor) -> Result<Tensor> {
    let shape = layer.output_shape(input.shape()).map_err(|_| Error::ShapeMismatch {
        expected: Vec::new(),
        got: input.shape().to_vec(),
    })?;
    let cache = run_layer(layer, input.shape(), input.data());
    Tensor::new(shape, cache.output().to_vec())
}

fn run_layer_into(layer: &Layer, in_shape: &[usize], x: &[f64], cache: &mut LayerCache) {
    match (layer, cache) {
        (Layer::Dense(d), LayerCache::Dense { p, q, z, a }) => {
            let m = d.width();
            for v in [&mut *p, &mut *q, &mut *z, &mut *a] {
                v.resize(m, 0.0);
            }
            for (j, neuron) in d.neurons.iter().enumerate() {
                (p[j], q[j], z[j]) = neuron.eval(x);
            }
            d.activation.apply(z, a);
        }
        (layer, cache) => *cache = run_layer(layer, in_shape, x),
    }
}

fn run_layer(layer: &Layer, in_shape: &[usize], x: &[f64]) -> LayerCache {
    match layer {
        Layer::Dense(d) => {
            let m = d.width();
            let (mut p, mut q, mut z) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
            for (j, neuron) in d.neurons.iter().enumerate() {
                (p[j], q[j], z[j]) = neuron.eval(x);
            }
            let mut a = vec![0.0; m];
            d.activation.apply(&z, &mut a);
            LayerCache::Dense { p, q, z, a }
        }
        Layer::Conv(c) => {
            let (h, w) = (in_shape[1], in_shape[2]);
            let (oh, ow) = c.output_hw(h, w).expect("shape checked at construction");
            let mut z = vec![0.0; c.out_channels() * oh * ow];
            let mut patch = vec![0.0; c.kernel_inputs()];
            for (k, kernel) in c.kernels.iter().enumerate() {
                for oy in 0..oh {
                    for ox in 0..ow {
                        c.gather(x, (h, w), k, oy, ox, &mut patch);
                        z[(k * oh + oy) * ow + ox] = kernel.eval(&patch).2;
                    }
                }
            }
            let mut a = vec![0.0; z.len()];
            c.activation.apply(&z, &mut a);
            LayerCache::Conv { z, a }
        }
        Layer::MaxPool(pool) => {
            let (ch, h, w) = (in_shape[0], in_shape[1], in_shape[2]);
            let (oh, ow) = pool.output_hw(h, w).expect("shape checked at construction");
            let mut out = vec![0.0; ch * oh * ow];
            let mut argmax = vec![0; ch * oh * ow];
            for c in 0..ch {
                for oy in 0..oh {
                    for ox in 0..ow {
                        let mut best = usize::MAX;
                        let mut best_v = f64::NEG_INFINITY;
                        for dy in 0..pool.window {
                            for dx in 0..pool.window {
                                let idx = c * h * w + (oy * pool.stride + dy) * w + ox * pool.stride + dx;
                                // first maximum wins on ties
                                if best == usize::MAX || x[idx] > best_v {
                                    best = idx;
                                    best_v = x[idx];
                                }
                            }
                        }
                        let o = (c * oh + oy) * ow + ox;
                        out[o] = best_v;
                        argmax[o] = best;
                    }
                }
            }
            LayerCache::Pool { argmax, out }
        }
    }
}

fn conv_backward(
    layer: &QuadConvLayer,
    in_shape: &[usize],
    input: &[f64],
    grad_z: &[f64],
    grads: &mut [QuadraticNeuron],
    need_dx: bool,
) -> Vec<f64> {
    let (h, w) = (in_shape[1], in_shape[2]);
    let (oh, ow) = layer.output_hw(h, w).expect("shape checked at construction");
    let n = layer.kernel_inputs();
    let mut dx = vec![0.0; if need_dx { input.len() } else { 0 }];
    let mut patch = vec![0.0; n];
    let mut patch_grad = vec![0.0; n];
    for (k, kernel) in layer.kernels.iter().enumerate() {
        for oy in 0..oh {
            for ox in 0..ow {
                let g = grad_z[(k * oh + oy) * ow + ox];
                if g == 0.0 {
                    continue;
                }
                layer.gather(input, (h, w), k, oy, ox, &mut patch);
                let (p, q, _) = kernel.eval(&patch);
                if need_dx {
                    patch_grad.fill(0.0);
                    kernel.accumulate(&patch, p, q, g, &mut grads[k], &mut patch_grad);
                    layer.scatter(&mut dx, (h, w), k, oy, ox, &patch_grad);
                } else {
                    QuadraticNeuron::accumulate_params(&patch, p, q, g, &mut grads[k]);
                }
            }
        }
    }
    dx
}

/// Convenience constructor for a max-pool layer.
pub fn max_pool(window: usize, stride: usize) -> Result<Layer> {
    MaxPool::new(window, stride).map(Layer::MaxPool)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadcore::layer::Grouping;

    #[test]
    fn max_pool_picks_maximum() {
        let net = Network::new(vec![1, 2, 2], vec![max_pool(2, 2).unwrap()]).unwrap();
        let out = net.forward_slice(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(out, vec![4.0]);
    }

    #[test]
    fn incompatible_architecture_rejected_at_construction() {
        let d1 = Layer::Dense(DenseQuadraticLayer::zeros(2, 3, Activation::Sigmoid).unwrap());
        let d2 = Layer::Dense(DenseQuadraticLayer::zeros(4, 1, Activation::Sigmoid).unwrap());
        assert!(matches!(Network::new(vec![2], vec![d1, d2]), Err(Error::InvalidArchitecture(_))));
        let conv = Layer::Conv(
            QuadConvLayer::zeros(2, 1, 3, 3, 1, Grouping::Depthwise, Activation::ReLU).unwrap(),
        );
        assert!(Network::new(vec![1, 2, 2], vec![conv]).is_err());
    }

    #[test]
    fn zero_input_gives_bias_product() {
        let mut layer = QuadConvLayer::zeros(1, 1, 3, 3, 1, Grouping::Depthwise, Activation::Identity).unwrap();
        layer.kernels[0].b_r = 0.7;
        layer.kernels[0].b_g = -2.0;
        layer.kernels[0].c = 0.3;
        layer.kernels[0].w_r.fill(0.4);
        let out = layer_forward(&Layer::Conv(layer), &Tensor::zeros(vec![1, 5, 5]).unwrap()).unwrap();
        assert_eq!(out.shape(), &[1, 3, 3]);
        assert!(out.data().iter().all(|&v| (v - (0.7 * -2.0 + 0.3)).abs() < 1e-15));
    }

    #[test]
    fn backward_rejects_foreign_trace() {
        let a = Network::mlp(&[2, 3, 1], Activation::Sigmoid, Activation::Sigmoid).unwrap();
        let b = Network::mlp(&[2, 4, 1], Activation::Sigmoid, Activation::Sigmoid).unwrap();
        let mut trace = a.forward_trace(&[0.1, 0.2]).unwrap();
        assert!(matches!(
            b.backward(&mut trace, OutputGrad::Output(&[1.0])),
            Err(Error::BackwardMismatch(_))
        ));
        assert!(a.backward(&mut trace, OutputGrad::Output(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn serde_roundtrip_revalidates() {
        let net = Network::mlp(&[2, 6, 6, 1], Activation::Sigmoid, Activation::Sigmoid).unwrap();
        let json = serde_json::to_string(&net).unwrap();
        let back: Network = serde_json::from_str(&json).unwrap();
        assert_eq!(back, net);
    }
}
