use serde::{Deserialize, Serialize};

use super::activation::Activation;
use super::neuron::QuadraticNeuron;
use crate::error::{Error, Result};

/// Fully connected layer of quadratic neurons. Any input shape is accepted
/// and read flat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseQuadraticLayer {
    pub neurons: Vec<QuadraticNeuron>,
    pub activation: Activation,
}

impl DenseQuadraticLayer {
    pub fn new(neurons: Vec<QuadraticNeuron>, activation: Activation) -> Result<Self> {
        let first = neurons
            .first()
            .ok_or_else(|| Error::InvalidArchitecture("dense layer without neurons".into()))?;
        let n = first.inputs();
        if let Some(bad) = neurons.iter().find(|u| u.inputs() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: bad.inputs() });
        }
        Ok(DenseQuadraticLayer { neurons, activation })
    }

    pub fn zeros(inputs: usize, width: usize, activation: Activation) -> Result<Self> {
        if inputs == 0 {
            return Err(Error::InvalidArchitecture("dense layer with zero inputs".into()));
        }
        DenseQuadraticLayer::new(vec![QuadraticNeuron::zeros(inputs); width], activation)
    }

    pub fn inputs(&self) -> usize {
        self.neurons[0].inputs()
    }

    pub fn width(&self) -> usize {
        self.neurons.len()
    }
}

/// How a convolution kernel sees the input channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Grouping {
    /// Each kernel spans every input channel: `n = kh·kw·c_in`.
    Full,
    /// Each kernel reads a single channel: `n = kh·kw`. With `K` kernels and
    /// `c_in` channels, kernel `k` reads channel `k / (K / c_in)`.
    Depthwise,
}

/// Quadratic kernels slid over a `[channels, height, width]` input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadConvLayer {
    pub kernels: Vec<QuadraticNeuron>,
    pub in_channels: usize,
    pub kernel_h: usize,
    pub kernel_w: usize,
    pub stride: usize,
    pub grouping: Grouping,
    pub activation: Activation,
}

impl QuadConvLayer {
    pub fn new(
        kernels: Vec<QuadraticNeuron>,
        in_channels: usize,
        kernel_h: usize,
        kernel_w: usize,
        stride: usize,
        grouping: Grouping,
        activation: Activation,
    ) -> Result<Self> {
        if kernels.is_empty() {
            return Err(Error::InvalidArchitecture("conv layer without kernels".into()));
        }
        if in_channels == 0 || kernel_h == 0 || kernel_w == 0 || stride == 0 {
            return Err(Error::InvalidArchitecture(
                "conv channels, kernel extents and stride must be positive".into(),
            ));
        }
        let n = match grouping {
            Grouping::Full => kernel_h * kernel_w * in_channels,
            Grouping::Depthwise => {
                if kernels.len() % in_channels != 0 {
                    return Err(Error::InvalidArchitecture(format!(
                        "depthwise conv needs a kernel count divisible by {in_channels} channels, got {}",
                        kernels.len()
                    )));
                }
                kernel_h * kernel_w
            }
        };
        if let Some(bad) = kernels.iter().find(|k| k.inputs() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: bad.inputs() });
        }
        Ok(QuadConvLayer { kernels, in_channels, kernel_h, kernel_w, stride, grouping, activation })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn zeros(
        count: usize,
        in_channels: usize,
        kernel_h: usize,
        kernel_w: usize,
        stride: usize,
        grouping: Grouping,
        activation: Activation,
    ) -> Result<Self> {
        let n = match grouping {
            Grouping::Full => kernel_h * kernel_w * in_channels,
            Grouping::Depthwise => kernel_h * kernel_w,
        };
        QuadConvLayer::new(
            vec![QuadraticNeuron::zeros(n); count],
            in_channels,
            kernel_h,
            kernel_w,
            stride,
            grouping,
            activation,
        )
    }

    pub fn kernel_inputs(&self) -> usize {
        self.kernels[0].inputs()
    }

    pub fn out_channels(&self) -> usize {
        self.kernels.len()
    }

    /// Output spatial extents for an `h × w` input.
    pub fn output_hw(&self, h: usize, w: usize) -> Option<(usize, usize)> {
        if h < self.kernel_h || w < self.kernel_w {
            return None;
        }
        Some(((h - self.kernel_h) / self.stride + 1, (w - self.kernel_w) / self.stride + 1))
    }

    fn source_channel(&self, kernel: usize) -> usize {
        kernel / (self.kernels.len() / self.in_channels)
    }

    /// Copies the receptive field of kernel `k` at output `(oy, ox)` into `patch`.
    #[inline]
    pub(crate) fn gather(
        &self,
        input: &[f64],
        in_hw: (usize, usize),
        k: usize,
        oy: usize,
        ox: usize,
        patch: &mut [f64],
    ) {
        let (h, w) = in_hw;
        let (y0, x0) = (oy * self.stride, ox * self.stride);
        let mut idx = 0;
        let channels = match self.grouping {
            Grouping::Full => 0..self.in_channels,
            Grouping::Depthwise => {
                let c = self.source_channel(k);
                c..c + 1
            }
        };
        for c in channels {
            let plane = &input[c * h * w..(c + 1) * h * w];
            for dy in 0..self.kernel_h {
                let row = &plane[(y0 + dy) * w + x0..(y0 + dy) * w + x0 + self.kernel_w];
                patch[idx..idx + self.kernel_w].copy_from_slice(row);
                idx += self.kernel_w;
            }
        }
    }

    /// Adds `patch_grad` back into the input gradient at the receptive field
    /// of kernel `k` at `(oy, ox)`.
    #[inline]
    pub(crate) fn scatter(
        &self,
        grad_input: &mut [f64],
        in_hw: (usize, usize),
        k: usize,
        oy: usize,
        ox: usize,
        patch_grad: &[f64],
    ) {
        let (h, w) = in_hw;
        let (y0, x0) = (oy * self.stride, ox * self.stride);
        let mut idx = 0;
        let channels = match self.grouping {
            Grouping::Full => 0..self.in_channels,
            Grouping::Depthwise => {
                let c = self.source_channel(k);
                c..c + 1
            }
        };
        for c in channels {
            for dy in 0..self.kernel_h {
                let base = c * h * w + (y0 + dy) * w + x0;
                for (g, pg) in grad_input[base..base + self.kernel_w]
                    .iter_mut()
                    .zip(&patch_grad[idx..idx + self.kernel_w])
                {
                    *g += pg;
                }
                idx += self.kernel_w;
            }
        }
    }
}

/// Max-pooling over each channel of a `[channels, height, width]` input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxPool {
    pub window: usize,
    pub stride: usize,
}

impl MaxPool {
    pub fn new(window: usize, stride: usize) -> Result<Self> {
        if window == 0 || stride == 0 {
            return Err(Error::InvalidArchitecture("pool window and stride must be positive".into()));
        }
        Ok(MaxPool { window, stride })
    }

    pub fn output_hw(&self, h: usize, w: usize) -> Option<(usize, usize)> {
        if h < self.window || w < self.window {
            return None;
        }
        Some(((h - self.window) / self.stride + 1, (w - self.window) / self.stride + 1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Layer {
    Dense(DenseQuadraticLayer),
    Conv(QuadConvLayer),
    MaxPool(MaxPool),
}

impl Layer {
    /// Neurons or kernels of a parametric layer; `None` for pooling.
    pub fn neurons(&self) -> Option<&[QuadraticNeuron]> {
        match self {
            Layer::Dense(d) => Some(&d.neurons),
            Layer::Conv(c) => Some(&c.kernels),
            Layer::MaxPool(_) => None,
        }
    }

    pub fn neurons_mut(&mut self) -> Option<&mut [QuadraticNeuron]> {
        match self {
            Layer::Dense(d) => Some(&mut d.neurons),
            Layer::Conv(c) => Some(&mut c.kernels),
            Layer::MaxPool(_) => None,
        }
    }

    pub fn activation(&self) -> Option<Activation> {
        match self {
            Layer::Dense(d) => Some(d.activation),
            Layer::Conv(c) => Some(c.activation),
            Layer::MaxPool(_) => None,
        }
    }

    /// Output shape for the given input shape, or an error when incompatible.
    pub fn output_shape(&self, input: &[usize]) -> Result<Vec<usize>> {
        match self {
            Layer::Dense(d) => {
                let len: usize = input.iter().product();
                if len != d.inputs() {
                    return Err(Error::InvalidArchitecture(format!(
                        "dense layer expects {} inputs, previous shape {input:?} has {len}",
                        d.inputs()
                    )));
                }
                Ok(vec![d.width()])
            }
            Layer::Conv(c) => {
                let [ch, h, w] = *input else {
                    return Err(Error::InvalidArchitecture(format!(
                        "conv layer needs a [channels, height, width] input, got {input:?}"
                    )));
                };
                if ch != c.in_channels {
                    return Err(Error::InvalidArchitecture(format!(
                        "conv layer expects {} channels, got {ch}",
                        c.in_channels
                    )));
                }
                let (oh, ow) = c.output_hw(h, w).ok_or_else(|| {
                    Error::InvalidArchitecture(format!(
                        "{}x{} kernel does not fit a {h}x{w} input",
                        c.kernel_h, c.kernel_w
                    ))
                })?;
                Ok(vec![c.out_channels(), oh, ow])
            }
            Layer::MaxPool(p) => {
                let [ch, h, w] = *input else {
                    return Err(Error::InvalidArchitecture(format!(
                        "pooling needs a [channels, height, width] input, got {input:?}"
                    )));
                };
                let (oh, ow) = p.output_hw(h, w).ok_or_else(|| {
                    Error::InvalidArchitecture(format!(
                        "{0}x{0} pool window does not fit a {h}x{w} input",
                        p.window
                    ))
                })?;
                Ok(vec![ch, oh, ow])
            }
        }
    }
}
