//! Quadratic neurons, dense and convolutional quadratic layers, and exact
//! forward/backward evaluation.

mod activation;
mod layer;
mod network;
mod neuron;

pub use activation::{sigmoid, Activation};
pub use layer::{DenseQuadraticLayer, Grouping, Layer, MaxPool, QuadConvLayer};
pub use network::{layer_forward, max_pool, ForwardTrace, Gradients, Network, OutputGrad};
pub use neuron::{NeuronBackward, QuadraticNeuron};
