use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::datasets::{load_idx_prefix, LabeledDataset};
use crate::error::{Error, Result};
use crate::quadcore::{max_pool, Activation, DenseQuadraticLayer, Grouping, Layer, Network, QuadConvLayer};
use crate::spectral::{layer_spectrum, TypeMode, DEFAULT_EPSILON_REL};
use crate::trainer::{
    evaluate, train, BatchMode, Evaluation, InitScheme, LossKind, LrSchedule, Optimizer, Reduction, TrainConfig,
};

/// Environment variable naming the directory with the four MNIST IDX files.
pub const MNIST_DIR_ENV: &str = "QUADLOGIC_MNIST_DIR";

pub const TRAIN_IMAGES: &str = "train-images-idx3-ubyte";
pub const TRAIN_LABELS: &str = "train-labels-idx1-ubyte";
pub const TEST_IMAGES: &str = "t10k-images-idx3-ubyte";
pub const TEST_LABELS: &str = "t10k-labels-idx1-ubyte";

const DOWNLOAD_HINT: &str = "download the four uncompressed MNIST IDX files \
(train-images-idx3-ubyte, train-labels-idx1-ubyte, t10k-images-idx3-ubyte, t10k-labels-idx1-ubyte) \
and point QUADLOGIC_MNIST_DIR at their directory";

/// `$QUADLOGIC_MNIST_DIR`, falling back to `data/mnist`.
pub fn default_mnist_dir() -> PathBuf {
    std::env::var_os(MNIST_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("data/mnist"))
}

fn read_file(dir: &Path, name: &str) -> Result<Vec<u8>> {
    let path = dir.join(name);
    std::fs::read(&path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => {
            Error::MissingData { path: path.display().to_string(), hint: DOWNLOAD_HINT.into() }
        }
        _ => Error::Io(e),
    })
}

/// First `train_limit` training and `test_limit` test examples.
pub fn load_mnist(dir: &Path, train_limit: usize, test_limit: usize) -> Result<(LabeledDataset, LabeledDataset)> {
    let train = load_idx_prefix(&read_file(dir, TRAIN_IMAGES)?, &read_file(dir, TRAIN_LABELS)?, train_limit)?;
    let test = load_idx_prefix(&read_file(dir, TEST_IMAGES)?, &read_file(dir, TEST_LABELS)?, test_limit)?;
    Ok((train, test))
}

/// Quadratic conv net: `kernels` 3×3 kernels (ReLU), 2×2 max-pool, and a
/// dense quadratic softmax layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvNetSpec {
    pub input_shape: [usize; 3],
    pub kernels: usize,
    pub kernel_size: usize,
    pub grouping: Grouping,
    pub pool: usize,
    pub classes: usize,
}

impl ConvNetSpec {
    pub fn mnist_desk() -> Self {
        ConvNetSpec {
            input_shape: [1, 28, 28],
            kernels: 8,
            kernel_size: 3,
            grouping: Grouping::Depthwise,
            pool: 2,
            classes: 10,
        }
    }

    pub fn build(&self) -> Result<Network> {
        let [ch, _, _] = self.input_shape;
        let conv = QuadConvLayer::zeros(
            self.kernels,
            ch,
            self.kernel_size,
            self.kernel_size,
            1,
            self.grouping,
            Activation::ReLU,
        )?;
        let pooled = Network::new(self.input_shape.to_vec(), vec![Layer::Conv(conv.clone()), max_pool(self.pool, self.pool)?])?;
        let flat = pooled.output_len();
        let dense = DenseQuadraticLayer::zeros(flat, self.classes, Activation::Softmax)?;
        Network::new(
            self.input_shape.to_vec(),
            vec![Layer::Conv(conv), max_pool(self.pool, self.pool)?, Layer::Dense(dense)],
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MnistConfig {
    pub net: ConvNetSpec,
    pub train_limit: usize,
    pub test_limit: usize,
    pub train: TrainConfig,
    pub epsilon_rel: f64,
    /// Also histogram the dense layer. Each of its neurons needs an
    /// eigendecomposition of the size of the flattened feature map.
    pub include_dense: bool,
}

impl MnistConfig {
    /// 10,000 training images, 5,000 Adam steps on mini-batches of 50.
    pub fn desk(seed: u64) -> Self {
        let iterations = 5000;
        MnistConfig {
            net: ConvNetSpec::mnist_desk(),
            train_limit: 10_000,
            test_limit: 10_000,
            train: TrainConfig {
                seed,
                schedule: LrSchedule::new(vec![(2000, 3e-3), (3000, 1e-3)]).expect("valid schedule"),
                iterations,
                batch: BatchMode::MiniBatch(50),
                init: InitScheme::TruncatedGaussian { sigma: 0.1 },
                loss: LossKind::CrossEntropy,
                reduction: Reduction::Mean,
                optimizer: Optimizer::ADAM,
                checkpoints: Vec::new(),
            },
            epsilon_rel: DEFAULT_EPSILON_REL,
            include_dense: false,
        }
    }
}

/// Positive-index histogram of one layer: `counts[k]` kernels have `k`
/// positive eigenvalues (zeros counted as positive).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerHistogram {
    pub layer: usize,
    pub inputs: usize,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MnistReport {
    pub config: MnistConfig,
    pub test: Evaluation,
    pub histograms: Vec<LayerHistogram>,
}

/// Positive-index histograms of the conv layers (and optionally dense ones).
pub fn histograms(network: &Network, epsilon_rel: f64, include_dense: bool) -> Result<Vec<LayerHistogram>> {
    let mut out = Vec::new();
    for (i, layer) in network.layers().iter().enumerate() {
        let wanted = match layer {
            Layer::Conv(_) => true,
            Layer::Dense(_) => include_dense,
            Layer::MaxPool(_) => false,
        };
        if wanted {
            let s = layer_spectrum(layer, TypeMode::Simplified, epsilon_rel)?;
            out.push(LayerHistogram { layer: i, inputs: s.inputs, counts: s.positive_index_histogram() });
        }
    }
    Ok(out)
}

pub fn histogram_csv(histograms: &[LayerHistogram]) -> String {
    let mut out = String::from("layer,type,count\n");
    for h in histograms {
        for (k, c) in h.counts.iter().enumerate() {
            out.push_str(&format!("{},{k},{c}\n", h.layer));
        }
    }
    out
}

pub fn run_mnist(config: &MnistConfig, train_set: &LabeledDataset, test_set: &LabeledDataset) -> Result<(Network, MnistReport)> {
    let net = config.net.build()?;
    let trained = train(net, train_set, &config.train)?.network;
    let test = evaluate(&trained, test_set)?;
    let histograms = histograms(&trained, config.epsilon_rel, config.include_dense)?;
    Ok((trained, MnistReport { config: config.clone(), test, histograms }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trainer::apply_init;

    #[test]
    fn desk_net_shapes() {
        let net = ConvNetSpec::mnist_desk().build().unwrap();
        assert_eq!(net.layers().len(), 3);
        assert_eq!(net.layer_input_shape(2), &[8, 13, 13]);
        assert_eq!(net.output_len(), 10);
    }

    #[test]
    fn untrained_histogram_has_ten_bins_and_is_reproducible() {
        let spec = ConvNetSpec::mnist_desk();
        let make = || {
            let mut net = spec.build().unwrap();
            apply_init(&mut net, InitScheme::TruncatedGaussian { sigma: 0.1 }, 3).unwrap();
            histograms(&net, DEFAULT_EPSILON_REL, false).unwrap()
        };
        let h = make();
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].counts.len(), 10);
        assert_eq!(h[0].counts.iter().sum::<usize>(), 8);
        assert_eq!(h, make());
        let csv = histogram_csv(&h);
        assert!(csv.starts_with("layer,type,count\n0,0,"));
        assert_eq!(csv.lines().count(), 11);
    }

    #[test]
    fn missing_files_carry_a_hint() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_mnist(dir.path(), 1, 1).unwrap_err();
        assert_eq!(err.code(), "missing-data");
        assert!(err.to_string().contains(MNIST_DIR_ENV));
    }
}
