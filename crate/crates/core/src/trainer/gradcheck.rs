//! Finite-difference checks of the backward pass.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{batch_gradient, init_truncated_gaussian, LossKind, Reduction};
use crate::datasets::LabeledDataset;
use crate::error::Result;
use crate::quadcore::{max_pool, Activation, DenseQuadraticLayer, Gradients, Grouping, Layer, Network, QuadConvLayer};

/// Network, examples and loss whose gradient is checked.
#[derive(Debug, Clone)]
pub struct GradCase {
    pub net: Network,
    pub data: LabeledDataset,
    pub loss: LossKind,
    pub reduction: Reduction,
    /// Human-readable description of the layers, activations and loss.
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    pub checked: usize,
    /// Parameters whose finite differences disagree across step sizes, i.e.
    /// a ReLU or max-pool switch lies within the step. They are skipped.
    pub kinks: usize,
    /// Largest relative error over the checked parameters.
    pub worst: f64,
}

const HIDDEN: [Activation; 4] = [Activation::Identity, Activation::ReLU, Activation::Sigmoid, Activation::Softmax];

/// Output activation and loss pairs the trainer supports.
fn head(rng: &mut ChaCha8Rng, classes: usize) -> (Activation, LossKind, usize) {
    match rng.random_range(0..7) {
        0 => (Activation::Identity, LossKind::Mse, classes),
        1 => (Activation::ReLU, LossKind::Mse, classes),
        2 => (Activation::Sigmoid, LossKind::Mse, classes),
        3 => (Activation::Softmax, LossKind::Mse, classes),
        4 => (Activation::Softmax, LossKind::CrossEntropy, classes),
        5 => (Activation::Sigmoid, LossKind::CrossEntropy, classes),
        _ => (Activation::Sigmoid, LossKind::BinaryCrossEntropy, 1),
    }
}

/// Small random network and batch. `index % 4` picks a dense stack, a full
/// conv with pooling, a depthwise conv with pooling, or a depthwise conv
/// without; activations, head and reduction are drawn at random.
pub fn random_case(index: u64) -> GradCase {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37 + index);
    let classes = rng.random_range(2..4);
    let (out_act, loss, out_width) = head(&mut rng, classes);
    let hidden = HIDDEN[rng.random_range(0..HIDDEN.len())];
    let (input_shape, mut layers, label) = match index % 4 {
        0 => {
            let n = rng.random_range(1..5);
            let mut widths = vec![n];
            for _ in 0..rng.random_range(0..3) {
                widths.push(rng.random_range(1..5));
            }
            let layers = widths
                .windows(2)
                .map(|w| Layer::Dense(DenseQuadraticLayer::zeros(w[0], w[1], hidden).expect("valid widths")))
                .collect();
            (vec![n], layers, format!("dense {widths:?}"))
        }
        k => {
            let ch = rng.random_range(1..3);
            let (h, w) = (rng.random_range(4..7), rng.random_range(4..7));
            let grouping = if k == 1 { Grouping::Full } else { Grouping::Depthwise };
            let kernels = ch * rng.random_range(1..3);
            let size = rng.random_range(2..4);
            let stride = rng.random_range(1..3);
            let conv = QuadConvLayer::zeros(kernels, ch, size, size, stride, grouping, hidden).expect("valid conv");
            let (oh, ow) = conv.output_hw(h, w).expect("kernel fits");
            let pool = k != 3 && oh >= 2 && ow >= 2;
            let mut layers = vec![Layer::Conv(conv)];
            if pool {
                layers.push(max_pool(2, 1).expect("valid pool"));
            }
            (vec![ch, h, w], layers, format!("conv {grouping:?} {ch}x{h}x{w} k{kernels} s{size}/{stride} pool={pool}"))
        }
    };
    let features_in = match layers.is_empty() {
        true => input_shape.iter().product(),
        false => Network::new(input_shape.clone(), layers.clone()).expect("valid stack").output_len(),
    };
    layers.push(Layer::Dense(DenseQuadraticLayer::zeros(features_in, out_width, out_act).expect("valid head")));
    let mut net = Network::new(input_shape.clone(), layers).expect("valid network");
    init_truncated_gaussian(&mut net, 0.5, index).expect("positive sigma");

    let count = rng.random_range(1..4);
    let dim = net.input_len();
    let features: Vec<f64> = (0..count * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let label_range = if loss == LossKind::BinaryCrossEntropy { 2 } else { classes };
    let labels: Vec<usize> = (0..count).map(|_| rng.random_range(0..label_range)).collect();
    let data = LabeledDataset::new(features, labels, input_shape, label_range.max(2)).expect("consistent dataset");
    let reduction = if rng.random_bool(0.5) { Reduction::Mean } else { Reduction::Sum };
    let label = format!("#{index} {label} hidden={hidden:?} head={out_act:?}/{loss:?} {reduction:?}");
    GradCase { net, data, loss, reduction, label }
}

fn objective(case: &GradCase, net: &Network, scratch: &mut Gradients) -> Result<f64> {
    batch_gradient(net, &case.data, 0..case.data.len(), case.loss, case.reduction, scratch)
}

/// Compares every analytic partial against central differences at steps
/// `h`, `h/2` and `h/4`, extrapolated to cancel the O(h²) term.
pub fn check_gradients(case: &GradCase, h: f64) -> Result<GradCheck> {
    let mut analytic = Gradients::zeros_like(&case.net);
    objective(case, &case.net, &mut analytic)?;
    let analytic: Vec<f64> = analytic.params().copied().collect();
    check_against(case, &analytic, h)
}

/// Like [`check_gradients`], against a caller-supplied gradient in
/// parameter order.
pub fn check_against(case: &GradCase, analytic: &[f64], h: f64) -> Result<GradCheck> {
    let mut scratch = Gradients::zeros_like(&case.net);
    let loss = objective(case, &case.net, &mut scratch)?;
    let mut scratch = Gradients::zeros_like(&case.net);
    let mut net = case.net.clone();
    let mut out = GradCheck { checked: 0, kinks: 0, worst: 0.0 };
    // Central differences cannot resolve gradients much below ε·|L|/h, so
    // relative error is measured against at least this scale.
    let floor = 1e-3 * loss.abs().max(1.0);
    for (i, &a) in analytic.iter().enumerate() {
        let mut diff = |step: f64| -> Result<f64> {
            let original = *net.params_mut().nth(i).expect("parameter index");
            *net.params_mut().nth(i).expect("parameter index") = original + step;
            let plus = objective(case, &net, &mut scratch)?;
            *net.params_mut().nth(i).expect("parameter index") = original - step;
            let minus = objective(case, &net, &mut scratch)?;
            *net.params_mut().nth(i).expect("parameter index") = original;
            Ok((plus - minus) / (2.0 * step))
        };
        let (d1, d2, d4) = (diff(h)?, diff(h / 2.0)?, diff(h / 4.0)?);
        let scale = d2.abs().max(floor);
        if (d1 - d2).abs() > 1e-7 * scale || (d2 - d4).abs() > 1e-7 * scale {
            out.kinks += 1;
            continue;
        }
        let numeric = (4.0 * d2 - d1) / 3.0;
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(floor);
        out.worst = out.worst.max(rel);
        out.checked += 1;
    }
    Ok(out)
}
