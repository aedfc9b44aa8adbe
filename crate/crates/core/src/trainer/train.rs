use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::init::{init_linear_collapse, init_truncated_gaussian, rng_for, InitScheme};
use super::loss::{GradSite, LossKind, Reduction};
use super::optim::{Optimizer, OptimizerState};
use super::schedule::LrSchedule;
use crate::datasets::LabeledDataset;
use crate::error::{Error, Result};
use crate::quadcore::{ForwardTrace, Gradients, Network, OutputGrad};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BatchMode {
    FullBatch,
    MiniBatch(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub seed: u64,
    pub schedule: LrSchedule,
    pub iterations: u64,
    pub batch: BatchMode,
    pub init: InitScheme,
    pub loss: LossKind,
    pub reduction: Reduction,
    #[serde(default)]
    pub optimizer: Optimizer,
    /// Steps (counted from 1) after which loss and accuracy are recorded.
    pub checkpoints: Vec<u64>,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("iterations must be positive".into()));
        }
        if self.schedule.total_steps() != self.iterations {
            return Err(Error::InvalidParameter(format!(
                "schedule covers {} steps but {} iterations were requested",
                self.schedule.total_steps(),
                self.iterations
            )));
        }
        self.optimizer.validate()?;
        if self.batch == BatchMode::MiniBatch(0) {
            return Err(Error::InvalidParameter("mini-batch size must be positive".into()));
        }
        if let Some(&bad) = self.checkpoints.iter().find(|&&c| c == 0 || c > self.iterations) {
            return Err(Error::InvalidParameter(format!("checkpoint {bad} outside 1..={}", self.iterations)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub step: u64,
    /// Mean per-example loss over the training set.
    pub loss: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub network: Network,
    pub history: Vec<Checkpoint>,
    pub steps: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
    pub error_rate: f64,
}

/// Predicted class: a single output is thresholded (`> 0.5` is class 1,
/// ties go to class 0); wider outputs take the first maximum.
pub fn predict_class(output: &[f64]) -> usize {
    if output.len() == 1 {
        return usize::from(output[0] > 0.5);
    }
    let mut best = 0;
    for (k, &v) in output.iter().enumerate() {
        if v > output[best] {
            best = k;
        }
    }
    best
}

pub fn evaluate(network: &Network, dataset: &LabeledDataset) -> Result<Evaluation> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput("evaluation dataset"));
    }
    let mut correct = 0;
    for (x, label) in dataset.iter() {
        if predict_class(&network.forward_slice(x)?) == label {
            correct += 1;
        }
    }
    let total = dataset.len();
    let accuracy = correct as f64 / total as f64;
    Ok(Evaluation { correct, total, accuracy, error_rate: 1.0 - accuracy })
}

/// Mean per-example loss over a dataset.
pub fn dataset_loss(network: &Network, dataset: &LabeledDataset, loss: LossKind) -> Result<f64> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput("loss dataset"));
    }
    let act = network.final_activation();
    let mut total = 0.0;
    for (x, label) in dataset.iter() {
        let trace = network.forward_trace(x)?;
        total += loss.value_from_trace(&trace, act, label);
    }
    Ok(total / dataset.len() as f64)
}

/// Reduced loss and its parameter gradient over the examples `indices`.
pub fn batch_gradient(
    network: &Network,
    dataset: &LabeledDataset,
    indices: impl IntoIterator<Item = usize>,
    loss: LossKind,
    reduction: Reduction,
    grads: &mut Gradients,
) -> Result<f64> {
    grads.clear();
    let act = network.final_activation();
    let mut total = 0.0;
    let mut count = 0usize;
    let mut g = Vec::new();
    let mut trace = ForwardTrace::default();
    for i in indices {
        let label = dataset.label(i);
        network.forward_trace_into(dataset.point(i), &mut trace)?;
        total += loss.value_from_trace(&trace, act, label);
        let site = loss.gradient(trace.output(), act, label, &mut g);
        let grad = match site {
            GradSite::Output => OutputGrad::Output(&g),
            GradSite::PreActivation => OutputGrad::PreActivation(&g),
        };
        network.accumulate_backward(&mut trace, grad, grads)?;
        count += 1;
    }
    if reduction == Reduction::Mean && count > 0 {
        grads.scale(1.0 / count as f64);
        total /= count as f64;
    }
    Ok(total)
}

pub fn apply_init(network: &mut Network, scheme: InitScheme, seed: u64) -> Result<()> {
    match scheme {
        InitScheme::TruncatedGaussian { sigma } => init_truncated_gaussian(network, sigma, seed),
        InitScheme::LinearCollapse => {
            init_linear_collapse(network, seed);
            Ok(())
        }
        InitScheme::Keep => Ok(()),
    }
}

pub fn train(network: Network, dataset: &LabeledDataset, config: &TrainConfig) -> Result<TrainReport> {
    train_with_observer(network, dataset, config, |_, _| Ok(()))
}

/// Runs `config.iterations` optimizer updates. `observer` is
/// called after every update with the number of completed steps.
pub fn train_with_observer(
    mut network: Network,
    dataset: &LabeledDataset,
    config: &TrainConfig,
    mut observer: impl FnMut(u64, &Network) -> Result<()>,
) -> Result<TrainReport> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::EmptyInput("training dataset"));
    }
    if dataset.dim() != network.input_len() {
        return Err(Error::DimensionMismatch { expected: network.input_len(), got: dataset.dim() });
    }
    apply_init(&mut network, config.init, config.seed)?;

    let mut checkpoints = config.checkpoints.clone();
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let mut next_checkpoint = checkpoints.iter().peekable();
    let mut history = Vec::with_capacity(checkpoints.len());

    let mut shuffle_rng = rng_for(config.seed, 1);
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut cursor = order.len();
    let mut grads = Gradients::zeros_like(&network);
    let mut optimizer = OptimizerState::new(config.optimizer, &network);

    for step in 0..config.iterations {
        let rate = config.schedule.rate_at(step).expect("schedule validated");
        let loss = match config.batch {
            BatchMode::FullBatch => {
                batch_gradient(&network, dataset, 0..dataset.len(), config.loss, config.reduction, &mut grads)?
            }
            BatchMode::MiniBatch(size) => {
                let size = size.min(order.len());
                if cursor + size > order.len() {
                    order.shuffle(&mut shuffle_rng);
                    cursor = 0;
                }
                let batch = &order[cursor..cursor + size];
                cursor += size;
                batch_gradient(&network, dataset, batch.iter().copied(), config.loss, config.reduction, &mut grads)?
            }
        };
        if !loss.is_finite() || !grads.params().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteLoss { step });
        }
        optimizer.step(&mut network, &grads, rate);
        let done = step + 1;
        observer(done, &network)?;
        if next_checkpoint.peek() == Some(&&done) {
            next_checkpoint.next();
            history.push(Checkpoint {
                step: done,
                loss: dataset_loss(&network, dataset, config.loss)?,
                accuracy: evaluate(&network, dataset)?.accuracy,
            });
        }
    }
    Ok(TrainReport { network, history, steps: config.iterations })
}
