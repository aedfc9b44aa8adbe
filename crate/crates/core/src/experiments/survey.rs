use serde::{Deserialize, Serialize};

use super::sharp_flat::{sharp_vs_flat, SharpFlatSplit};
use crate::datasets::{gen_taiji, LabeledDataset, TaiJiSpec};
use crate::error::{Error, Result};
use crate::exec::map_jobs;
use crate::quadcore::{Activation, Network};
use crate::spectral::{
    egm, first_hidden_layer, frequency_table, frequency_variance, layer_spectrum, m_measure, KeyFrequency,
    MinimaSurveyRecord, TypeMode, DEFAULT_EPSILON_REL,
};
use crate::trainer::{
    evaluate, train, BatchMode, InitScheme, LossKind, LrSchedule, Optimizer, Reduction, TrainConfig,
};

/// Default good-minimum threshold: more than 1200 of 1245 training points.
pub const GOOD_MINIMUM_THRESHOLD: f64 = 1200.0 / 1245.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyConfig {
    /// Layer widths, input first, e.g. `[2, 6, 6, 1]`.
    pub architecture: Vec<usize>,
    pub target: usize,
    /// A run is kept when its training accuracy exceeds this; 0 keeps all.
    pub threshold: f64,
    pub base_seed: u64,
    /// Attempts before the survey gives up and reports what it has.
    pub max_attempts: u64,
    /// Template for every run; its seed is replaced by the run seed.
    pub train: TrainConfig,
    pub train_reciprocal: u32,
    pub test_reciprocal: u32,
    pub epsilon_rel: f64,
    /// Size of the top group in the report's frequency split.
    pub top_k: usize,
}

impl SurveyConfig {
    /// Tai Ji survey at the given architecture: sigmoid MLP, summed squared
    /// error, full batch, learning rate 0.004 for 1000 steps.
    pub fn taiji(architecture: Vec<usize>, target: usize) -> Self {
        let iterations = 1000;
        SurveyConfig {
            architecture,
            target,
            threshold: GOOD_MINIMUM_THRESHOLD,
            base_seed: 0,
            max_attempts: (target as u64).saturating_mul(10).max(100),
            train: TrainConfig {
                seed: 0,
                schedule: LrSchedule::constant(iterations, 0.004).expect("positive rate"),
                iterations,
                batch: BatchMode::FullBatch,
                init: InitScheme::TruncatedGaussian { sigma: 0.5 },
                loss: LossKind::Mse,
                reduction: Reduction::Sum,
                optimizer: Optimizer::Sgd,
                checkpoints: Vec::new(),
            },
            train_reciprocal: TaiJiSpec::TRAIN.reciprocal,
            test_reciprocal: TaiJiSpec::TEST.reciprocal,
            epsilon_rel: DEFAULT_EPSILON_REL,
            top_k: 7,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidParameter(format!("threshold {} outside [0, 1]", self.threshold)));
        }
        if self.target == 0 {
            return Err(Error::InvalidParameter("survey target must be at least 1".into()));
        }
        if self.max_attempts == 0 {
            return Err(Error::InvalidParameter("attempt cap must be positive".into()));
        }
        if self.architecture.first() != Some(&2) || self.architecture.len() < 3 {
            return Err(Error::InvalidArchitecture(format!(
                "survey networks take 2 inputs and need a hidden layer, got {:?}",
                self.architecture
            )));
        }
        if !(self.epsilon_rel > 0.0 && self.epsilon_rel < 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon_rel {} outside (0, 1)", self.epsilon_rel)));
        }
        self.train.validate()
    }

    fn keeps(&self, accuracy: f64) -> bool {
        self.threshold == 0.0 || accuracy > self.threshold
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub config: SurveyConfig,
    pub records: Vec<MinimaSurveyRecord>,
    pub frequencies: Vec<KeyFrequency>,
    pub egm: Option<f64>,
    pub frequency_variance: Option<f64>,
    pub m: Option<f64>,
    /// Absent when there are no more than `top_k` distinct keys.
    pub split: Option<SharpFlatSplit>,
    pub runs_attempted: u64,
    pub runs_kept: usize,
    /// Runs that diverged; they count as attempted.
    pub runs_failed: u64,
    pub complete: bool,
}

impl SurveyReport {
    pub fn distinct_keys(&self) -> usize {
        self.frequencies.len()
    }

    pub fn mean_test_accuracy(&self) -> Option<f64> {
        if self.records.is_empty() {
            return None;
        }
        Some(self.records.iter().map(|r| r.test_accuracy).sum::<f64>() / self.records.len() as f64)
    }
}

enum RunOutcome {
    Record(MinimaSurveyRecord),
    Rejected,
    Diverged,
}

struct SurveyData {
    train: LabeledDataset,
    test: LabeledDataset,
}

fn run_one(config: &SurveyConfig, data: &SurveyData, seed: u64) -> Result<RunOutcome> {
    let net = Network::mlp(&config.architecture, Activation::Sigmoid, Activation::Sigmoid)?;
    let cfg = TrainConfig { seed, ..config.train.clone() };
    let report = match train(net, &data.train, &cfg) {
        Ok(r) => r,
        Err(Error::NonFiniteLoss { .. }) => return Ok(RunOutcome::Diverged),
        Err(e) => return Err(e),
    };
    let train_accuracy = evaluate(&report.network, &data.train)?.accuracy;
    if !config.keeps(train_accuracy) {
        return Ok(RunOutcome::Rejected);
    }
    let layer = first_hidden_layer(&report.network).expect("MLP has a dense layer");
    let spectrum = layer_spectrum(&report.network.layers()[layer], TypeMode::Simplified, config.epsilon_rel)?;
    let test_accuracy = evaluate(&report.network, &data.test)?.accuracy;
    Ok(RunOutcome::Record(MinimaSurveyRecord { key: spectrum.key().to_vec(), train_accuracy, test_accuracy, seed }))
}

/// Trains seeds `base_seed, base_seed + 1, …` until `target` runs pass the
/// threshold or the attempt cap is hit. Seeds are evaluated `workers` at a
/// time but scanned in seed order, so the report does not depend on the
/// worker count.
pub fn run_survey(config: &SurveyConfig, workers: usize) -> Result<SurveyReport> {
    config.validate()?;
    let data = SurveyData {
        train: gen_taiji(TaiJiSpec { reciprocal: config.train_reciprocal })?,
        test: gen_taiji(TaiJiSpec { reciprocal: config.test_reciprocal })?,
    };
    let chunk = match workers {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        n => n,
    } as u64;

    let mut records = Vec::with_capacity(config.target);
    let mut attempted = 0u64;
    let mut failed = 0u64;
    'outer: while attempted < config.max_attempts {
        let len = chunk.min(config.max_attempts - attempted);
        let seeds: Vec<u64> = (0..len).map(|i| config.base_seed.wrapping_add(attempted + i)).collect();
        let outcomes = map_jobs(seeds, workers, |seed| run_one(config, &data, seed));
        for outcome in outcomes {
            attempted += 1;
            match outcome? {
                RunOutcome::Record(r) => records.push(r),
                RunOutcome::Rejected => {}
                RunOutcome::Diverged => failed += 1,
            }
            if records.len() == config.target {
                break 'outer;
            }
        }
    }
    summarize(config.clone(), records, attempted, failed)
}

/// Builds the report statistics from the records.
pub fn summarize(
    config: SurveyConfig,
    records: Vec<MinimaSurveyRecord>,
    runs_attempted: u64,
    runs_failed: u64,
) -> Result<SurveyReport> {
    let complete = records.len() >= config.target;
    let (frequencies, egm, variance, m) = if records.is_empty() {
        (Vec::new(), None, None, None)
    } else {
        (
            frequency_table(&records)?,
            Some(egm(&records)?),
            Some(frequency_variance(&records)?),
            Some(m_measure(&records)?),
        )
    };
    let split = if frequencies.len() > config.top_k && config.top_k > 0 {
        Some(sharp_vs_flat(&records, config.top_k)?)
    } else {
        None
    };
    Ok(SurveyReport {
        runs_kept: records.len(),
        records,
        frequencies,
        egm,
        frequency_variance: variance,
        m,
        split,
        runs_attempted,
        runs_failed,
        complete,
        config,
    })
}
