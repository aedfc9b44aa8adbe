//! Losses, gradient descent with step schedules, initialization, training
//! loops and accuracy evaluation.

pub mod gradcheck;
mod init;
mod loss;
mod optim;
mod schedule;
mod train;

pub use init::{init_linear_collapse, init_truncated_gaussian, truncated_gaussian, xavier_bound, InitScheme};
pub use loss::{GradSite, LossKind, Reduction};
pub use optim::Optimizer;
pub use schedule::LrSchedule;
pub use train::{
    apply_init, batch_gradient, dataset_loss, evaluate, predict_class, train, train_with_observer, BatchMode,
    Checkpoint, Evaluation, TrainConfig, TrainReport,
};
