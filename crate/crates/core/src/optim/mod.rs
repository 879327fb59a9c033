//! Adam with coupled L2, training configuration, early stopping and the
//! training loop.

mod adam;
mod config;
mod early;
mod train;

pub use adam::AdamState;
pub use config::TrainConfig;
pub use early::{EarlyStopState, Verdict};
pub use train::{evaluate, train, train_with, EpochRecord, TrainLog, TrainOutcome};
