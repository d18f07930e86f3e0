//! Loss, optimizer and the mini-batch training loop.

pub mod adam;
pub mod fit;
pub mod history;
pub mod loss;

pub use adam::{adam_step, clip_global_norm, AdamConfig, AdamState};
pub use fit::{evaluate, train, train_observed, TrainConfig, Trainable};
pub use history::{best_epoch, EpochRecord, TrainHistory};
pub use loss::{bce_loss, BCE_CLAMP};
