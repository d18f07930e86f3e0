use super::adam::{adam_step, clip_global_norm, AdamState};
use super::history::{EpochRecord, TrainHistory};
use super::loss::bce_loss;
use crate::error::{Error, Result};
use crate::layers::TokenBatch;
use crate::metrics::auc;
use crate::tensor::{Matrix, SeededRng};
use crate::text::EncodedDataset;

/// A binary classifier over token batches that can be trained by [`train`].
pub trait Trainable {
    /// Whatever the backward pass needs from a training-mode forward pass.
    type Tape;

    /// Training-mode forward pass returning one probability per row.
    fn forward_train(&self, tokens: &TokenBatch, rng: &mut SeededRng) -> Result<(Vec<f64>, Self::Tape)>;

    /// Gradients for every parameter, in [`Trainable::parameters`] order.
    fn backward(&self, tape: &Self::Tape, d_prob: &[f64]) -> Result<Vec<Matrix>>;

    fn parameters(&self) -> Vec<&Matrix>;

    fn parameters_mut(&mut self) -> Vec<&mut Matrix>;

    /// Applies non-gradient state carried by the tape (batch-norm running
    /// statistics). Called once per batch after the optimizer step.
    fn commit(&mut self, tape: Self::Tape);

    /// Inference-mode probabilities. Must not change any state.
    fn predict(&self, tokens: &TokenBatch) -> Result<Vec<f64>>;

    /// Smallest batch a training step accepts (2 when batch-norm is present).
    fn min_batch(&self) -> usize {
        1
    }
}

/// Consecutive chunks of `order`. A trailing chunk smaller than `min_batch`
/// is merged into the one before it.
fn batches(order: &[usize], batch_size: usize, min_batch: usize) -> Vec<&[usize]> {
    let mut out: Vec<&[usize]> = order.chunks(batch_size).collect();
    if out.len() > 1 && out.last().is_some_and(|c| c.len() < min_batch) {
        out.pop();
        let start = (out.len() - 1) * batch_size;
        *out.last_mut().expect("at least one chunk") = &order[start..];
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub epochs: usize,
    /// Global gradient-norm cap, off by default.
    pub clip_norm: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { batch_size: 256, epochs: 10, clip_norm: None }
    }
}

/// Inference-mode loss and AUC over a whole dataset.
pub fn evaluate<M: Trainable>(model: &M, data: &EncodedDataset) -> Result<(f64, f64)> {
    let probs = model.predict(&data.all_tokens()?)?;
    let (loss, _) = bce_loss(&probs, &data.labels_f64())?;
    Ok((loss, auc(&probs, data.labels())?))
}

pub fn train<M: Trainable>(
    model: &mut M,
    adam: &mut AdamState,
    train_set: &EncodedDataset,
    val_set: &EncodedDataset,
    cfg: &TrainConfig,
    rng: &mut SeededRng,
) -> Result<TrainHistory> {
    train_observed(model, adam, train_set, val_set, cfg, rng, |_, _| {})
}

/// [`train`] with a callback after every epoch (1-based index).
pub fn train_observed<M: Trainable>(
    model: &mut M,
    adam: &mut AdamState,
    train_set: &EncodedDataset,
    val_set: &EncodedDataset,
    cfg: &TrainConfig,
    rng: &mut SeededRng,
    mut on_epoch: impl FnMut(usize, &EpochRecord),
) -> Result<TrainHistory> {
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::Data("training and validation sets must be non-empty".into()));
    }
    if cfg.batch_size == 0 {
        return Err(Error::Config("batch_size must be at least 1".into()));
    }
    let labels = train_set.labels_f64();
    let mut history = TrainHistory::default();
    for epoch in 1..=cfg.epochs {
        let order = rng.permutation(train_set.len());
        let plan = batches(&order, cfg.batch_size, model.min_batch());
        for (b, rows) in plan.iter().enumerate() {
            let tokens = train_set.token_batch(rows)?;
            let y: Vec<f64> = rows.iter().map(|&i| labels[i]).collect();
            let (probs, tape) = model.forward_train(&tokens, rng)?;
            let (loss, d_prob) = bce_loss(&probs, &y)?;
            if !loss.is_finite() {
                return Err(Error::Divergence { epoch, batch: b + 1 });
            }
            let mut grads = model.backward(&tape, &d_prob)?;
            if grads.iter().any(|g| !g.is_finite()) {
                return Err(Error::Divergence { epoch, batch: b + 1 });
            }
            if let Some(max_norm) = cfg.clip_norm {
                clip_global_norm(&mut grads, max_norm);
            }
            adam_step(&mut model.parameters_mut(), &grads, adam)?;
            model.commit(tape);
        }
        let (train_loss, train_auc) = evaluate(model, train_set)?;
        let (val_loss, val_auc) = evaluate(model, val_set)?;
        if !(train_loss.is_finite() && val_loss.is_finite()) {
            return Err(Error::Divergence { epoch, batch: plan.len() });
        }
        let rec = EpochRecord { train_loss, train_auc, val_loss, val_auc };
        on_epoch(epoch, &rec);
        history.push(rec);
    }
    Ok(history)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batch_plan() {
        let order: Vec<usize> = (0..513).collect();
        let sizes = |min| batches(&order, 256, min).iter().map(|c| c.len()).collect::<Vec<_>>();
        assert_eq!(sizes(1), vec![256, 256, 1]);
        assert_eq!(sizes(2), vec![256, 257]);
        let even: Vec<usize> = (0..512).collect();
        assert_eq!(batches(&even, 256, 2).len(), 2);
        assert_eq!(batches(&order[..1], 256, 2).len(), 1);
    }
}
