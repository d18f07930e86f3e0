use std::path::Path;

use super::container::Container;
use super::hyper::HyperParams;
use super::zoo::{Model, ModelKind};
use crate::error::{Error, Result};
use crate::tensor::SeededRng;
use crate::text::Tokenizer;
use crate::train::{AdamConfig, AdamState, EpochRecord, TrainHistory, Trainable};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"FTXTCKPT";
pub const CHECKPOINT_VERSION: u32 = 1;

/// A trained model with everything needed to score new text.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub model: Model,
    pub hyper: HyperParams,
    pub tokenizer: Tokenizer,
    pub adam: Option<AdamState>,
    pub history: TrainHistory,
}

pub(crate) fn put_hyper(c: &mut Container, hp: &HyperParams) {
    c.set("hp.vocab_size", hp.vocab_size);
    c.set("hp.embedding_dim", hp.embedding_dim);
    c.set("hp.maxlen", hp.maxlen);
    c.set("hp.batch_size", hp.batch_size);
    c.set("hp.epochs", hp.epochs);
    c.set("hp.learning_rate", hp.learning_rate);
    c.set("hp.hidden_size", hp.hidden_size);
    c.set("hp.dense_size", hp.dense_size);
    c.set("hp.dropout_rate", hp.dropout_rate);
    c.set("hp.test_fraction", hp.test_fraction);
    c.set("hp.seed", hp.seed);
}

pub(crate) fn get_hyper(c: &Container) -> Result<HyperParams> {
    Ok(HyperParams {
        vocab_size: c.parse("hp.vocab_size")?,
        embedding_dim: c.parse("hp.embedding_dim")?,
        maxlen: c.parse("hp.maxlen")?,
        batch_size: c.parse("hp.batch_size")?,
        epochs: c.parse("hp.epochs")?,
        learning_rate: c.parse("hp.learning_rate")?,
        hidden_size: c.parse("hp.hidden_size")?,
        dense_size: c.parse("hp.dense_size")?,
        dropout_rate: c.parse("hp.dropout_rate")?,
        test_fraction: c.parse("hp.test_fraction")?,
        seed: c.parse("hp.seed")?,
    })
}

pub(crate) fn put_tokenizer(c: &mut Container, tok: &Tokenizer) {
    c.set("tokenizer.capacity", tok.vocab_size());
    c.set("tokenizer.words", tok.words().join(" "));
}

pub(crate) fn get_tokenizer(c: &Container) -> Result<Tokenizer> {
    let words: Vec<String> = c.get("tokenizer.words")?.split(' ').filter(|w| !w.is_empty()).map(str::to_owned).collect();
    let capacity: usize = c.parse("tokenizer.capacity")?;
    if words.len() > capacity {
        return Err(Error::Integrity(format!("tokenizer lists {} words but capacity is {capacity}", words.len())));
    }
    Ok(Tokenizer::from_words(words, capacity))
}

impl Checkpoint {
    pub fn to_container(&self) -> Container {
        let mut c = Container::default();
        c.set("model", self.model.kind().name());
        put_hyper(&mut c, &self.hyper);
        put_tokenizer(&mut c, &self.tokenizer);
        c.set("history.epochs", self.history.len());
        for (i, r) in self.history.records().iter().enumerate() {
            c.set(&format!("history.{}", i + 1), format!("{},{},{},{}", r.train_loss, r.train_auc, r.val_loss, r.val_auc));
        }
        for (name, m) in self.model.named_state() {
            c.push_matrix(format!("param.{name}"), m);
        }
        if let Some(adam) = &self.adam {
            c.set("adam.t", adam.t);
            c.set("adam.lr", adam.config.lr);
            c.set("adam.beta1", adam.config.beta1);
            c.set("adam.beta2", adam.config.beta2);
            c.set("adam.eps", adam.config.eps);
            for (i, (m, v)) in adam.m.iter().zip(&adam.v).enumerate() {
                c.push_matrix(format!("adam.m.{i}"), m);
                c.push_matrix(format!("adam.v.{i}"), v);
            }
        }
        c
    }

    pub fn from_container(c: &Container) -> Result<Checkpoint> {
        let kind: ModelKind = c.get("model")?.parse().map_err(|e: Error| Error::Integrity(e.to_string()))?;
        let hyper = get_hyper(c)?;
        let mut model = Model::build(kind, &hyper, &mut SeededRng::new(0)).map_err(|e| Error::Integrity(e.to_string()))?;
        let names: Vec<String> = model.named_state().into_iter().map(|(n, _)| n).collect();
        for (name, slot) in names.iter().zip(model.state_mut()) {
            let stored = c.matrix(&format!("param.{name}"))?;
            if stored.shape() != slot.shape() {
                return Err(Error::Integrity(format!(
                    "parameter `{name}` has shape {:?}, the model expects {:?}",
                    stored.shape(),
                    slot.shape()
                )));
            }
            *slot = stored.clone();
        }
        let tokenizer = get_tokenizer(c)?;
        let epochs: usize = c.parse("history.epochs")?;
        let mut history = TrainHistory::default();
        for i in 1..=epochs {
            let key = format!("history.{i}");
            let vals: Vec<f64> = c
                .get(&key)?
                .split(',')
                .map(|v| v.parse().map_err(|_| Error::Integrity(format!("bad number in `{key}`"))))
                .collect::<Result<_>>()?;
            let [train_loss, train_auc, val_loss, val_auc] = vals[..] else {
                return Err(Error::Integrity(format!("`{key}` needs 4 values")));
            };
            history.push(EpochRecord { train_loss, train_auc, val_loss, val_auc });
        }
        let adam = if c.meta.contains_key("adam.t") {
            let config = AdamConfig {
                lr: c.parse("adam.lr")?,
                beta1: c.parse("adam.beta1")?,
                beta2: c.parse("adam.beta2")?,
                eps: c.parse("adam.eps")?,
            };
            let params = model.parameters();
            let mut m = Vec::with_capacity(params.len());
            let mut v = Vec::with_capacity(params.len());
            for (i, p) in params.iter().enumerate() {
                for (dst, tag) in [(&mut m, "m"), (&mut v, "v")] {
                    let stored = c.matrix(&format!("adam.{tag}.{i}"))?;
                    if stored.shape() != p.shape() {
                        return Err(Error::Integrity(format!("adam moment {tag}.{i} does not match its parameter")));
                    }
                    dst.push(stored.clone());
                }
            }
            Some(AdamState { config, t: c.parse("adam.t")?, m, v })
        } else {
            None
        };
        Ok(Checkpoint { model, hyper, tokenizer, adam, history })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.to_container().to_bytes(CHECKPOINT_MAGIC, CHECKPOINT_VERSION)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Checkpoint> {
        Checkpoint::from_container(&Container::from_bytes(bytes, CHECKPOINT_MAGIC, CHECKPOINT_VERSION)?)
    }
}

pub fn save_checkpoint(ckpt: &Checkpoint, path: &Path) -> Result<()> {
    ckpt.to_container().write(path, CHECKPOINT_MAGIC, CHECKPOINT_VERSION)
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    Checkpoint::from_container(&Container::read(path, CHECKPOINT_MAGIC, CHECKPOINT_VERSION)?)
}
