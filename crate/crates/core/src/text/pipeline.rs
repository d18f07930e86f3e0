use std::collections::HashSet;

use chrono::NaiveDate;

use super::clean::normalize_words;
use super::data::{encode_label, EncodedDataset, LabeledSentence};
use super::oversample::oversample_minority;
use super::split::{split_indices, SplitMode};
use super::tokenizer::{pad_sequences, Tokenizer, FIRST_WORD};
use crate::error::{Error, Result};
use crate::tensor::SeededRng;

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    /// Size of the index space including the two reserved indices, so the
    /// tokenizer keeps `vocab_size - 2` words and every index is below
    /// `vocab_size`. This is also the number of embedding rows.
    pub vocab_size: usize,
    pub maxlen: usize,
    pub test_fraction: f64,
    pub split_mode: SplitMode,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { vocab_size: 20_000, maxlen: 200, test_fraction: 0.2, split_mode: SplitMode::Stratified, seed: 42 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Preprocessed {
    pub tokenizer: Tokenizer,
    /// Oversampled to 1:1.
    pub train: EncodedDataset,
    /// Never oversampled.
    pub test: EncodedDataset,
}

/// Cleans, removes stopwords, splits, fits the tokenizer on the training
/// part, encodes and pads both parts, then oversamples the training part.
pub fn preprocess(data: &[LabeledSentence], cfg: &PipelineConfig, stoplist: &HashSet<String>) -> Result<Preprocessed> {
    if cfg.vocab_size <= FIRST_WORD as usize {
        return Err(Error::Config(format!("vocab_size must exceed {FIRST_WORD}, got {}", cfg.vocab_size)));
    }
    if cfg.maxlen == 0 {
        return Err(Error::Config("maxlen must be at least 1".into()));
    }
    if data.is_empty() {
        return Err(Error::Data("corpus is empty".into()));
    }
    let words: Vec<Vec<String>> = data.iter().map(|s| normalize_words(s.text(), stoplist)).collect();
    let labels: Vec<_> = data.iter().map(LabeledSentence::label).collect();
    let times: Vec<NaiveDate> = data.iter().map(LabeledSentence::time).collect();

    let mut rng = SeededRng::new(cfg.seed);
    let (train_idx, test_idx) = split_indices(&labels, &times, cfg.test_fraction, &mut rng, cfg.split_mode)?;

    let pick = |idx: &[usize]| idx.iter().map(|&i| words[i].clone()).collect::<Vec<_>>();
    let train_words = pick(&train_idx);
    let tokenizer = Tokenizer::fit(&train_words, cfg.vocab_size - FIRST_WORD as usize)?;

    let encode = |idx: &[usize], w: &[Vec<String>]| {
        EncodedDataset::new(
            cfg.maxlen,
            pad_sequences(&tokenizer.texts_to_sequences(w), cfg.maxlen),
            idx.iter().map(|&i| encode_label(labels[i])).collect(),
            idx.iter().map(|&i| times[i]).collect(),
        )
    };
    let train = encode(&train_idx, &train_words)?;
    let test = encode(&test_idx, &pick(&test_idx))?;
    let train = oversample_minority(&train, &mut rng)?;
    Ok(Preprocessed { tokenizer, train, test })
}
