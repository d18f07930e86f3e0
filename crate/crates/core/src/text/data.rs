use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::layers::TokenBatch;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    /// Fraudulent.
    F,
    /// Non-fraudulent.
    NF,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::F => "F",
            Label::NF => "NF",
        }
    }

    pub fn parse(token: &str) -> Option<Label> {
        match token {
            "F" => Some(Label::F),
            "NF" => Some(Label::NF),
            _ => None,
        }
    }
}

pub fn encode_label(label: Label) -> u8 {
    match label {
        Label::F => 1,
        Label::NF => 0,
    }
}

pub fn decode_label(bit: u8) -> Result<Label> {
    match bit {
        1 => Ok(Label::F),
        0 => Ok(Label::NF),
        other => Err(Error::Data(format!("label bit must be 0 or 1, got {other}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledSentence {
    text: String,
    label: Label,
    time: NaiveDate,
}

impl LabeledSentence {
    pub fn new(text: impl Into<String>, label: Label, time: NaiveDate) -> Result<Self> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::Data("sentence text is empty".into()));
        }
        Ok(LabeledSentence { text, label, time })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn time(&self) -> NaiveDate {
        self.time
    }
}

/// Fixed-length token rows with their labels and dates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedDataset {
    maxlen: usize,
    sequences: Vec<Vec<u32>>,
    labels: Vec<u8>,
    times: Vec<NaiveDate>,
}

impl EncodedDataset {
    pub fn new(maxlen: usize, sequences: Vec<Vec<u32>>, labels: Vec<u8>, times: Vec<NaiveDate>) -> Result<Self> {
        if maxlen == 0 {
            return Err(Error::Data("maxlen must be at least 1".into()));
        }
        if sequences.len() != labels.len() || labels.len() != times.len() {
            return Err(Error::Data(format!(
                "field lengths differ: {} sequences, {} labels, {} times",
                sequences.len(),
                labels.len(),
                times.len()
            )));
        }
        if let Some(i) = sequences.iter().position(|s| s.len() != maxlen) {
            return Err(Error::Data(format!("row {i} has length {}, expected {maxlen}", sequences[i].len())));
        }
        if let Some(i) = labels.iter().position(|&l| l > 1) {
            return Err(Error::Data(format!("row {i} has label {}", labels[i])));
        }
        Ok(EncodedDataset { maxlen, sequences, labels, times })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn maxlen(&self) -> usize {
        self.maxlen
    }

    pub fn sequences(&self) -> &[Vec<u32>] {
        &self.sequences
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn times(&self) -> &[NaiveDate] {
        &self.times
    }

    pub fn max_token(&self) -> Option<u32> {
        self.sequences.iter().flatten().copied().max()
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&l| l == 1).count();
        (self.len() - pos, pos)
    }

    /// Rows in the given order, duplicates allowed.
    pub fn select(&self, rows: &[usize]) -> EncodedDataset {
        EncodedDataset {
            maxlen: self.maxlen,
            sequences: rows.iter().map(|&i| self.sequences[i].clone()).collect(),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            times: rows.iter().map(|&i| self.times[i]).collect(),
        }
    }

    pub fn token_batch(&self, rows: &[usize]) -> Result<TokenBatch> {
        let picked: Vec<&[u32]> = rows.iter().map(|&i| self.sequences[i].as_slice()).collect();
        TokenBatch::from_rows(&picked)
    }

    pub fn all_tokens(&self) -> Result<TokenBatch> {
        TokenBatch::from_rows(&self.sequences)
    }

    pub fn labels_f64(&self) -> Vec<f64> {
        self.labels.iter().map(|&l| f64::from(l)).collect()
    }
}
