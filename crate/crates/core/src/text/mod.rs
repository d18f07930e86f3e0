//! Sentence cleaning, tokenization, padding, splitting and oversampling.

pub mod clean;
pub mod data;
pub mod oversample;
pub mod pipeline;
pub mod split;
pub mod tokenizer;

pub use clean::{clean_text, default_stopwords, normalize_words, remove_stopwords};
pub use data::{decode_label, encode_label, EncodedDataset, Label, LabeledSentence};
pub use oversample::oversample_minority;
pub use pipeline::{preprocess, PipelineConfig, Preprocessed};
pub use split::{split_indices, split_train_test, SplitMode};
pub use tokenizer::{pad_sequences, Tokenizer, OOV, PAD};
