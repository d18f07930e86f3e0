#![allow(dead_code)]

pub mod gradcheck;

use fraudtext::bench::{generate_corpus, GeneratorConfig, HyperParams};
use fraudtext::layers::TokenBatch;
use fraudtext::tensor::SeededRng;
use fraudtext::text::LabeledSentence;

/// Small enough that a few epochs of every architecture finish in seconds.
pub fn tiny_hyper() -> HyperParams {
    HyperParams {
        vocab_size: 400,
        embedding_dim: 8,
        maxlen: 16,
        batch_size: 32,
        epochs: 2,
        hidden_size: 6,
        dense_size: 6,
        ..HyperParams::default()
    }
}

pub fn corpus(total: usize, ratio: f64, p_signal: f64, seed: u64) -> Vec<LabeledSentence> {
    let cfg = GeneratorConfig { total, ratio, p_signal, seed, base_vocab: 600, signal_vocab: 40, ..GeneratorConfig::default() };
    generate_corpus(&cfg).expect("generator config is valid")
}

pub fn random_tokens(rng: &mut SeededRng, rows: usize, maxlen: usize, vocab: usize) -> TokenBatch {
    let ids = (0..rows * maxlen).map(|_| rng.below(vocab) as u32).collect();
    TokenBatch::new(rows, maxlen, ids).expect("consistent shape")
}
