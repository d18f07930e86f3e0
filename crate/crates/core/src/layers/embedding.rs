use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::layers::sequence::{SeqBatch, TokenBatch};
use crate::tensor::{Matrix, SeededRng};

/// Half-width of the uniform table initialization. A lookup reads one row, so
/// the scale does not depend on the vocabulary size.
pub const EMBEDDING_INIT: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingParams {
    /// `vocab_size x embedding_dim`
    pub table: Matrix,
}

impl EmbeddingParams {
    pub fn init(rng: &mut SeededRng, vocab_size: usize, dim: usize) -> Self {
        let table = Matrix::from_fn(vocab_size, dim, |_, _| rng.uniform_range(-EMBEDDING_INIT, EMBEDDING_INIT));
        EmbeddingParams { table }
    }

    pub fn vocab_size(&self) -> usize {
        self.table.rows()
    }

    pub fn dim(&self) -> usize {
        self.table.cols()
    }
}

#[derive(Clone, Debug)]
pub struct EmbeddingCache {
    /// Token behind each row of the output table.
    row_tokens: Vec<u32>,
    vocab_size: usize,
}

/// Row lookup. The output table holds one row per distinct token, in order
/// of first appearance scanning the batch row by row.
pub fn embedding_forward(tokens: &TokenBatch, p: &EmbeddingParams) -> Result<(SeqBatch, EmbeddingCache)> {
    let vocab = p.vocab_size();
    let mut slot: HashMap<u32, u32> = HashMap::new();
    let mut row_tokens = Vec::new();
    let mut ids = Vec::with_capacity(tokens.ids().len());
    for b in 0..tokens.batch() {
        for t in 0..tokens.steps() {
            let tok = tokens.get(b, t);
            if tok as usize >= vocab {
                return Err(Error::Index {
                    position: format!("batch row {b}, step {t}"),
                    value: tok as usize,
                    limit: vocab,
                });
            }
            let id = *slot.entry(tok).or_insert_with(|| {
                row_tokens.push(tok);
                (row_tokens.len() - 1) as u32
            });
            ids.push(id);
        }
    }
    let table = p.table.gather_rows(&row_tokens.iter().map(|&t| t as usize).collect::<Vec<_>>());
    let seq = SeqBatch::new(tokens.batch(), tokens.steps(), table, ids)?;
    Ok((seq, EmbeddingCache { row_tokens, vocab_size: vocab }))
}

/// Scatters a table-shaped upstream gradient into the embedding matrix
/// gradient. Repeated tokens were already summed when the gradient was folded
/// onto the table.
pub fn embedding_backward(cache: &EmbeddingCache, d_table: &Matrix) -> Result<Matrix> {
    if d_table.rows() != cache.row_tokens.len() {
        return Err(Error::shape(
            "embedding backward",
            (cache.row_tokens.len(), d_table.cols()),
            d_table.shape(),
        ));
    }
    let mut grad = Matrix::zeros(cache.vocab_size, d_table.cols());
    for (u, &tok) in cache.row_tokens.iter().enumerate() {
        for (g, v) in grad.row_mut(tok as usize).iter_mut().zip(d_table.row(u)) {
            *g += v;
        }
    }
    Ok(grad)
}
