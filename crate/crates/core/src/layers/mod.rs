//! Layer forward and backward passes.
//!
//! Every forward function returns its output plus a cache; the matching
//! backward function reads that cache and the upstream gradient and returns
//! gradients only. Parameters and caches are never modified by a backward pass.

pub mod batchnorm;
pub mod bidirectional;
pub mod cells;
pub mod dense;
pub mod dropout;
pub mod embedding;
pub mod flatten;
pub mod sequence;

pub use batchnorm::{batchnorm_backward, batchnorm_forward, BatchNormCache, BatchNormParams, RunningStats};
pub use bidirectional::{bidirectional_backward, run_bidirectional, BiCache, BiGrads, BiOutput, SeqMode};
pub use cells::{
    cell_step, cell_step_backward, gru_cell_step, lstm_cell_step, rnn_cell_step, CellKind, CellParams,
    CellStepGrads, GruCellParams, LstmCellParams, RnnCellParams, StepCache,
};
pub use dense::{dense_backward, dense_forward, DenseCache, DenseParams};
pub use dropout::{dropout_backward, dropout_forward, DropoutCache};
pub use embedding::{embedding_backward, embedding_forward, EmbeddingCache, EmbeddingParams, EMBEDDING_INIT};
pub use flatten::{flatten_backward, flatten_forward, FlattenCache};
pub use sequence::{SeqBatch, TokenBatch};
