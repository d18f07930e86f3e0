//! Recurrent text classifiers written from first principles: dense algebra,
//! layers with hand-derived backward passes, a text preprocessing pipeline,
//! Adam training, exact ROC-AUC and a harness that trains and compares five
//! architectures on the same data.

pub mod bench;
pub mod error;
pub mod layers;
pub mod metrics;
pub mod tensor;
pub mod text;
pub mod train;

pub use error::{Error, Result};
