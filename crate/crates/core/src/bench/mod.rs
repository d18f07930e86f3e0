//! Model zoo, corpus generation and I/O, checkpoints and the comparison run.

pub mod checkpoint;
pub mod compare;
pub mod config;
pub mod container;
pub mod corpus;
pub mod dataset_file;
pub mod generator;
pub mod hyper;
pub mod zoo;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
pub use compare::{run_comparison, train_model, write_report, CompareOutcome};
pub use config::RunConfig;
pub use container::Container;
pub use corpus::{load_corpus, parse_corpus, save_corpus, write_corpus};
pub use dataset_file::DatasetFile;
pub use generator::{generate_corpus, GeneratorConfig};
pub use hyper::HyperParams;
pub use zoo::{Layer, LayerSpec, Model, ModelKind, ModelSpec};
