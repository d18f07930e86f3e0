use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Deserialize;

use super::generator::GeneratorConfig;
use super::hyper::HyperParams;
use crate::error::{Error, Result};
use crate::text::SplitMode;

/// Everything a comparison run needs. Built from defaults, then a config
/// file, then command-line overrides.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub hyper: HyperParams,
    pub generator: GeneratorConfig,
    pub split_mode: SplitMode,
    /// Read this corpus instead of generating one.
    pub corpus: Option<PathBuf>,
    /// Models trained concurrently. Results do not depend on it.
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            hyper: HyperParams::default(),
            generator: GeneratorConfig::default(),
            split_mode: SplitMode::Stratified,
            corpus: None,
            jobs: default_jobs(),
        }
    }
}

/// One worker per core, at most one per model.
pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get()).min(5)
}

/// Flat key-value file: one optional key per field.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    vocab_size: Option<usize>,
    embedding_dim: Option<usize>,
    maxlen: Option<usize>,
    batch_size: Option<usize>,
    epochs: Option<usize>,
    learning_rate: Option<f64>,
    hidden_size: Option<usize>,
    dense_size: Option<usize>,
    dropout_rate: Option<f64>,
    test_fraction: Option<f64>,
    seed: Option<u64>,
    split_mode: Option<String>,
    corpus: Option<PathBuf>,
    total: Option<usize>,
    ratio: Option<f64>,
    p_signal: Option<f64>,
    base_vocab: Option<usize>,
    signal_vocab: Option<usize>,
    min_len: Option<usize>,
    max_len: Option<usize>,
    start_date: Option<String>,
    end_date: Option<String>,
    corpus_seed: Option<u64>,
    jobs: Option<usize>,
}

fn date(key: &str, raw: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(raw, "%Y-%m-%d").map_err(|e| Error::Config(format!("{key}: `{raw}` is not a YYYY-MM-DD date ({e})")))
}

impl RunConfig {
    /// Parses config text on top of the defaults. `base_dir` anchors a relative `corpus` path.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<RunConfig> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut cfg = RunConfig::default();
        let hp = &mut cfg.hyper;
        macro_rules! take {
            ($dst:expr, $($field:ident),*) => { $( if let Some(v) = raw.$field { $dst.$field = v; } )* };
        }
        take!(hp, vocab_size, embedding_dim, maxlen, batch_size, epochs, learning_rate, hidden_size, dense_size, dropout_rate, test_fraction, seed);
        let g = &mut cfg.generator;
        take!(g, total, ratio, p_signal, base_vocab, signal_vocab, min_len, max_len);
        g.seed = raw.corpus_seed.unwrap_or(cfg.hyper.seed);
        if let Some(d) = &raw.start_date {
            g.start_date = date("start_date", d)?;
        }
        if let Some(d) = &raw.end_date {
            g.end_date = date("end_date", d)?;
        }
        if let Some(m) = &raw.split_mode {
            cfg.split_mode = m.parse()?;
        }
        if let Some(j) = raw.jobs {
            if j == 0 {
                return Err(Error::Config("jobs must be at least 1".into()));
            }
            cfg.jobs = j;
        }
        cfg.corpus = raw.corpus.map(|p| if p.is_relative() { base_dir.join(p) } else { p });
        cfg.hyper.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        RunConfig::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}
