use std::path::Path;

use chrono::{Datelike, NaiveDate};

use super::checkpoint::{get_tokenizer, put_tokenizer};
use super::container::Container;
use crate::error::{Error, Result};
use crate::text::{EncodedDataset, PipelineConfig, Preprocessed, SplitMode};

pub const DATASET_MAGIC: &[u8; 8] = b"FTXTDATA";
pub const DATASET_VERSION: u32 = 1;

/// Output of `preprocess`: the pipeline settings and the encoded splits.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetFile {
    pub pipeline: PipelineConfig,
    pub data: Preprocessed,
}

fn put_split(c: &mut Container, tag: &str, ds: &EncodedDataset) {
    let flat: Vec<u32> = ds.sequences().iter().flatten().copied().collect();
    c.push_u32(format!("{tag}.tokens"), ds.len(), ds.maxlen(), flat);
    c.push_u32(format!("{tag}.labels"), ds.len(), 1, ds.labels().iter().map(|&l| u32::from(l)).collect());
    let days: Vec<u32> = ds.times().iter().map(|d| d.num_days_from_ce() as u32).collect();
    c.push_u32(format!("{tag}.days"), ds.len(), 1, days);
}

fn get_split(c: &Container, tag: &str) -> Result<EncodedDataset> {
    let (rows, maxlen, tokens) = c.u32s(&format!("{tag}.tokens"))?;
    let (lr, _, labels) = c.u32s(&format!("{tag}.labels"))?;
    let (dr, _, days) = c.u32s(&format!("{tag}.days"))?;
    if lr != rows || dr != rows || maxlen == 0 {
        return Err(Error::Integrity(format!("{tag} split blobs disagree on row count")));
    }
    let sequences = tokens.chunks_exact(maxlen).map(<[u32]>::to_vec).collect();
    let labels = labels
        .iter()
        .map(|&l| u8::try_from(l).map_err(|_| Error::Integrity(format!("{tag} label {l} out of range"))))
        .collect::<Result<Vec<u8>>>()?;
    let times = days
        .iter()
        .map(|&d| NaiveDate::from_num_days_from_ce_opt(d as i32).ok_or_else(|| Error::Integrity(format!("{tag} date {d} invalid"))))
        .collect::<Result<Vec<_>>>()?;
    EncodedDataset::new(maxlen, sequences, labels, times).map_err(|e| Error::Integrity(e.to_string()))
}

impl DatasetFile {
    pub fn to_container(&self) -> Container {
        let mut c = Container::default();
        let p = &self.pipeline;
        c.set("vocab_size", p.vocab_size);
        c.set("maxlen", p.maxlen);
        c.set("test_fraction", p.test_fraction);
        c.set("split_mode", p.split_mode.as_str());
        c.set("seed", p.seed);
        put_tokenizer(&mut c, &self.data.tokenizer);
        put_split(&mut c, "train", &self.data.train);
        put_split(&mut c, "test", &self.data.test);
        c
    }

    pub fn from_container(c: &Container) -> Result<DatasetFile> {
        let split_mode: SplitMode = c.get("split_mode")?.parse().map_err(|e: Error| Error::Integrity(e.to_string()))?;
        let pipeline = PipelineConfig {
            vocab_size: c.parse("vocab_size")?,
            maxlen: c.parse("maxlen")?,
            test_fraction: c.parse("test_fraction")?,
            split_mode,
            seed: c.parse("seed")?,
        };
        let data = Preprocessed { tokenizer: get_tokenizer(c)?, train: get_split(c, "train")?, test: get_split(c, "test")? };
        for ds in [&data.train, &data.test] {
            if ds.maxlen() != pipeline.maxlen {
                return Err(Error::Integrity("split length disagrees with maxlen".into()));
            }
            if ds.max_token().is_some_and(|t| t as usize >= pipeline.vocab_size) {
                return Err(Error::Integrity("token index exceeds vocab_size".into()));
            }
        }
        Ok(DatasetFile { pipeline, data })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.to_container().to_bytes(DATASET_MAGIC, DATASET_VERSION)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<DatasetFile> {
        DatasetFile::from_container(&Container::from_bytes(bytes, DATASET_MAGIC, DATASET_VERSION)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.to_container().write(path, DATASET_MAGIC, DATASET_VERSION)
    }

    pub fn load(path: &Path) -> Result<DatasetFile> {
        DatasetFile::from_container(&Container::read(path, DATASET_MAGIC, DATASET_VERSION)?)
    }
}
