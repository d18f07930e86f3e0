use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use super::config::RunConfig;
use super::corpus::load_corpus;
use super::generator::generate_corpus;
use super::hyper::HyperParams;
use super::zoo::{Model, ModelKind};
use crate::error::{Error, Result};
use crate::metrics::{make_result_row, ResultRow};
use crate::tensor::SeededRng;
use crate::text::{default_stopwords, preprocess, LabeledSentence, Preprocessed};
use crate::train::{train_observed, AdamState, EpochRecord, TrainHistory, Trainable};

/// Seed for one model in a comparison: base seed plus the model's report position.
pub fn model_seed(base: u64, kind: ModelKind) -> u64 {
    base.wrapping_add(kind.index() as u64)
}

/// Builds and trains one architecture on prepared data.
pub fn train_model(
    kind: ModelKind,
    hp: &HyperParams,
    data: &Preprocessed,
    mut on_epoch: impl FnMut(usize, &EpochRecord),
) -> Result<(Model, AdamState, TrainHistory)> {
    let mut rng = SeededRng::new(model_seed(hp.seed, kind));
    let mut model = Model::build(kind, hp, &mut rng)?;
    let mut adam = AdamState::new(hp.adam(), &model.parameters());
    let history = train_observed(&mut model, &mut adam, &data.train, &data.test, &hp.train_config(), &mut rng, &mut on_epoch)?;
    Ok((model, adam, history))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareOutcome {
    pub rows: Vec<ResultRow>,
    pub histories: Vec<(ModelKind, TrainHistory)>,
}

pub fn load_or_generate(cfg: &RunConfig) -> Result<Vec<LabeledSentence>> {
    match &cfg.corpus {
        Some(path) => load_corpus(path),
        None => generate_corpus(&cfg.generator),
    }
}

/// Prepares one dataset, trains all five models on it and returns rows in
/// report order. Up to `cfg.jobs` models train at once; each owns its model
/// and random stream, so the outcome is the same for any job count.
pub fn run_comparison(cfg: &RunConfig, progress: impl Fn(&str) + Sync) -> Result<CompareOutcome> {
    let corpus = load_or_generate(cfg).map_err(|e| e.in_stage("corpus"))?;
    progress(&format!("corpus: {} sentences", corpus.len()));
    let data = preprocess(&corpus, &cfg.hyper.pipeline(cfg.split_mode), default_stopwords())
        .map_err(|e| e.in_stage("preprocess"))?;
    progress(&format!("preprocess: {} train rows (oversampled), {} test rows", data.train.len(), data.test.len()));

    let run = |kind: ModelKind| -> Result<TrainHistory> {
        let (_, _, history) = train_model(kind, &cfg.hyper, &data, |e, r| {
            progress(&format!(
                "{kind} epoch {e}: train_loss {:.4} train_auc {:.4} val_loss {:.4} val_auc {:.4}",
                r.train_loss, r.train_auc, r.val_loss, r.val_auc
            ))
        })
        .map_err(|e| e.in_stage(format!("train {kind}")))?;
        Ok(history)
    };
    let results: Vec<Result<TrainHistory>> = if cfg.jobs <= 1 {
        ModelKind::ALL.into_iter().map(run).collect()
    } else {
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<Result<TrainHistory>>>> = Mutex::new(ModelKind::ALL.iter().map(|_| None).collect());
        thread::scope(|s| {
            for _ in 0..cfg.jobs.min(ModelKind::ALL.len()) {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(&kind) = ModelKind::ALL.get(i) else { break };
                    let outcome = run(kind);
                    slots.lock().unwrap_or_else(|p| p.into_inner())[i] = Some(outcome);
                });
            }
        });
        slots.into_inner().unwrap_or_else(|p| p.into_inner()).into_iter().map(|r| r.expect("every model ran")).collect()
    };

    let mut rows = Vec::new();
    let mut histories = Vec::new();
    for (kind, result) in ModelKind::ALL.into_iter().zip(results) {
        let history = result?;
        rows.push(make_result_row(kind.name(), &history).map_err(|e| e.in_stage("report"))?);
        histories.push((kind, history));
    }
    Ok(CompareOutcome { rows, histories })
}

pub fn report_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from("model,train_loss,train_auc,val_loss,val_auc,best_epoch\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{},{}", r.model_name, r.train_loss, r.train_auc, r.val_loss, r.val_auc, r.best_epoch);
    }
    out
}

pub fn report_table(rows: &[ResultRow]) -> String {
    let mut out = format!(
        "{:<12} {:>10} {:>10} {:>10} {:>10} {:>10}\n",
        "model", "train_loss", "train_auc", "val_loss", "val_auc", "best_epoch"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<12} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10}",
            r.model_name, r.train_loss, r.train_auc, r.val_loss, r.val_auc, r.best_epoch
        );
    }
    out
}

pub fn history_csv(history: &TrainHistory) -> String {
    let mut out = String::from("epoch,train_loss,train_auc,val_loss,val_auc\n");
    for (i, r) in history.records().iter().enumerate() {
        let _ = writeln!(out, "{},{},{},{},{}", i + 1, r.train_loss, r.train_auc, r.val_loss, r.val_auc);
    }
    out
}

/// Writes `report.csv`, `report.txt` and `history_<model>.csv` into `dir`.
pub fn write_report(outcome: &CompareOutcome, dir: &Path) -> Result<()> {
    let io = |e: std::io::Error| Error::from(e).in_stage("report");
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(dir.join("report.csv"), report_csv(&outcome.rows)).map_err(io)?;
    fs::write(dir.join("report.txt"), report_table(&outcome.rows)).map_err(io)?;
    for (kind, h) in &outcome.histories {
        fs::write(dir.join(format!("history_{kind}.csv")), history_csv(h)).map_err(io)?;
    }
    Ok(())
}
