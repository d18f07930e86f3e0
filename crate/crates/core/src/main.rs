use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use fraudtext::bench::{
    generate_corpus, load_checkpoint, load_corpus, run_comparison, save_checkpoint, save_corpus, train_model,
    write_report, Checkpoint, DatasetFile, GeneratorConfig, HyperParams, ModelKind, RunConfig,
};
use fraudtext::text::{default_stopwords, preprocess, PipelineConfig, SplitMode};
use fraudtext::train::evaluate;

#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

#[derive(Parser)]
#[command(name = "fraudtext", version, about = "Train and compare recurrent classifiers on labeled sentences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic labeled corpus as CSV.
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 3520)]
        total: usize,
        /// Non-fraud sentences per fraud sentence.
        #[arg(long, default_value_t = 175.0)]
        ratio: f64,
        /// Chance that a fraud-sentence word is replaced by a signal word.
        #[arg(long, default_value_t = 0.0)]
        p_signal: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Clean, split, tokenize, pad and oversample a corpus.
    Preprocess {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        maxlen: usize,
        #[arg(long, default_value_t = 20_000)]
        vocab_size: usize,
        #[arg(long, default_value_t = 0.2)]
        test_fraction: f64,
        /// `stratified` or `chronological`.
        #[arg(long, default_value = "stratified")]
        split_mode: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Train one model on an encoded dataset and save a checkpoint.
    Train {
        /// simple_nn, vanilla_rnn, lstm, gru or multi_lstm.
        #[arg(long)]
        model: String,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        #[arg(long, default_value_t = 256)]
        batch_size: usize,
        #[arg(long, default_value_t = 1e-3)]
        lr: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        hidden_size: usize,
        #[arg(long, default_value_t = 64)]
        dense_size: usize,
        #[arg(long, default_value_t = 150)]
        embedding_dim: usize,
        #[arg(long, default_value_t = 0.3)]
        dropout_rate: f64,
    },
    /// Report loss and AUC of a checkpoint on both splits of an encoded dataset.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Train all five models on one dataset and write the comparison report.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides `epochs` from the config file.
        #[arg(long)]
        epochs: Option<usize>,
        /// Overrides `seed` from the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Models trained at once; overrides `jobs` from the config file.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { out, total, ratio, p_signal, seed } => {
            let cfg = GeneratorConfig { total, ratio, p_signal, seed, ..Default::default() };
            let corpus = generate_corpus(&cfg).context("generate stage failed")?;
            save_corpus(&out, &corpus).with_context(|| format!("write stage failed for {}", out.display()))?;
            let (nf, f) = cfg.class_counts()?;
            println!("wrote {} sentences ({nf} NF, {f} F) to {}", corpus.len(), out.display());
        }
        Command::Preprocess { input, out, maxlen, vocab_size, test_fraction, split_mode, seed } => {
            let split_mode: SplitMode = split_mode.parse().context("preprocess stage failed")?;
            let corpus = load_corpus(&input).context("load stage failed")?;
            let pipeline = PipelineConfig { vocab_size, maxlen, test_fraction, split_mode, seed };
            let data = preprocess(&corpus, &pipeline, default_stopwords()).context("preprocess stage failed")?;
            let (neg, pos) = data.train.class_counts();
            println!(
                "train {} rows ({neg} NF, {pos} F after oversampling), test {} rows, {} indexed words",
                data.train.len(),
                data.test.len(),
                data.tokenizer.words().len()
            );
            DatasetFile { pipeline, data }.save(&out).with_context(|| format!("write stage failed for {}", out.display()))?;
        }
        Command::Train { model, data, out, epochs, batch_size, lr, seed, hidden_size, dense_size, embedding_dim, dropout_rate } => {
            let kind: ModelKind = model.parse().context("train stage failed")?;
            let file = DatasetFile::load(&data).with_context(|| format!("load stage failed for {}", data.display()))?;
            let hyper = HyperParams {
                vocab_size: file.pipeline.vocab_size,
                maxlen: file.pipeline.maxlen,
                test_fraction: file.pipeline.test_fraction,
                embedding_dim,
                batch_size,
                epochs,
                learning_rate: lr,
                hidden_size,
                dense_size,
                dropout_rate,
                seed,
            };
            let (model, adam, history) = train_model(kind, &hyper, &file.data, |e, r| {
                println!(
                    "epoch {e}: train_loss {:.4} train_auc {:.4} val_loss {:.4} val_auc {:.4}",
                    r.train_loss, r.train_auc, r.val_loss, r.val_auc
                )
            })
            .context("train stage failed")?;
            let ckpt = Checkpoint { model, hyper, tokenizer: file.data.tokenizer, adam: Some(adam), history };
            save_checkpoint(&ckpt, &out).with_context(|| format!("save stage failed for {}", out.display()))?;
            println!("saved {}", out.display());
        }
        Command::Evaluate { model, data } => {
            let ckpt = load_checkpoint(&model).with_context(|| format!("load stage failed for {}", model.display()))?;
            let file = DatasetFile::load(&data).with_context(|| format!("load stage failed for {}", data.display()))?;
            if ckpt.tokenizer != file.data.tokenizer || ckpt.hyper.maxlen != file.pipeline.maxlen {
                bail!("evaluate stage failed: the dataset was encoded with a different tokenizer or maxlen than the model");
            }
            for (name, split) in [("train", &file.data.train), ("test", &file.data.test)] {
                let (loss, auc) = evaluate(&ckpt.model, split).with_context(|| format!("evaluate stage failed on {name}"))?;
                println!("{name}: loss {loss:.6} auc {auc:.6} ({} rows)", split.len());
            }
        }
        Command::Compare { config, out, epochs, seed, jobs } => {
            let mut cfg = RunConfig::load(&config).context("config stage failed")?;
            if let Some(e) = epochs {
                cfg.hyper.epochs = e;
            }
            if let Some(s) = seed {
                cfg.hyper.seed = s;
                cfg.generator.seed = s;
            }
            if let Some(j) = jobs {
                cfg.jobs = j.max(1);
            }
            let outcome = run_comparison(&cfg, |msg| eprintln!("{msg}"))?;
            write_report(&outcome, &out)?;
            print!("{}", fraudtext::bench::compare::report_table(&outcome.rows));
            println!("report written to {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
