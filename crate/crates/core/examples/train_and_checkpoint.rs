//! Train one bidirectional GRU, pick the best epoch, save and reload it.

use fraudtext::bench::{generate_corpus, load_checkpoint, save_checkpoint, train_model, Checkpoint, GeneratorConfig, HyperParams, ModelKind};
use fraudtext::metrics::make_result_row;
use fraudtext::text::{default_stopwords, preprocess, SplitMode};
use fraudtext::train::Trainable;

fn main() -> fraudtext::Result<()> {
    let hp = HyperParams {
        vocab_size: 1500,
        embedding_dim: 24,
        maxlen: 40,
        hidden_size: 12,
        dense_size: 12,
        epochs: 4,
        ..HyperParams::default()
    };
    let corpus = generate_corpus(&GeneratorConfig { total: 1500, ratio: 8.0, p_signal: 0.3, ..GeneratorConfig::default() })?;
    let data = preprocess(&corpus, &hp.pipeline(SplitMode::Stratified), default_stopwords())?;

    let (model, adam, history) = train_model(ModelKind::Gru, &hp, &data, |e, r| {
        println!("epoch {e}: train auc {:.4}  val auc {:.4}  val loss {:.4}", r.train_auc, r.val_auc, r.val_loss)
    })?;
    let row = make_result_row("gru", &history)?;
    println!("best epoch {} with val auc {:.4}", row.best_epoch, row.val_auc);

    let path = std::env::temp_dir().join("fraudtext_example_gru.ckpt");
    let ckpt = Checkpoint { model, hyper: hp, tokenizer: data.tokenizer.clone(), adam: Some(adam), history };
    save_checkpoint(&ckpt, &path)?;
    let back = load_checkpoint(&path)?;
    let tokens = data.test.all_tokens()?;
    assert_eq!(back.model.predict(&tokens)?, ckpt.model.predict(&tokens)?);
    println!("reloaded {} ({} parameters), predictions identical", path.display(), back.model.parameter_count());
    std::fs::remove_file(path)?;
    Ok(())
}
