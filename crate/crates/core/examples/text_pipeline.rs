//! From raw labeled sentences to padded, oversampled index sequences.

use fraudtext::bench::{generate_corpus, GeneratorConfig};
use fraudtext::text::{clean_text, default_stopwords, normalize_words, preprocess, PipelineConfig, SplitMode};

fn main() -> fraudtext::Result<()> {
    let raw = "The Company's revenue FELL by 12%, and the auditors resigned!";
    println!("clean:      {}", clean_text(raw));
    println!("normalized: {:?}", normalize_words(raw, default_stopwords()));

    let corpus = generate_corpus(&GeneratorConfig { total: 1200, ratio: 20.0, ..GeneratorConfig::default() })?;
    for mode in [SplitMode::Stratified, SplitMode::Chronological] {
        let cfg = PipelineConfig { vocab_size: 2000, maxlen: 30, split_mode: mode, ..PipelineConfig::default() };
        let out = preprocess(&corpus, &cfg, default_stopwords())?;
        let (neg, pos) = out.train.class_counts();
        let (tneg, tpos) = out.test.class_counts();
        println!(
            "{mode:?}: train {neg}/{pos} after oversampling, test {tneg}/{tpos}, {} words indexed",
            out.tokenizer.words().len()
        );
        println!("    first test row: {:?}", &out.test.sequences()[0][..12]);
    }
    Ok(())
}
