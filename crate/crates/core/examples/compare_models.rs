//! All five architectures on one generated corpus, as the `compare` command runs them.

use fraudtext::bench::compare::report_table;
use fraudtext::bench::{run_comparison, GeneratorConfig, HyperParams, RunConfig};

fn main() -> fraudtext::Result<()> {
    let cfg = RunConfig {
        hyper: HyperParams { vocab_size: 1500, embedding_dim: 16, maxlen: 30, hidden_size: 8, dense_size: 8, epochs: 3, ..HyperParams::default() },
        generator: GeneratorConfig { total: 900, ratio: 5.0, p_signal: 0.25, ..GeneratorConfig::default() },
        ..RunConfig::default()
    };
    let outcome = run_comparison(&cfg, |msg| eprintln!("{msg}"))?;
    print!("{}", report_table(&outcome.rows));
    Ok(())
}
