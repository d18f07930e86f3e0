//! Embedding followed by a bidirectional LSTM, in both output modes.

use fraudtext::layers::{embedding_forward, run_bidirectional, BiOutput, CellKind, CellParams, EmbeddingParams, SeqMode, TokenBatch};
use fraudtext::tensor::SeededRng;

fn main() -> fraudtext::Result<()> {
    let mut rng = SeededRng::new(11);
    let emb = EmbeddingParams::init(&mut rng, 30, 5);
    let fwd = CellParams::init(CellKind::Lstm, &mut rng, 5, 4);
    let bwd = CellParams::init(CellKind::Lstm, &mut rng, 5, 4);
    // two sentences sharing a prefix, padded with zeros
    let tokens = TokenBatch::from_rows(&[[4u32, 9, 17, 0, 0], [4, 9, 2, 25, 0]])?;
    let (seq, _) = embedding_forward(&tokens, &emb)?;
    for mode in [SeqMode::FinalState, SeqMode::FullSequence] {
        let (out, _) = run_bidirectional(&seq, &fwd, &bwd, mode)?;
        match out {
            BiOutput::Final(m) => println!("final states {:?}: {:.3?}", m.shape(), m.row(0)),
            BiOutput::Sequence(s) => println!("sequence {} x {} x {}, last step of row 1: {:.3?}", s.batch(), s.steps(), s.dim(), s.value(1, 4)),
        }
    }
    Ok(())
}
