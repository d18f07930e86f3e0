use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::hyper::HyperParams;
use crate::error::{Error, Result};
use crate::layers::{
    batchnorm_backward, batchnorm_forward, bidirectional_backward, dense_backward, dense_forward, dropout_backward,
    dropout_forward, embedding_backward, embedding_forward, flatten_backward, flatten_forward, run_bidirectional,
    BatchNormCache, BatchNormParams, BiCache, BiOutput, CellKind, CellParams, DenseCache, DenseParams, DropoutCache,
    EmbeddingCache, EmbeddingParams, FlattenCache, RunningStats, SeqBatch, SeqMode, TokenBatch,
};
use crate::tensor::{Activation, Matrix, SeededRng};
use crate::train::Trainable;

/// The five architectures, in report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    SimpleNn,
    VanillaRnn,
    Lstm,
    Gru,
    MultiLstm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] =
        [ModelKind::SimpleNn, ModelKind::VanillaRnn, ModelKind::Lstm, ModelKind::Gru, ModelKind::MultiLstm];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::SimpleNn => "simple_nn",
            ModelKind::VanillaRnn => "vanilla_rnn",
            ModelKind::Lstm => "lstm",
            ModelKind::Gru => "gru",
            ModelKind::MultiLstm => "multi_lstm",
        }
    }

    /// Position in [`ModelKind::ALL`]; added to the base seed per model.
    pub fn index(self) -> usize {
        ModelKind::ALL.iter().position(|&k| k == self).expect("listed")
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown model `{s}` (expected one of simple_nn, vanilla_rnn, lstm, gru, multi_lstm)")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LayerSpec {
    Embedding { vocab_size: usize, dim: usize },
    Flatten,
    Bidirectional { cell: CellKind, hidden: usize, mode: SeqMode },
    Dropout { rate: f64 },
    Dense { units: usize, activation: Activation },
    BatchNorm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub layers: Vec<LayerSpec>,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, hp: &HyperParams) -> Self {
        use LayerSpec::*;
        let emb = Embedding { vocab_size: hp.vocab_size, dim: hp.embedding_dim };
        let bi = |cell, mode| Bidirectional { cell, hidden: hp.hidden_size, mode };
        let hidden_dense = Dense { units: hp.dense_size, activation: Activation::Relu };
        let out = Dense { units: 1, activation: Activation::Sigmoid };
        let drop = Dropout { rate: hp.dropout_rate };
        let layers = match kind {
            ModelKind::SimpleNn => vec![emb, Flatten, hidden_dense, out],
            ModelKind::VanillaRnn => vec![emb, bi(CellKind::Rnn, SeqMode::FinalState), hidden_dense, out],
            ModelKind::Lstm => vec![
                emb,
                bi(CellKind::Lstm, SeqMode::FinalState),
                drop.clone(),
                hidden_dense,
                BatchNorm,
                drop,
                out,
            ],
            ModelKind::Gru => vec![emb, bi(CellKind::Gru, SeqMode::FinalState), hidden_dense, out],
            ModelKind::MultiLstm => vec![
                emb,
                bi(CellKind::Lstm, SeqMode::FullSequence),
                bi(CellKind::Lstm, SeqMode::FinalState),
                drop.clone(),
                hidden_dense,
                BatchNorm,
                drop,
                out,
            ],
        };
        ModelSpec { kind, layers }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Layer {
    Embedding(EmbeddingParams),
    Flatten,
    Bidirectional { forward: CellParams, backward: CellParams, mode: SeqMode },
    Dropout(f64),
    Dense(DenseParams, Activation),
    BatchNorm(BatchNormParams),
}

enum Act {
    Tokens(TokenBatch),
    Seq(SeqBatch),
    Flat(Matrix),
}

impl Act {
    fn kind(&self) -> &'static str {
        match self {
            Act::Tokens(_) => "token batch",
            Act::Seq(_) => "sequence",
            Act::Flat(_) => "matrix",
        }
    }
}

enum LayerCache {
    Embedding(EmbeddingCache),
    Flatten(FlattenCache),
    Bidirectional(Box<BiCache>),
    Dropout(DropoutCache),
    Dense(DenseCache),
    BatchNorm(BatchNormCache, Option<RunningStats>),
}

/// Everything a training-mode forward pass leaves for backward.
pub struct Tape {
    caches: Vec<LayerCache>,
    rows: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    spec: ModelSpec,
    layers: Vec<Layer>,
}

/// Rows scored per inference chunk; bounds peak memory without affecting results.
const PREDICT_CHUNK: usize = 256;

impl Model {
    pub fn build(kind: ModelKind, hp: &HyperParams, rng: &mut SeededRng) -> Result<Model> {
        hp.validate()?;
        let spec = ModelSpec::new(kind, hp);
        let mut layers = Vec::with_capacity(spec.layers.len());
        // (sequence dim, flat width); only one is meaningful at a time
        let mut seq_dim = 0;
        let mut width = 0;
        for ls in &spec.layers {
            let layer = match *ls {
                LayerSpec::Embedding { vocab_size, dim } => {
                    seq_dim = dim;
                    Layer::Embedding(EmbeddingParams::init(rng, vocab_size, dim))
                }
                LayerSpec::Flatten => {
                    width = seq_dim * hp.maxlen;
                    Layer::Flatten
                }
                LayerSpec::Bidirectional { cell, hidden, mode } => {
                    let forward = CellParams::init(cell, rng, seq_dim, hidden);
                    let backward = CellParams::init(cell, rng, seq_dim, hidden);
                    seq_dim = 2 * hidden;
                    width = 2 * hidden;
                    Layer::Bidirectional { forward, backward, mode }
                }
                LayerSpec::Dropout { rate } => Layer::Dropout(rate),
                LayerSpec::Dense { units, activation } => {
                    let p = DenseParams::init(rng, width, units);
                    width = units;
                    Layer::Dense(p, activation)
                }
                LayerSpec::BatchNorm => Layer::BatchNorm(BatchNormParams::new(width)),
            };
            layers.push(layer);
        }
        Ok(Model { spec, layers })
    }

    pub fn kind(&self) -> ModelKind {
        self.spec.kind
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Rows in the embedding table.
    pub fn vocab_size(&self) -> usize {
        match &self.layers[0] {
            Layer::Embedding(e) => e.vocab_size(),
            _ => unreachable!("every model starts with an embedding"),
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.parameters().iter().map(|m| m.data().len()).sum()
    }

    /// Named trainable tensors followed by batch-norm running statistics.
    pub fn named_state(&self) -> Vec<(String, &Matrix)> {
        let mut out = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            match layer {
                Layer::Embedding(e) => out.push((format!("{i}.embedding.table"), &e.table)),
                Layer::Bidirectional { forward, backward, .. } => {
                    for (dir, cell) in [("forward", forward), ("backward", backward)] {
                        for (name, t) in cell.tensor_names().iter().zip(cell.tensors()) {
                            out.push((format!("{i}.{dir}.{name}"), t));
                        }
                    }
                }
                Layer::Dense(p, _) => {
                    out.push((format!("{i}.dense.w"), &p.w));
                    out.push((format!("{i}.dense.b"), &p.b));
                }
                Layer::BatchNorm(p) => {
                    out.push((format!("{i}.bn.gamma"), &p.gamma));
                    out.push((format!("{i}.bn.beta"), &p.beta));
                    out.push((format!("{i}.bn.running_mean"), &p.running_mean));
                    out.push((format!("{i}.bn.running_var"), &p.running_var));
                }
                Layer::Flatten | Layer::Dropout(_) => {}
            }
        }
        out
    }

    /// Mutable view in [`Model::named_state`] order.
    pub fn state_mut(&mut self) -> Vec<&mut Matrix> {
        let mut out = Vec::new();
        for layer in &mut self.layers {
            match layer {
                Layer::Embedding(e) => out.push(&mut e.table),
                Layer::Bidirectional { forward, backward, .. } => {
                    out.extend(forward.tensors_mut());
                    out.extend(backward.tensors_mut());
                }
                Layer::Dense(p, _) => {
                    out.push(&mut p.w);
                    out.push(&mut p.b);
                }
                Layer::BatchNorm(p) => {
                    out.push(&mut p.gamma);
                    out.push(&mut p.beta);
                    out.push(&mut p.running_mean);
                    out.push(&mut p.running_var);
                }
                Layer::Flatten | Layer::Dropout(_) => {}
            }
        }
        out
    }

    fn forward(&self, tokens: &TokenBatch, training: bool, rng: &mut SeededRng) -> Result<(Vec<f64>, Vec<LayerCache>)> {
        let mut act = Act::Tokens(tokens.clone());
        let mut caches = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let (next, cache) = match (layer, act) {
                (Layer::Embedding(p), Act::Tokens(t)) => {
                    let (s, c) = embedding_forward(&t, p)?;
                    (Act::Seq(s), LayerCache::Embedding(c))
                }
                (Layer::Flatten, Act::Seq(s)) => {
                    let (m, c) = flatten_forward(&s);
                    (Act::Flat(m), LayerCache::Flatten(c))
                }
                (Layer::Bidirectional { forward, backward, mode }, Act::Seq(s)) => {
                    let (out, c) = run_bidirectional(&s, forward, backward, *mode)?;
                    let next = match out {
                        BiOutput::Final(m) => Act::Flat(m),
                        BiOutput::Sequence(s) => Act::Seq(s),
                    };
                    (next, LayerCache::Bidirectional(Box::new(c)))
                }
                (Layer::Dropout(rate), Act::Flat(m)) => {
                    let (y, c) = dropout_forward(&m, *rate, rng, training)?;
                    (Act::Flat(y), LayerCache::Dropout(c))
                }
                (Layer::Dense(p, a), Act::Flat(m)) => {
                    let (y, c) = dense_forward(&m, p, *a)?;
                    (Act::Flat(y), LayerCache::Dense(c))
                }
                (Layer::BatchNorm(p), Act::Flat(m)) => {
                    let (y, c, stats) = batchnorm_forward(&m, p, training)?;
                    (Act::Flat(y), LayerCache::BatchNorm(c, stats))
                }
                (_, other) => {
                    return Err(Error::Parameter(format!("layer cannot consume a {}", other.kind())));
                }
            };
            act = next;
            caches.push(cache);
        }
        match act {
            Act::Flat(m) if m.cols() == 1 => Ok((m.into_data(), caches)),
            other => Err(Error::Parameter(format!("model ended with a {} instead of one column", other.kind()))),
        }
    }

    /// Scores rows, evaluating each distinct token row once.
    pub fn predict_rows(&self, tokens: &TokenBatch) -> Result<Vec<f64>> {
        let mut slot: HashMap<&[u32], usize> = HashMap::new();
        let mut unique: Vec<usize> = Vec::new();
        let mut which = Vec::with_capacity(tokens.batch());
        for b in 0..tokens.batch() {
            let next = unique.len();
            let u = *slot.entry(tokens.row(b)).or_insert(next);
            if u == next {
                unique.push(b);
            }
            which.push(u);
        }
        // inference never draws from the rng
        let mut rng = SeededRng::new(0);
        let mut scores = Vec::with_capacity(unique.len());
        for chunk in unique.chunks(PREDICT_CHUNK) {
            let (p, _) = self.forward(&tokens.select_rows(chunk), false, &mut rng)?;
            scores.extend(p);
        }
        Ok(which.into_iter().map(|u| scores[u]).collect())
    }
}

impl Trainable for Model {
    type Tape = Tape;

    fn forward_train(&self, tokens: &TokenBatch, rng: &mut SeededRng) -> Result<(Vec<f64>, Tape)> {
        let (p, caches) = self.forward(tokens, true, rng)?;
        Ok((p, Tape { caches, rows: tokens.batch() }))
    }

    fn backward(&self, tape: &Tape, d_prob: &[f64]) -> Result<Vec<Matrix>> {
        if d_prob.len() != tape.rows {
            return Err(Error::shape("model backward", (tape.rows, 1), (d_prob.len(), 1)));
        }
        let mut grad = Matrix::new(tape.rows, 1, d_prob.to_vec())?;
        // per-layer gradient lists, collected back to front
        let mut per_layer: Vec<Vec<Matrix>> = Vec::with_capacity(self.layers.len());
        for (layer, cache) in self.layers.iter().zip(&tape.caches).rev() {
            let grads = match (layer, cache) {
                (Layer::Embedding(_), LayerCache::Embedding(c)) => vec![embedding_backward(c, &grad)?],
                (Layer::Flatten, LayerCache::Flatten(c)) => {
                    grad = flatten_backward(c, &grad)?;
                    vec![]
                }
                (Layer::Bidirectional { forward, backward, .. }, LayerCache::Bidirectional(c)) => {
                    let g = bidirectional_backward(forward, backward, c, &grad)?;
                    grad = g.input;
                    let mut v: Vec<Matrix> = g.forward.tensors().into_iter().cloned().collect();
                    v.extend(g.backward.tensors().into_iter().cloned());
                    v
                }
                (Layer::Dropout(_), LayerCache::Dropout(c)) => {
                    grad = dropout_backward(c, &grad);
                    vec![]
                }
                (Layer::Dense(p, _), LayerCache::Dense(c)) => {
                    let (g, dx) = dense_backward(p, c, &grad)?;
                    grad = dx;
                    vec![g.w, g.b]
                }
                (Layer::BatchNorm(_), LayerCache::BatchNorm(c, _)) => {
                    let (dg, db, dx) = batchnorm_backward(c, &grad)?;
                    grad = dx;
                    vec![dg, db]
                }
                _ => return Err(Error::Parameter("tape does not match the model".into())),
            };
            per_layer.push(grads);
        }
        Ok(per_layer.into_iter().rev().flatten().collect())
    }

    fn parameters(&self) -> Vec<&Matrix> {
        let mut out = Vec::new();
        for layer in &self.layers {
            match layer {
                Layer::Embedding(e) => out.push(&e.table),
                Layer::Bidirectional { forward, backward, .. } => {
                    out.extend(forward.tensors());
                    out.extend(backward.tensors());
                }
                Layer::Dense(p, _) => out.extend([&p.w, &p.b]),
                Layer::BatchNorm(p) => out.extend([&p.gamma, &p.beta]),
                Layer::Flatten | Layer::Dropout(_) => {}
            }
        }
        out
    }

    fn parameters_mut(&mut self) -> Vec<&mut Matrix> {
        let mut out = Vec::new();
        for layer in &mut self.layers {
            match layer {
                Layer::Embedding(e) => out.push(&mut e.table),
                Layer::Bidirectional { forward, backward, .. } => {
                    out.extend(forward.tensors_mut());
                    out.extend(backward.tensors_mut());
                }
                Layer::Dense(p, _) => out.extend([&mut p.w, &mut p.b]),
                Layer::BatchNorm(p) => out.extend([&mut p.gamma, &mut p.beta]),
                Layer::Flatten | Layer::Dropout(_) => {}
            }
        }
        out
    }

    fn commit(&mut self, tape: Tape) {
        for (layer, cache) in self.layers.iter_mut().zip(tape.caches) {
            if let (Layer::BatchNorm(p), LayerCache::BatchNorm(_, Some(stats))) = (layer, cache) {
                p.running_mean = stats.mean;
                p.running_var = stats.var;
            }
        }
    }

    fn predict(&self, tokens: &TokenBatch) -> Result<Vec<f64>> {
        self.predict_rows(tokens)
    }

    fn min_batch(&self) -> usize {
        if self.layers.iter().any(|l| matches!(l, Layer::BatchNorm(_))) {
            2
        } else {
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> HyperParams {
        HyperParams { vocab_size: 30, embedding_dim: 4, maxlen: 6, hidden_size: 3, dense_size: 5, ..Default::default() }
    }

    fn batch(rng: &mut SeededRng, hp: &HyperParams, n: usize) -> TokenBatch {
        let rows: Vec<Vec<u32>> =
            (0..n).map(|_| (0..hp.maxlen).map(|_| rng.below(hp.vocab_size) as u32).collect()).collect();
        TokenBatch::from_rows(&rows).unwrap()
    }

    #[test]
    fn default_embedding_has_three_million_parameters() {
        let hp = HyperParams::default();
        let m = Model::build(ModelKind::SimpleNn, &hp, &mut SeededRng::new(1)).unwrap();
        let Layer::Embedding(e) = &m.layers()[0] else { panic!() };
        assert_eq!(e.table.data().len(), 20_000 * 150);
        assert_eq!(e.table.data().len(), 3_000_000);
    }

    #[test]
    fn every_model_outputs_probabilities_and_covers_its_parameters() {
        let hp = small();
        let mut rng = SeededRng::new(3);
        for kind in ModelKind::ALL {
            let m = Model::build(kind, &hp, &mut rng).unwrap();
            let tokens = batch(&mut rng, &hp, 7);
            let p = m.predict(&tokens).unwrap();
            assert_eq!(p.len(), 7);
            assert!(p.iter().all(|&v| v > 0.0 && v < 1.0), "{kind}");
            let (probs, tape) = m.forward_train(&tokens, &mut rng).unwrap();
            let grads = m.backward(&tape, &vec![0.1; probs.len()]).unwrap();
            let params = m.parameters();
            assert_eq!(grads.len(), params.len(), "{kind}");
            for (g, p) in grads.iter().zip(params) {
                assert_eq!(g.shape(), p.shape(), "{kind}");
            }
        }
    }

    #[test]
    fn same_seed_same_initial_parameters() {
        let hp = small();
        for kind in ModelKind::ALL {
            let a = Model::build(kind, &hp, &mut SeededRng::new(9)).unwrap();
            let b = Model::build(kind, &hp, &mut SeededRng::new(9)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn dedup_prediction_matches_plain_forward() {
        let hp = small();
        let mut rng = SeededRng::new(5);
        let m = Model::build(ModelKind::Lstm, &hp, &mut rng).unwrap();
        let base = batch(&mut rng, &hp, 4);
        let tokens = base.select_rows(&[0, 1, 0, 2, 3, 1]);
        let (plain, _) = m.forward(&tokens, false, &mut rng).unwrap();
        assert_eq!(m.predict(&tokens).unwrap(), plain);
    }

    #[test]
    fn names_round_trip() {
        for kind in ModelKind::ALL {
            assert_eq!(kind.name().parse::<ModelKind>().unwrap(), kind);
        }
        assert!(matches!("transformer".parse::<ModelKind>(), Err(Error::Config(_))));
    }
}
