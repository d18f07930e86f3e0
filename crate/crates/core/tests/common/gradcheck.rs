//! Central finite-difference oracle.
//!
//! Every check builds a scalar loss `L = sum(R * output)` with a fixed random
//! `R`, runs the layer's backward pass with upstream gradient `R`, and
//! compares each analytic partial derivative against
//! `(L(theta + h) - L(theta - h)) / 2h`.

#![allow(dead_code)]

use fraudtext::layers::*;
use fraudtext::tensor::{Activation, Matrix, SeededRng};

pub const STEP: f64 = 1e-5;

/// Below this magnitude a gradient entry is compared on an absolute scale.
/// With `h = 1e-5` the difference quotient carries about `1e-16 * |L| / h`
/// of rounding noise, roughly `1e-10` for the losses used here.
pub const FLOOR: f64 = 1e-6;

pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(FLOOR)
}

/// Largest relative error over every entry of `values`.
pub fn fd_max_err(values: &[f64], analytic: &[f64], mut loss: impl FnMut(&[f64]) -> f64) -> f64 {
    assert_eq!(values.len(), analytic.len(), "gradient shape");
    let mut v = values.to_vec();
    let mut worst: f64 = 0.0;
    for i in 0..v.len() {
        let orig = v[i];
        v[i] = orig + STEP;
        let up = loss(&v);
        v[i] = orig - STEP;
        let down = loss(&v);
        v[i] = orig;
        let numeric = (up - down) / (2.0 * STEP);
        worst = worst.max(rel_err(analytic[i], numeric));
    }
    worst
}

fn with_data(m: &Matrix, data: &[f64]) -> Matrix {
    Matrix::new(m.rows(), m.cols(), data.to_vec()).unwrap()
}

fn random(rng: &mut SeededRng, r: usize, c: usize, scale: f64) -> Matrix {
    Matrix::from_fn(r, c, |_, _| rng.uniform_range(-scale, scale))
}

fn dot(a: &Matrix, b: &Matrix) -> f64 {
    a.data().iter().zip(b.data()).map(|(x, y)| x * y).sum()
}

fn dim(rng: &mut SeededRng, lo: usize, hi: usize) -> usize {
    lo + rng.below(hi - lo + 1)
}

pub fn dense(rng: &mut SeededRng) -> f64 {
    let (n, i, o) = (dim(rng, 1, 4), dim(rng, 1, 5), dim(rng, 1, 4));
    let act = [Activation::None, Activation::Relu, Activation::Sigmoid, Activation::Tanh][rng.below(4)];
    let x = random(rng, n, i, 1.5);
    let p = DenseParams::new(random(rng, i, o, 1.0), random(rng, 1, o, 0.5)).unwrap();
    let r = random(rng, n, o, 1.0);
    let (_, cache) = dense_forward(&x, &p, act).unwrap();
    let (g, dx) = dense_backward(&p, &cache, &r).unwrap();
    let loss = |x: &Matrix, p: &DenseParams| dot(&dense_forward(x, p, act).unwrap().0, &r);
    let mut worst = fd_max_err(p.w.data(), g.w.data(), |w| {
        loss(&x, &DenseParams { w: with_data(&p.w, w), b: p.b.clone() })
    });
    worst = worst.max(fd_max_err(p.b.data(), g.b.data(), |b| {
        loss(&x, &DenseParams { w: p.w.clone(), b: with_data(&p.b, b) })
    }));
    worst.max(fd_max_err(x.data(), dx.data(), |xs| loss(&with_data(&x, xs), &p)))
}

pub fn embedding(rng: &mut SeededRng) -> f64 {
    let (vocab, d, b, t) = (dim(rng, 2, 7), dim(rng, 1, 4), dim(rng, 1, 3), dim(rng, 1, 5));
    let ids: Vec<u32> = (0..b * t).map(|_| rng.below(vocab) as u32).collect();
    let tokens = TokenBatch::new(b, t, ids).unwrap();
    let p = EmbeddingParams { table: random(rng, vocab, d, 1.0) };
    let r: Vec<Matrix> = (0..t).map(|_| random(rng, b, d, 1.0)).collect();
    let loss = |p: &EmbeddingParams| {
        let (seq, _) = embedding_forward(&tokens, p).unwrap();
        seq.to_steps().iter().zip(&r).map(|(s, rr)| dot(s, rr)).sum::<f64>()
    };
    let (seq, cache) = embedding_forward(&tokens, &p).unwrap();
    let de = embedding_backward(&cache, &seq.fold_grad(&r).unwrap()).unwrap();
    fd_max_err(p.table.data(), de.data(), |v| loss(&EmbeddingParams { table: with_data(&p.table, v) }))
}

pub fn flatten(rng: &mut SeededRng) -> f64 {
    let (b, t, d) = (dim(rng, 1, 3), dim(rng, 1, 4), dim(rng, 1, 3));
    let steps: Vec<Matrix> = (0..t).map(|_| random(rng, b, d, 1.0)).collect();
    let seq = SeqBatch::from_steps(&steps).unwrap();
    let r = random(rng, b, t * d, 1.0);
    let (_, cache) = flatten_forward(&seq);
    let g = flatten_backward(&cache, &r).unwrap();
    let table = seq.table().clone();
    fd_max_err(table.data(), g.data(), |v| {
        let s = SeqBatch::new(b, t, with_data(&table, v), seq.ids().to_vec()).unwrap();
        dot(&flatten_forward(&s).0, &r)
    })
}

fn replace_tensor(p: &CellParams, which: usize, data: &[f64]) -> CellParams {
    let mut q = p.clone();
    let t = &mut q.tensors_mut()[which];
    t.data_mut().copy_from_slice(data);
    q
}

/// Unrolls `cell` over `xs` with `cell_step`, loss `sum_t R_t * h_t`.
fn unrolled_loss(cell: &CellParams, xs: &[Matrix], h0: &Matrix, c0: &Matrix, r: &[Matrix]) -> f64 {
    let (mut h, mut c) = (h0.clone(), c0.clone());
    let mut total = 0.0;
    for (x, rr) in xs.iter().zip(r) {
        let sc = cell_step(cell, x, &h, Some(&c)).unwrap();
        total += dot(&sc.h, rr);
        h = sc.h;
        if let Some(cc) = sc.c {
            c = cc;
        }
    }
    total
}

/// Multi-step BPTT through a single cell using `cell_step_backward`.
pub fn cell_bptt(rng: &mut SeededRng, kind: CellKind, steps: usize) -> f64 {
    let (b, d, h) = (dim(rng, 1, 3), dim(rng, 1, 4), dim(rng, 1, 4));
    let mut cell = CellParams::init(kind, rng, d, h);
    for t in cell.tensors_mut() {
        for v in t.data_mut() {
            *v = rng.uniform_range(-0.8, 0.8);
        }
    }
    let xs: Vec<Matrix> = (0..steps).map(|_| random(rng, b, d, 1.0)).collect();
    let h0 = random(rng, b, h, 0.5);
    let c0 = random(rng, b, h, 0.5);
    let r: Vec<Matrix> = (0..steps).map(|_| random(rng, b, h, 1.0)).collect();

    let mut caches = Vec::new();
    let (mut hh, mut cc) = (h0.clone(), c0.clone());
    for x in &xs {
        let sc = cell_step(&cell, x, &hh, Some(&cc)).unwrap();
        hh = sc.h.clone();
        if let Some(c) = &sc.c {
            cc = c.clone();
        }
        caches.push(sc);
    }
    let mut grads = cell.zeros_like();
    let mut dxs = vec![Matrix::zeros(b, d); steps];
    let mut dh_next = Matrix::zeros(b, h);
    let mut dc_next: Option<Matrix> = None;
    for t in (0..steps).rev() {
        let dh = r[t].add(&dh_next).unwrap();
        let g = cell_step_backward(&cell, &xs[t], &caches[t], &dh, dc_next.as_ref()).unwrap();
        for (a, bb) in grads.tensors_mut().into_iter().zip(g.params.tensors()) {
            *a = a.add(bb).unwrap();
        }
        dxs[t] = g.dx;
        dh_next = g.dh_prev;
        dc_next = g.dc_prev;
    }

    let mut worst: f64 = 0.0;
    let n_tensors = cell.tensors().len();
    for k in 0..n_tensors {
        let orig = cell.tensors()[k].data().to_vec();
        let an = grads.tensors()[k].data().to_vec();
        worst = worst.max(fd_max_err(&orig, &an, |v| {
            unrolled_loss(&replace_tensor(&cell, k, v), &xs, &h0, &c0, &r)
        }));
    }
    for t in 0..steps {
        worst = worst.max(fd_max_err(xs[t].data(), dxs[t].data(), |v| {
            let mut xs2 = xs.clone();
            xs2[t] = with_data(&xs[t], v);
            unrolled_loss(&cell, &xs2, &h0, &c0, &r)
        }));
    }
    worst = worst.max(fd_max_err(h0.data(), dh_next.data(), |v| {
        unrolled_loss(&cell, &xs, &with_data(&h0, v), &c0, &r)
    }));
    if let Some(dc0) = dc_next {
        worst = worst.max(fd_max_err(c0.data(), dc0.data(), |v| {
            unrolled_loss(&cell, &xs, &h0, &with_data(&c0, v), &r)
        }));
    }
    worst
}

fn random_kind(rng: &mut SeededRng) -> CellKind {
    [CellKind::Rnn, CellKind::Lstm, CellKind::Gru][rng.below(3)]
}

fn perturbed_cell(rng: &mut SeededRng, kind: CellKind, d: usize, h: usize) -> CellParams {
    let mut cell = CellParams::init(kind, rng, d, h);
    for t in cell.tensors_mut() {
        for v in t.data_mut() {
            *v += rng.uniform_range(-0.3, 0.3);
        }
    }
    cell
}

/// Sequence input with some repeated vectors so node sharing is exercised.
fn shared_sequence(rng: &mut SeededRng, b: usize, t: usize, d: usize) -> SeqBatch {
    let distinct = dim(rng, 1, b * t);
    let table = random(rng, distinct, d, 1.0);
    let ids: Vec<u32> = (0..b * t).map(|_| rng.below(distinct) as u32).collect();
    SeqBatch::new(b, t, table, ids).unwrap()
}

fn bi_loss(seq: &SeqBatch, f: &CellParams, r: &CellParams, mode: SeqMode, up: &[Matrix]) -> f64 {
    match run_bidirectional(seq, f, r, mode).unwrap().0 {
        BiOutput::Final(m) => dot(&m, &up[0]),
        BiOutput::Sequence(s) => s.to_steps().iter().zip(up).map(|(a, b)| dot(a, b)).sum(),
    }
}

fn upstream(rng: &mut SeededRng, out: &BiOutput) -> (Vec<Matrix>, Matrix) {
    match out {
        BiOutput::Final(m) => {
            let r = random(rng, m.rows(), m.cols(), 1.0);
            (vec![r.clone()], r)
        }
        BiOutput::Sequence(s) => {
            let r: Vec<Matrix> = (0..s.steps()).map(|_| random(rng, s.batch(), s.dim(), 1.0)).collect();
            let folded = s.fold_grad(&r).unwrap();
            (r, folded)
        }
    }
}

pub fn bidirectional_single(rng: &mut SeededRng) -> f64 {
    let (b, t, d, h) = (dim(rng, 1, 3), dim(rng, 1, 5), dim(rng, 1, 3), dim(rng, 1, 3));
    let kind = random_kind(rng);
    let mode = if rng.bernoulli(0.5) { SeqMode::FinalState } else { SeqMode::FullSequence };
    let f = perturbed_cell(rng, kind, d, h);
    let r = perturbed_cell(rng, kind, d, h);
    let seq = shared_sequence(rng, b, t, d);
    let (out, cache) = run_bidirectional(&seq, &f, &r, mode).unwrap();
    let (up, folded) = upstream(rng, &out);
    let g = bidirectional_backward(&f, &r, &cache, &folded).unwrap();

    let mut worst: f64 = 0.0;
    for k in 0..f.tensors().len() {
        worst = worst.max(fd_max_err(f.tensors()[k].data(), g.forward.tensors()[k].data(), |v| {
            bi_loss(&seq, &replace_tensor(&f, k, v), &r, mode, &up)
        }));
        worst = worst.max(fd_max_err(r.tensors()[k].data(), g.backward.tensors()[k].data(), |v| {
            bi_loss(&seq, &f, &replace_tensor(&r, k, v), mode, &up)
        }));
    }
    worst.max(fd_max_err(seq.table().data(), g.input.data(), |v| {
        let s = SeqBatch::new(b, t, with_data(seq.table(), v), seq.ids().to_vec()).unwrap();
        bi_loss(&s, &f, &r, mode, &up)
    }))
}

struct Stack {
    l1: (CellParams, CellParams),
    l2: (CellParams, CellParams),
}

fn stack_loss(seq: &SeqBatch, s: &Stack, up: &Matrix) -> f64 {
    let BiOutput::Sequence(mid) = run_bidirectional(seq, &s.l1.0, &s.l1.1, SeqMode::FullSequence).unwrap().0 else {
        unreachable!()
    };
    let BiOutput::Final(out) = run_bidirectional(&mid, &s.l2.0, &s.l2.1, SeqMode::FinalState).unwrap().0 else {
        unreachable!()
    };
    dot(&out, up)
}

/// Two stacked bidirectional layers (full-sequence into final-state).
pub fn bidirectional_stacked(rng: &mut SeededRng) -> f64 {
    let (b, t, d, h) = (dim(rng, 1, 3), dim(rng, 1, 4), dim(rng, 1, 3), dim(rng, 1, 3));
    let kind = random_kind(rng);
    let st = Stack {
        l1: (perturbed_cell(rng, kind, d, h), perturbed_cell(rng, kind, d, h)),
        l2: (perturbed_cell(rng, kind, 2 * h, h), perturbed_cell(rng, kind, 2 * h, h)),
    };
    let seq = shared_sequence(rng, b, t, d);
    let (mid, c1) = run_bidirectional(&seq, &st.l1.0, &st.l1.1, SeqMode::FullSequence).unwrap();
    let BiOutput::Sequence(mid) = mid else { unreachable!() };
    let (out, c2) = run_bidirectional(&mid, &st.l2.0, &st.l2.1, SeqMode::FinalState).unwrap();
    let BiOutput::Final(out) = out else { unreachable!() };
    let up = random(rng, out.rows(), out.cols(), 1.0);
    let g2 = bidirectional_backward(&st.l2.0, &st.l2.1, &c2, &up).unwrap();
    let g1 = bidirectional_backward(&st.l1.0, &st.l1.1, &c1, &g2.input).unwrap();

    let mut worst: f64 = 0.0;
    let layers: [(&CellParams, &CellParams, u8); 4] = [
        (&st.l1.0, &g1.forward, 0),
        (&st.l1.1, &g1.backward, 1),
        (&st.l2.0, &g2.forward, 2),
        (&st.l2.1, &g2.backward, 3),
    ];
    for (cell, grad, which) in layers {
        for k in 0..cell.tensors().len() {
            worst = worst.max(fd_max_err(cell.tensors()[k].data(), grad.tensors()[k].data(), |v| {
                let mut s2 = Stack { l1: st.l1.clone(), l2: st.l2.clone() };
                let slot = match which {
                    0 => &mut s2.l1.0,
                    1 => &mut s2.l1.1,
                    2 => &mut s2.l2.0,
                    _ => &mut s2.l2.1,
                };
                *slot = replace_tensor(slot, k, v);
                stack_loss(&seq, &s2, &up)
            }));
        }
    }
    worst.max(fd_max_err(seq.table().data(), g1.input.data(), |v| {
        let s = SeqBatch::new(b, t, with_data(seq.table(), v), seq.ids().to_vec()).unwrap();
        stack_loss(&s, &st, &up)
    }))
}

pub fn dropout_fixed_mask(rng: &mut SeededRng) -> f64 {
    let (n, c) = (dim(rng, 1, 4), dim(rng, 1, 6));
    let rate = rng.uniform_range(0.05, 0.9);
    let x = random(rng, n, c, 2.0);
    let (_, cache) = dropout_forward(&x, rate, rng, true).unwrap();
    let mask = cache.mask().unwrap().to_vec();
    let r = random(rng, n, c, 1.0);
    let dx = dropout_backward(&cache, &r);
    let fixed = DropoutCache::with_mask(mask);
    fd_max_err(x.data(), dx.data(), |v| {
        dot(&fraudtext::layers::dropout::dropout_apply_cached(&with_data(&x, v), &fixed), &r)
    })
}

pub fn batchnorm(rng: &mut SeededRng) -> f64 {
    let (n, c) = (dim(rng, 2, 6), dim(rng, 1, 4));
    let x = random(rng, n, c, 2.0);
    let mut p = BatchNormParams::new(c);
    p.gamma = random(rng, 1, c, 1.5);
    p.beta = random(rng, 1, c, 1.0);
    let r = random(rng, n, c, 1.0);
    let (_, cache, _) = batchnorm_forward(&x, &p, true).unwrap();
    let (dg, db, dx) = batchnorm_backward(&cache, &r).unwrap();
    let loss = |x: &Matrix, p: &BatchNormParams| dot(&batchnorm_forward(x, p, true).unwrap().0, &r);
    let mut worst = fd_max_err(x.data(), dx.data(), |v| loss(&with_data(&x, v), &p));
    worst = worst.max(fd_max_err(p.gamma.data(), dg.data(), |v| {
        let mut q = p.clone();
        q.gamma = with_data(&p.gamma, v);
        loss(&x, &q)
    }));
    worst.max(fd_max_err(p.beta.data(), db.data(), |v| {
        let mut q = p.clone();
        q.beta = with_data(&p.beta, v);
        loss(&x, &q)
    }))
}
