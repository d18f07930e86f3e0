//! Bidirectional recurrent runner with full backpropagation through time.
//!
//! The forward cell reads positions `0..T`, the backward cell reads
//! `T-1..=0`, each with its own parameters. Outputs are concatenated as
//! `[forward | backward]`.
//!
//! Each direction is unrolled as a prefix tree: at every step, rows that
//! reached the same predecessor state and read the same input vector share
//! one node. Their states are equal by construction, so each node is
//! evaluated once and gradients from every row sharing it are summed into it.
//! Padded text makes this pay off: post-padded rows share the whole all-pad
//! suffix in the backward direction, and oversampled duplicates collapse
//! entirely.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::layers::cells::{accumulate_recurrent_grads, step_backward, step_projected, CellParams, RecurrentT, StepCache};
use crate::layers::sequence::SeqBatch;
use crate::tensor::Matrix;

const NO_NODE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SeqMode {
    /// `batch x 2*hidden`: forward state after the last position, backward
    /// state after position 0.
    FinalState,
    /// Per-position `[h_fwd(t) | h_bwd(t)]`, for stacking recurrent layers.
    FullSequence,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BiOutput {
    Final(Matrix),
    Sequence(SeqBatch),
}

#[derive(Clone, Debug)]
struct StepPlan {
    /// Predecessor node index in the previous step, or `NO_NODE` at step 0.
    pred: Vec<u32>,
    /// Input table row read by each node.
    input: Vec<u32>,
}

/// Unrolled schedule for one direction.
#[derive(Clone, Debug)]
struct Unrolled {
    steps: Vec<StepPlan>,
    /// `row_node[s][b]`: the node holding row `b`'s state after step `s`.
    row_node: Vec<Vec<u32>>,
}

fn plan(seq: &SeqBatch, reverse: bool) -> Unrolled {
    let (batch, t_len) = (seq.batch(), seq.steps());
    let mut current = vec![NO_NODE; batch];
    let mut steps = Vec::with_capacity(t_len);
    let mut row_node = Vec::with_capacity(t_len);
    let mut index: HashMap<(u32, u32), u32> = HashMap::new();
    for s in 0..t_len {
        let pos = if reverse { t_len - 1 - s } else { s };
        index.clear();
        let mut step = StepPlan { pred: Vec::new(), input: Vec::new() };
        for (b, cur) in current.iter_mut().enumerate() {
            let key = (*cur, seq.id(b, pos));
            let node = *index.entry(key).or_insert_with(|| {
                step.pred.push(key.0);
                step.input.push(key.1);
                (step.pred.len() - 1) as u32
            });
            *cur = node;
        }
        row_node.push(current.clone());
        steps.push(step);
    }
    Unrolled { steps, row_node }
}

#[derive(Clone, Debug)]
struct DirectionCache {
    unrolled: Unrolled,
    steps: Vec<StepCache>,
}

#[derive(Clone, Debug)]
pub struct BiCache {
    mode: SeqMode,
    input: SeqBatch,
    fwd: DirectionCache,
    bwd: DirectionCache,
    /// FullSequence only: `(position, fwd node, bwd node)` behind each output table row.
    out_rows: Vec<(u32, u32, u32)>,
}

fn gather(m: &Matrix, idx: &[u32]) -> Matrix {
    let mut out = Matrix::zeros(idx.len(), m.cols());
    for (r, &i) in idx.iter().enumerate() {
        out.row_mut(r).copy_from_slice(m.row(i as usize));
    }
    out
}

fn run_direction(seq: &SeqBatch, cell: &CellParams, reverse: bool) -> Result<DirectionCache> {
    let unrolled = plan(seq, reverse);
    let proj_all = seq.table().matmul(cell.w_x())?;
    let hid = cell.hidden();
    let is_lstm = matches!(cell, CellParams::Lstm(_));
    let mut steps: Vec<StepCache> = Vec::with_capacity(unrolled.steps.len());
    for (s, sp) in unrolled.steps.iter().enumerate() {
        let proj = gather(&proj_all, &sp.input);
        let n = sp.pred.len();
        let (h_prev, c_prev) = if s == 0 {
            (Matrix::zeros(n, hid), is_lstm.then(|| Matrix::zeros(n, hid)))
        } else {
            let prev = &steps[s - 1];
            (gather(&prev.h, &sp.pred), prev.c.as_ref().map(|c| gather(c, &sp.pred)))
        };
        steps.push(step_projected(cell, proj, h_prev, c_prev));
    }
    Ok(DirectionCache { unrolled, steps })
}

/// Runs both directions over `seq`.
pub fn run_bidirectional(
    seq: &SeqBatch,
    forward_cell: &CellParams,
    backward_cell: &CellParams,
    mode: SeqMode,
) -> Result<(BiOutput, BiCache)> {
    if seq.steps() == 0 {
        return Err(Error::EmptySequence);
    }
    if forward_cell.hidden() != backward_cell.hidden() {
        return Err(Error::Parameter(format!(
            "bidirectional cells disagree on hidden size: {} vs {}",
            forward_cell.hidden(),
            backward_cell.hidden()
        )));
    }
    for cell in [forward_cell, backward_cell] {
        if seq.dim() != cell.input_dim() {
            return Err(Error::shape("bidirectional input", (seq.batch(), seq.dim()), cell.w_x().shape()));
        }
    }
    let fwd = run_direction(seq, forward_cell, false)?;
    let bwd = run_direction(seq, backward_cell, true)?;
    let (batch, t_len, hid) = (seq.batch(), seq.steps(), forward_cell.hidden());
    let last = t_len - 1;

    let mut out_rows = Vec::new();
    let output = match mode {
        SeqMode::FinalState => {
            let mut out = Matrix::zeros(batch, 2 * hid);
            for b in 0..batch {
                let f = fwd.unrolled.row_node[last][b] as usize;
                let r = bwd.unrolled.row_node[last][b] as usize;
                let row = out.row_mut(b);
                row[..hid].copy_from_slice(fwd.steps[last].h.row(f));
                row[hid..].copy_from_slice(bwd.steps[last].h.row(r));
            }
            BiOutput::Final(out)
        }
        SeqMode::FullSequence => {
            let mut slot: HashMap<(u32, u32, u32), u32> = HashMap::new();
            let mut ids = Vec::with_capacity(batch * t_len);
            for b in 0..batch {
                for t in 0..t_len {
                    let key = (
                        t as u32,
                        fwd.unrolled.row_node[t][b],
                        bwd.unrolled.row_node[last - t][b],
                    );
                    let id = *slot.entry(key).or_insert_with(|| {
                        out_rows.push(key);
                        (out_rows.len() - 1) as u32
                    });
                    ids.push(id);
                }
            }
            let mut table = Matrix::zeros(out_rows.len(), 2 * hid);
            for (u, &(t, f, r)) in out_rows.iter().enumerate() {
                let row = table.row_mut(u);
                row[..hid].copy_from_slice(fwd.steps[t as usize].h.row(f as usize));
                row[hid..].copy_from_slice(bwd.steps[last - t as usize].h.row(r as usize));
            }
            BiOutput::Sequence(SeqBatch::new(batch, t_len, table, ids)?)
        }
    };
    let cache = BiCache { mode, input: seq.clone(), fwd, bwd, out_rows };
    Ok((output, cache))
}

#[derive(Clone, Debug)]
pub struct BiGrads {
    pub forward: CellParams,
    pub backward: CellParams,
    /// Table-shaped gradient of the input sequence.
    pub input: Matrix,
}

/// Per-node gradients of each step's output state.
fn seed_grads(dc: &DirectionCache, hid: usize) -> Vec<Matrix> {
    dc.steps.iter().map(|s| Matrix::zeros(s.h.rows(), hid)).collect()
}

fn add_row_into(dst: &mut Matrix, row: usize, src: &[f64]) {
    for (d, s) in dst.row_mut(row).iter_mut().zip(src) {
        *d += s;
    }
}

/// BPTT through one direction. Returns the parameter gradients and the
/// gradient of the input projection per input table row.
fn backprop_direction(
    cell: &CellParams,
    dcache: &DirectionCache,
    mut dh: Vec<Matrix>,
    table_rows: usize,
) -> (CellParams, Matrix) {
    let hid = cell.hidden();
    let width = cell.proj_width();
    let rt = RecurrentT::of(cell);
    let is_lstm = matches!(cell, CellParams::Lstm(_));
    let mut dc: Vec<Option<Matrix>> =
        dcache.steps.iter().map(|s| is_lstm.then(|| Matrix::zeros(s.h.rows(), hid))).collect();
    let mut d_proj = Matrix::zeros(table_rows, width);
    let mut grads = cell.zeros_like();

    for s in (0..dcache.steps.len()).rev() {
        let sg = step_backward(cell, &rt, &dcache.steps[s], &dh[s], dc[s].as_ref());
        let plan = &dcache.unrolled.steps[s];
        for (node, &u) in plan.input.iter().enumerate() {
            add_row_into(&mut d_proj, u as usize, sg.dpre.row(node));
        }
        if s > 0 {
            let (before, _) = dh.split_at_mut(s);
            let prev = &mut before[s - 1];
            for (node, &p) in plan.pred.iter().enumerate() {
                add_row_into(prev, p as usize, sg.dh_prev.row(node));
            }
            if let Some(dcp) = &sg.dc_prev {
                let prev_c = dc[s - 1].as_mut().expect("lstm carries c");
                for (node, &p) in plan.pred.iter().enumerate() {
                    add_row_into(prev_c, p as usize, dcp.row(node));
                }
            }
        }
        accumulate_recurrent_grads(&mut grads, &dcache.steps[s].h_prev, dcache.steps[s].rh.as_ref(), &sg.dpre);
    }

    (grads, d_proj)
}

/// Backward pass. `d_out` is `batch x 2*hidden` in final-state mode, or the
/// table-shaped gradient of the output sequence in full-sequence mode.
pub fn bidirectional_backward(
    forward_cell: &CellParams,
    backward_cell: &CellParams,
    cache: &BiCache,
    d_out: &Matrix,
) -> Result<BiGrads> {
    let hid = forward_cell.hidden();
    let t_len = cache.input.steps();
    let last = t_len - 1;
    let mut dh_f = seed_grads(&cache.fwd, hid);
    let mut dh_b = seed_grads(&cache.bwd, hid);
    match cache.mode {
        SeqMode::FinalState => {
            if d_out.shape() != (cache.input.batch(), 2 * hid) {
                return Err(Error::shape("bidirectional backward", (cache.input.batch(), 2 * hid), d_out.shape()));
            }
            for b in 0..cache.input.batch() {
                let row = d_out.row(b);
                add_row_into(&mut dh_f[last], cache.fwd.unrolled.row_node[last][b] as usize, &row[..hid]);
                add_row_into(&mut dh_b[last], cache.bwd.unrolled.row_node[last][b] as usize, &row[hid..]);
            }
        }
        SeqMode::FullSequence => {
            if d_out.shape() != (cache.out_rows.len(), 2 * hid) {
                return Err(Error::shape("bidirectional backward", (cache.out_rows.len(), 2 * hid), d_out.shape()));
            }
            for (u, &(t, f, r)) in cache.out_rows.iter().enumerate() {
                let row = d_out.row(u);
                add_row_into(&mut dh_f[t as usize], f as usize, &row[..hid]);
                add_row_into(&mut dh_b[last - t as usize], r as usize, &row[hid..]);
            }
        }
    }
    let table = cache.input.table();
    let (mut g_f, dp_f) = backprop_direction(forward_cell, &cache.fwd, dh_f, table.rows());
    let (mut g_b, dp_b) = backprop_direction(backward_cell, &cache.bwd, dh_b, table.rows());

    set_w_x(&mut g_f, table.t_matmul(&dp_f)?);
    set_w_x(&mut g_b, table.t_matmul(&dp_b)?);
    let d_in_f = dp_f.matmul(&forward_cell.w_x().transpose())?;
    let d_in_b = dp_b.matmul(&backward_cell.w_x().transpose())?;
    let input = d_in_f.add(&d_in_b)?;
    Ok(BiGrads { forward: g_f, backward: g_b, input })
}

fn set_w_x(grads: &mut CellParams, w: Matrix) {
    match grads {
        CellParams::Rnn(p) => p.w_x = w,
        CellParams::Lstm(p) => p.w_x = w,
        CellParams::Gru(p) => p.w_x = w,
    }
}
