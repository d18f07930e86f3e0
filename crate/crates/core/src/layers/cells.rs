//! Recurrent cells.
//!
//! Each cell's input projection `x W_x` is kept separate from the recurrent
//! part so the sequence runner can compute it once per distinct input
//! vector. Pre-activations are always formed as `(x W_x + h W_h) + b`, in that
//! order, whether a step is driven through [`cell_step`] or the runner.
//!
//! Gate blocks are stored side by side in the column dimension:
//!
//! * LSTM: `[input | forget | output | candidate]`, each `hidden` wide.
//!   `c_t = f * c_prev + i * c~`, `h_t = o * tanh(c_t)`.
//! * GRU: `[update z | reset r | candidate h~]`. The candidate sees the reset
//!   hidden state, `h~ = tanh(x W_x^h + (r * h_prev) W_h^h + b^h)`, and the new
//!   state is `h_t = (1 - z) * h_prev + z * h~`.

use crate::error::{Error, Result};
use crate::tensor::{glorot_uniform, sigmoid_in_place, tanh_in_place, Matrix, SeededRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellKind {
    Rnn,
    Lstm,
    Gru,
}

impl CellKind {
    pub fn gates(self) -> usize {
        match self {
            CellKind::Rnn => 1,
            CellKind::Lstm => 4,
            CellKind::Gru => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RnnCellParams {
    pub w_x: Matrix,
    pub w_h: Matrix,
    pub b: Matrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LstmCellParams {
    /// `input_dim x 4*hidden`
    pub w_x: Matrix,
    /// `hidden x 4*hidden`
    pub w_h: Matrix,
    /// `1 x 4*hidden`
    pub b: Matrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GruCellParams {
    /// `input_dim x 3*hidden`
    pub w_x: Matrix,
    /// `hidden x 2*hidden`, the update and reset blocks.
    pub w_hzr: Matrix,
    /// `hidden x hidden`, the candidate block.
    pub w_hn: Matrix,
    /// `1 x 3*hidden`
    pub b: Matrix,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CellParams {
    Rnn(RnnCellParams),
    Lstm(LstmCellParams),
    Gru(GruCellParams),
}

/// Glorot-initialized gate blocks, each `rows x hidden`, laid side by side.
fn gate_blocks(rng: &mut SeededRng, rows: usize, hidden: usize, gates: usize) -> Matrix {
    let blocks: Vec<Matrix> = (0..gates).map(|_| glorot_uniform(rng, rows, hidden)).collect();
    Matrix::from_fn(rows, hidden * gates, |i, j| blocks[j / hidden].get(i, j % hidden))
}

impl CellParams {
    /// Input and recurrent weights are Glorot-uniform per gate block; biases are zero.
    pub fn init(kind: CellKind, rng: &mut SeededRng, input_dim: usize, hidden: usize) -> Self {
        let g = kind.gates();
        let w_x = gate_blocks(rng, input_dim, hidden, g);
        match kind {
            CellKind::Rnn => CellParams::Rnn(RnnCellParams {
                w_x,
                w_h: gate_blocks(rng, hidden, hidden, 1),
                b: Matrix::zeros(1, hidden),
            }),
            CellKind::Lstm => CellParams::Lstm(LstmCellParams {
                w_x,
                w_h: gate_blocks(rng, hidden, hidden, 4),
                b: Matrix::zeros(1, 4 * hidden),
            }),
            CellKind::Gru => CellParams::Gru(GruCellParams {
                w_x,
                w_hzr: gate_blocks(rng, hidden, hidden, 2),
                w_hn: gate_blocks(rng, hidden, hidden, 1),
                b: Matrix::zeros(1, 3 * hidden),
            }),
        }
    }

    pub fn kind(&self) -> CellKind {
        match self {
            CellParams::Rnn(_) => CellKind::Rnn,
            CellParams::Lstm(_) => CellKind::Lstm,
            CellParams::Gru(_) => CellKind::Gru,
        }
    }

    pub fn w_x(&self) -> &Matrix {
        match self {
            CellParams::Rnn(p) => &p.w_x,
            CellParams::Lstm(p) => &p.w_x,
            CellParams::Gru(p) => &p.w_x,
        }
    }

    fn w_x_mut(&mut self) -> &mut Matrix {
        match self {
            CellParams::Rnn(p) => &mut p.w_x,
            CellParams::Lstm(p) => &mut p.w_x,
            CellParams::Gru(p) => &mut p.w_x,
        }
    }

    pub fn bias(&self) -> &Matrix {
        match self {
            CellParams::Rnn(p) => &p.b,
            CellParams::Lstm(p) => &p.b,
            CellParams::Gru(p) => &p.b,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.w_x().rows()
    }

    /// Width of the gate pre-activation row (`hidden * gates`).
    pub fn proj_width(&self) -> usize {
        self.w_x().cols()
    }

    pub fn hidden(&self) -> usize {
        self.proj_width() / self.kind().gates()
    }

    /// Parameter tensors in a fixed order (input weights, recurrent weights, bias).
    pub fn tensors(&self) -> Vec<&Matrix> {
        match self {
            CellParams::Rnn(p) => vec![&p.w_x, &p.w_h, &p.b],
            CellParams::Lstm(p) => vec![&p.w_x, &p.w_h, &p.b],
            CellParams::Gru(p) => vec![&p.w_x, &p.w_hzr, &p.w_hn, &p.b],
        }
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Matrix> {
        match self {
            CellParams::Rnn(p) => vec![&mut p.w_x, &mut p.w_h, &mut p.b],
            CellParams::Lstm(p) => vec![&mut p.w_x, &mut p.w_h, &mut p.b],
            CellParams::Gru(p) => vec![&mut p.w_x, &mut p.w_hzr, &mut p.w_hn, &mut p.b],
        }
    }

    pub fn tensor_names(&self) -> &'static [&'static str] {
        match self.kind() {
            CellKind::Rnn | CellKind::Lstm => &["w_x", "w_h", "b"],
            CellKind::Gru => &["w_x", "w_hzr", "w_hn", "b"],
        }
    }

    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        for t in z.tensors_mut() {
            t.data_mut().fill(0.0);
        }
        z
    }

    pub fn add_assign(&mut self, other: &CellParams) {
        for (a, b) in self.tensors_mut().into_iter().zip(other.tensors()) {
            a.add_assign(b);
        }
    }

    fn check_shapes(&self) -> Result<()> {
        let h = self.hidden();
        let ok = match self {
            CellParams::Rnn(p) => p.w_h.shape() == (h, h) && p.b.shape() == (1, h),
            CellParams::Lstm(p) => p.w_h.shape() == (h, 4 * h) && p.b.shape() == (1, 4 * h),
            CellParams::Gru(p) => {
                p.w_hzr.shape() == (h, 2 * h) && p.w_hn.shape() == (h, h) && p.b.shape() == (1, 3 * h)
            }
        };
        if ok && self.proj_width().is_multiple_of(self.kind().gates()) {
            Ok(())
        } else {
            Err(Error::Parameter(format!("inconsistent {:?} cell parameter shapes", self.kind())))
        }
    }
}

/// Everything one step's backward pass needs, for the rows that step computed.
#[derive(Clone, Debug)]
pub struct StepCache {
    pub h_prev: Matrix,
    pub c_prev: Option<Matrix>,
    /// Activated gates, `rows x proj_width`.
    pub gates: Matrix,
    pub c: Option<Matrix>,
    pub tanh_c: Option<Matrix>,
    /// GRU only: `r * h_prev`.
    pub rh: Option<Matrix>,
    pub h: Matrix,
}

/// Transposed recurrent weights, computed once per backward pass.
pub(crate) enum RecurrentT {
    Single(Matrix),
    Gru { zr: Matrix, n: Matrix },
}

impl RecurrentT {
    pub(crate) fn of(p: &CellParams) -> Self {
        match p {
            CellParams::Rnn(p) => RecurrentT::Single(p.w_h.transpose()),
            CellParams::Lstm(p) => RecurrentT::Single(p.w_h.transpose()),
            CellParams::Gru(p) => RecurrentT::Gru { zr: p.w_hzr.transpose(), n: p.w_hn.transpose() },
        }
    }
}

pub(crate) struct StepGrad {
    /// Gradient of the gate pre-activations, `rows x proj_width`; equals the
    /// gradient of the input projection.
    pub dpre: Matrix,
    pub dh_prev: Matrix,
    pub dc_prev: Option<Matrix>,
}

fn cols(m: &Matrix, from: usize, to: usize) -> Matrix {
    Matrix::from_fn(m.rows(), to - from, |i, j| m.get(i, from + j))
}

/// Forward step for rows whose input projection is already known.
pub(crate) fn step_projected(p: &CellParams, proj: Matrix, h_prev: Matrix, c_prev: Option<Matrix>) -> StepCache {
    let n = proj.rows();
    match p {
        CellParams::Rnn(p) => {
            let rec = h_prev.matmul(&p.w_h).expect("recurrent shape");
            let mut h = proj;
            let w = h.cols();
            let bias = p.b.data();
            for i in 0..n {
                let row = &mut h.data_mut()[i * w..(i + 1) * w];
                let r = rec.row(i);
                for j in 0..w {
                    row[j] = (row[j] + r[j]) + bias[j];
                }
                tanh_in_place(row);
            }
            StepCache { h_prev, c_prev: None, gates: h.clone(), c: None, tanh_c: None, rh: None, h }
        }
        CellParams::Lstm(p) => {
            let hid = p.w_h.rows();
            let rec = h_prev.matmul(&p.w_h).expect("recurrent shape");
            let mut gates = proj;
            let w = 4 * hid;
            let bias = p.b.data();
            let c_prev = c_prev.unwrap_or_else(|| Matrix::zeros(n, hid));
            let mut c = Matrix::zeros(n, hid);
            let mut tanh_c = Matrix::zeros(n, hid);
            let mut h = Matrix::zeros(n, hid);
            for i in 0..n {
                let g = &mut gates.data_mut()[i * w..(i + 1) * w];
                let r = rec.row(i);
                for j in 0..w {
                    g[j] = (g[j] + r[j]) + bias[j];
                }
                sigmoid_in_place(&mut g[..3 * hid]);
                tanh_in_place(&mut g[3 * hid..]);
                let cp = c_prev.row(i);
                let cv = &mut c.data_mut()[i * hid..(i + 1) * hid];
                for k in 0..hid {
                    cv[k] = g[hid + k] * cp[k] + g[k] * g[3 * hid + k];
                }
            }
            tanh_c.data_mut().copy_from_slice(c.data());
            tanh_in_place(tanh_c.data_mut());
            for i in 0..n {
                let og = &gates.row(i)[2 * hid..3 * hid];
                let tv = tanh_c.row(i);
                let hv = h.row_mut(i);
                for k in 0..hid {
                    hv[k] = og[k] * tv[k];
                }
            }
            StepCache { h_prev, c_prev: Some(c_prev), gates, c: Some(c), tanh_c: Some(tanh_c), rh: None, h }
        }
        CellParams::Gru(p) => {
            let hid = p.w_hn.rows();
            let rec = h_prev.matmul(&p.w_hzr).expect("recurrent shape");
            let mut gates = proj;
            let w = 3 * hid;
            let bias = p.b.data();
            let mut rh = Matrix::zeros(n, hid);
            for i in 0..n {
                let g = &mut gates.data_mut()[i * w..(i + 1) * w];
                let r = rec.row(i);
                for j in 0..2 * hid {
                    g[j] = (g[j] + r[j]) + bias[j];
                }
                sigmoid_in_place(&mut g[..2 * hid]);
                let hp = h_prev.row(i);
                let out = rh.row_mut(i);
                for k in 0..hid {
                    out[k] = g[hid + k] * hp[k];
                }
            }
            let rec_n = rh.matmul(&p.w_hn).expect("recurrent shape");
            let mut h = Matrix::zeros(n, hid);
            for i in 0..n {
                let g = &mut gates.data_mut()[i * w..(i + 1) * w];
                let r = rec_n.row(i);
                let hp = h_prev.row(i);
                let out = &mut h.data_mut()[i * hid..(i + 1) * hid];
                for k in 0..hid {
                    g[2 * hid + k] = (g[2 * hid + k] + r[k]) + bias[2 * hid + k];
                }
                tanh_in_place(&mut g[2 * hid..]);
                for k in 0..hid {
                    let z = g[k];
                    out[k] = (1.0 - z) * hp[k] + z * g[2 * hid + k];
                }
            }
            StepCache { h_prev, c_prev: None, gates, c: None, tanh_c: None, rh: Some(rh), h }
        }
    }
}

/// Backward through one step. `dh` and `dc` are the total gradients arriving
/// at this step's outputs.
pub(crate) fn step_backward(
    p: &CellParams,
    rt: &RecurrentT,
    cache: &StepCache,
    dh: &Matrix,
    dc: Option<&Matrix>,
) -> StepGrad {
    let n = dh.rows();
    match (p, rt) {
        (CellParams::Rnn(_), RecurrentT::Single(w_ht)) => {
            let mut dpre = dh.clone();
            for (g, &h) in dpre.data_mut().iter_mut().zip(cache.h.data()) {
                *g *= 1.0 - h * h;
            }
            let dh_prev = dpre.matmul(w_ht).expect("shape");
            StepGrad { dpre, dh_prev, dc_prev: None }
        }
        (CellParams::Lstm(_), RecurrentT::Single(w_ht)) => {
            let hid = dh.cols();
            let w = 4 * hid;
            let tanh_c = cache.tanh_c.as_ref().expect("lstm cache");
            let c_prev = cache.c_prev.as_ref().expect("lstm cache");
            let mut dpre = Matrix::zeros(n, w);
            let mut dc_prev = Matrix::zeros(n, hid);
            for i in 0..n {
                let g = cache.gates.row(i);
                let d = &mut dpre.data_mut()[i * w..(i + 1) * w];
                let dhr = dh.row(i);
                let tc = tanh_c.row(i);
                let cp = c_prev.row(i);
                let dcr = dc.map(|m| m.row(i));
                let dcp = &mut dc_prev.data_mut()[i * hid..(i + 1) * hid];
                for k in 0..hid {
                    let (ig, fg, og, cand) = (g[k], g[hid + k], g[2 * hid + k], g[3 * hid + k]);
                    let carried = dcr.map_or(0.0, |r| r[k]);
                    let dct = carried + dhr[k] * og * (1.0 - tc[k] * tc[k]);
                    let d_o = dhr[k] * tc[k];
                    d[k] = dct * cand * ig * (1.0 - ig);
                    d[hid + k] = dct * cp[k] * fg * (1.0 - fg);
                    d[2 * hid + k] = d_o * og * (1.0 - og);
                    d[3 * hid + k] = dct * ig * (1.0 - cand * cand);
                    dcp[k] = dct * fg;
                }
            }
            let dh_prev = dpre.matmul(w_ht).expect("shape");
            StepGrad { dpre, dh_prev, dc_prev: Some(dc_prev) }
        }
        (CellParams::Gru(_), RecurrentT::Gru { zr: w_zr_t, n: w_n_t }) => {
            let hid = dh.cols();
            let w = 3 * hid;
            let mut dpre = Matrix::zeros(n, w);
            let mut dh_prev = Matrix::zeros(n, hid);
            let mut dpre_n = Matrix::zeros(n, hid);
            for i in 0..n {
                let g = cache.gates.row(i);
                let hp = cache.h_prev.row(i);
                let dhr = dh.row(i);
                let d = &mut dpre.data_mut()[i * w..(i + 1) * w];
                let dn_out = &mut dpre_n.data_mut()[i * hid..(i + 1) * hid];
                let dhp = &mut dh_prev.data_mut()[i * hid..(i + 1) * hid];
                for k in 0..hid {
                    let (z, cand) = (g[k], g[2 * hid + k]);
                    let dz = dhr[k] * (cand - hp[k]);
                    d[k] = dz * z * (1.0 - z);
                    let dn = dhr[k] * z * (1.0 - cand * cand);
                    d[2 * hid + k] = dn;
                    dn_out[k] = dn;
                    dhp[k] = dhr[k] * (1.0 - z);
                }
            }
            let d_rh = dpre_n.matmul(w_n_t).expect("shape");
            for i in 0..n {
                let g = cache.gates.row(i);
                let hp = cache.h_prev.row(i);
                let drh = d_rh.row(i);
                let d = &mut dpre.data_mut()[i * w..(i + 1) * w];
                let dhp = &mut dh_prev.data_mut()[i * hid..(i + 1) * hid];
                for k in 0..hid {
                    let r = g[hid + k];
                    d[hid + k] = drh[k] * hp[k] * r * (1.0 - r);
                    dhp[k] += drh[k] * r;
                }
            }
            let via_gates = cols(&dpre, 0, 2 * hid).matmul(w_zr_t).expect("shape");
            dh_prev.add_assign(&via_gates);
            StepGrad { dpre, dh_prev, dc_prev: None }
        }
        _ => unreachable!("recurrent transpose built for a different cell kind"),
    }
}

/// Adds the recurrent-weight and bias gradients for a stack of step rows.
/// `rh_all` is required for GRU cells.
/// Adds one step's recurrent-weight and bias gradients into `grads`.
pub(crate) fn accumulate_recurrent_grads(grads: &mut CellParams, h_prev: &Matrix, rh: Option<&Matrix>, dpre: &Matrix) {
    match grads {
        CellParams::Rnn(g) => {
            h_prev.t_matmul_acc(dpre, &mut g.w_h).expect("shape");
            dpre.col_sums_acc(&mut g.b);
        }
        CellParams::Lstm(g) => {
            h_prev.t_matmul_acc(dpre, &mut g.w_h).expect("shape");
            dpre.col_sums_acc(&mut g.b);
        }
        CellParams::Gru(g) => {
            let hid = g.w_hn.rows();
            let d_zr = cols(dpre, 0, 2 * hid);
            let d_n = cols(dpre, 2 * hid, 3 * hid);
            h_prev.t_matmul_acc(&d_zr, &mut g.w_hzr).expect("shape");
            rh.expect("gru needs r*h_prev").t_matmul_acc(&d_n, &mut g.w_hn).expect("shape");
            dpre.col_sums_acc(&mut g.b);
        }
    }
}

/// One recurrent step on a dense batch; `c_prev` is only read by LSTM cells
/// (zeros when absent).
pub fn cell_step(p: &CellParams, x_t: &Matrix, h_prev: &Matrix, c_prev: Option<&Matrix>) -> Result<StepCache> {
    p.check_shapes()?;
    let hid = p.hidden();
    if x_t.cols() != p.input_dim() {
        return Err(Error::shape("cell input", x_t.shape(), p.w_x().shape()));
    }
    if h_prev.shape() != (x_t.rows(), hid) {
        return Err(Error::shape("cell hidden state", (x_t.rows(), hid), h_prev.shape()));
    }
    if let Some(c) = c_prev {
        if c.shape() != h_prev.shape() {
            return Err(Error::shape("cell memory", h_prev.shape(), c.shape()));
        }
    }
    let proj = x_t.matmul(p.w_x())?;
    let c_prev = match p.kind() {
        CellKind::Lstm => Some(c_prev.cloned().unwrap_or_else(|| Matrix::zeros(x_t.rows(), hid))),
        _ => None,
    };
    Ok(step_projected(p, proj, h_prev.clone(), c_prev))
}

pub fn rnn_cell_step(x_t: &Matrix, h_prev: &Matrix, p: &RnnCellParams) -> Result<(Matrix, StepCache)> {
    let cache = cell_step(&CellParams::Rnn(p.clone()), x_t, h_prev, None)?;
    Ok((cache.h.clone(), cache))
}

/// Returns `(h_t, c_t, cache)`.
pub fn lstm_cell_step(
    x_t: &Matrix,
    h_prev: &Matrix,
    c_prev: &Matrix,
    p: &LstmCellParams,
) -> Result<(Matrix, Matrix, StepCache)> {
    let cache = cell_step(&CellParams::Lstm(p.clone()), x_t, h_prev, Some(c_prev))?;
    let c = cache.c.clone().expect("lstm cache has c");
    Ok((cache.h.clone(), c, cache))
}

pub fn gru_cell_step(x_t: &Matrix, h_prev: &Matrix, p: &GruCellParams) -> Result<(Matrix, StepCache)> {
    let cache = cell_step(&CellParams::Gru(p.clone()), x_t, h_prev, None)?;
    Ok((cache.h.clone(), cache))
}

#[derive(Clone, Debug)]
pub struct CellStepGrads {
    pub params: CellParams,
    pub dx: Matrix,
    pub dh_prev: Matrix,
    pub dc_prev: Option<Matrix>,
}

/// Backward through one [`cell_step`]. `dc` is the gradient on `c_t` arriving
/// from later steps (LSTM only).
pub fn cell_step_backward(
    p: &CellParams,
    x_t: &Matrix,
    cache: &StepCache,
    dh: &Matrix,
    dc: Option<&Matrix>,
) -> Result<CellStepGrads> {
    if dh.shape() != cache.h.shape() {
        return Err(Error::shape("cell backward", cache.h.shape(), dh.shape()));
    }
    let rt = RecurrentT::of(p);
    let sg = step_backward(p, &rt, cache, dh, dc);
    let mut grads = p.zeros_like();
    accumulate_recurrent_grads(&mut grads, &cache.h_prev, cache.rh.as_ref(), &sg.dpre);
    *grads.w_x_mut() = x_t.t_matmul(&sg.dpre)?;
    let dx = sg.dpre.matmul(&p.w_x().transpose())?;
    Ok(CellStepGrads { params: grads, dx, dh_prev: sg.dh_prev, dc_prev: sg.dc_prev })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::tanh;

    fn zeroed(kind: CellKind, d: usize, h: usize) -> CellParams {
        CellParams::init(kind, &mut SeededRng::new(0), d, h).zeros_like()
    }

    #[test]
    fn zero_params_rnn() {
        let p = zeroed(CellKind::Rnn, 3, 2);
        let x = Matrix::from_rows(&[[1.0, -4.0, 2.0]]);
        let h = Matrix::from_rows(&[[0.7, -0.3]]);
        let out = cell_step(&p, &x, &h, None).unwrap();
        assert_eq!(out.h, Matrix::zeros(1, 2));
    }

    #[test]
    fn rnn_saturates() {
        let mut p = zeroed(CellKind::Rnn, 2, 2);
        if let CellParams::Rnn(r) = &mut p {
            r.w_h = Matrix::identity(2).scale(50.0);
        }
        let out = cell_step(&p, &Matrix::zeros(1, 2), &Matrix::from_rows(&[[10.0, -10.0]]), None).unwrap();
        assert!(out.h.get(0, 0) > 0.999_999 && out.h.get(0, 1) < -0.999_999);
    }

    #[test]
    fn zero_params_lstm() {
        let CellParams::Lstm(p) = zeroed(CellKind::Lstm, 3, 2) else { unreachable!() };
        let x = Matrix::from_rows(&[[0.4, 1.0, -2.0]]);
        let h = Matrix::from_rows(&[[0.1, 0.2]]);
        let (h1, c1, _) = lstm_cell_step(&x, &h, &Matrix::zeros(1, 2), &p).unwrap();
        assert_eq!(h1, Matrix::zeros(1, 2));
        assert_eq!(c1, Matrix::zeros(1, 2));
        let v = Matrix::from_rows(&[[2.0, -6.0]]);
        let (h2, c2, _) = lstm_cell_step(&x, &h, &v, &p).unwrap();
        assert_eq!(c2, v.scale(0.5));
        let want = Matrix::from_rows(&[[0.5 * tanh(1.0), 0.5 * tanh(-3.0)]]);
        assert_eq!(h2, want);
    }

    #[test]
    fn zero_params_gru() {
        let CellParams::Gru(p) = zeroed(CellKind::Gru, 2, 3) else { unreachable!() };
        let x = Matrix::from_rows(&[[5.0, -1.0]]);
        let v = Matrix::from_rows(&[[1.0, -2.0, 8.0]]);
        let (h, _) = gru_cell_step(&x, &v, &p).unwrap();
        assert_eq!(h, v.scale(0.5));
        let (h0, _) = gru_cell_step(&x, &Matrix::zeros(1, 3), &p).unwrap();
        assert_eq!(h0, Matrix::zeros(1, 3));
    }

    #[test]
    fn shape_errors() {
        let p = CellParams::init(CellKind::Gru, &mut SeededRng::new(1), 3, 2);
        assert!(matches!(
            cell_step(&p, &Matrix::zeros(1, 4), &Matrix::zeros(1, 2), None),
            Err(Error::Shape { .. })
        ));
        assert!(matches!(
            cell_step(&p, &Matrix::zeros(1, 3), &Matrix::zeros(2, 2), None),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn lstm_forget_highway_keeps_memory() {
        // forget gate saturated open, everything else zero so the candidate is tanh(0)
        let mut p = zeroed(CellKind::Lstm, 2, 3);
        if let CellParams::Lstm(l) = &mut p {
            for k in 0..3 {
                l.b.set(0, 3 + k, 100.0);
            }
        }
        let c0 = Matrix::from_rows(&[[0.8, -1.7, 3.2]]);
        let mut c = c0.clone();
        let mut h = Matrix::zeros(1, 3);
        let x = Matrix::from_rows(&[[0.3, -0.9]]);
        for _ in 0..200 {
            let out = cell_step(&p, &x, &h, Some(&c)).unwrap();
            h = out.h;
            c = out.c.unwrap();
        }
        for (a, b) in c.data().iter().zip(c0.data()) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
