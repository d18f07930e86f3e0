use crate::error::{Error, Result};
use crate::tensor::{glorot_uniform, Activation, Matrix, SeededRng};

#[derive(Clone, Debug, PartialEq)]
pub struct DenseParams {
    /// `in_dim x out_dim`
    pub w: Matrix,
    /// `1 x out_dim`
    pub b: Matrix,
}

impl DenseParams {
    pub fn new(w: Matrix, b: Matrix) -> Result<Self> {
        if b.rows() != 1 || b.cols() != w.cols() {
            return Err(Error::shape("dense params", w.shape(), b.shape()));
        }
        Ok(DenseParams { w, b })
    }

    pub fn init(rng: &mut SeededRng, in_dim: usize, out_dim: usize) -> Self {
        DenseParams { w: glorot_uniform(rng, in_dim, out_dim), b: Matrix::zeros(1, out_dim) }
    }

    pub fn in_dim(&self) -> usize {
        self.w.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.w.cols()
    }

    pub fn zeros_like(&self) -> Self {
        DenseParams { w: Matrix::zeros(self.w.rows(), self.w.cols()), b: Matrix::zeros(1, self.b.cols()) }
    }
}

#[derive(Clone, Debug)]
pub struct DenseCache {
    x: Matrix,
    y: Matrix,
    activation: Activation,
}

/// `activation(x W + b)`, bias broadcast over rows.
pub fn dense_forward(x: &Matrix, p: &DenseParams, activation: Activation) -> Result<(Matrix, DenseCache)> {
    if x.cols() != p.in_dim() {
        return Err(Error::shape("dense", x.shape(), p.w.shape()));
    }
    let z = x.matmul(&p.w)?.add_row(&p.b)?;
    let y = z.map_activation(activation);
    Ok((y.clone(), DenseCache { x: x.clone(), y, activation }))
}

/// Returns `(param grads, input grad)`.
pub fn dense_backward(p: &DenseParams, cache: &DenseCache, dy: &Matrix) -> Result<(DenseParams, Matrix)> {
    if dy.shape() != cache.y.shape() {
        return Err(Error::shape("dense backward", cache.y.shape(), dy.shape()));
    }
    let mut dz = dy.clone();
    if cache.activation != Activation::None {
        for (g, &y) in dz.data_mut().iter_mut().zip(cache.y.data()) {
            *g *= cache.activation.derivative_from_output(y);
        }
    }
    let dw = cache.x.t_matmul(&dz)?;
    let db = dz.col_sums();
    let dx = dz.matmul(&p.w.transpose())?;
    Ok((DenseParams { w: dw, b: db }, dx))
}
