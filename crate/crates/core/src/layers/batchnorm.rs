use crate::error::{Error, Result};
use crate::tensor::Matrix;

pub const DEFAULT_MOMENTUM: f64 = 0.99;
pub const DEFAULT_EPSILON: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct BatchNormParams {
    pub gamma: Matrix,
    pub beta: Matrix,
    pub running_mean: Matrix,
    pub running_var: Matrix,
    pub momentum: f64,
    pub epsilon: f64,
}

impl BatchNormParams {
    pub fn new(features: usize) -> Self {
        BatchNormParams {
            gamma: Matrix::filled(1, features, 1.0),
            beta: Matrix::zeros(1, features),
            running_mean: Matrix::zeros(1, features),
            running_var: Matrix::filled(1, features, 1.0),
            momentum: DEFAULT_MOMENTUM,
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn features(&self) -> usize {
        self.gamma.cols()
    }
}

#[derive(Clone, Debug)]
pub struct BatchNormCache {
    x_hat: Matrix,
    inv_std: Vec<f64>,
    gamma: Vec<f64>,
    training: bool,
}

/// Running statistics after a training-mode pass.
#[derive(Clone, Debug, PartialEq)]
pub struct RunningStats {
    pub mean: Matrix,
    pub var: Matrix,
}

/// Per-column normalization. Training mode standardizes with the batch mean
/// and biased variance and returns the updated running statistics
/// (`momentum * running + (1 - momentum) * batch`); the parameters themselves
/// are never modified. Inference mode uses the running statistics.
pub fn batchnorm_forward(
    x: &Matrix,
    p: &BatchNormParams,
    training: bool,
) -> Result<(Matrix, BatchNormCache, Option<RunningStats>)> {
    let (n, c) = x.shape();
    if c != p.features() {
        return Err(Error::shape("batch-norm", x.shape(), p.gamma.shape()));
    }
    let (mean, var) = if training {
        if n < 2 {
            return Err(Error::BatchSize(n));
        }
        let mut mean = vec![0.0; c];
        for i in 0..n {
            for (m, v) in mean.iter_mut().zip(x.row(i)) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n as f64);
        let mut var = vec![0.0; c];
        for i in 0..n {
            for ((s, v), m) in var.iter_mut().zip(x.row(i)).zip(&mean) {
                let d = v - m;
                *s += d * d;
            }
        }
        var.iter_mut().for_each(|s| *s /= n as f64);
        (mean, var)
    } else {
        (p.running_mean.data().to_vec(), p.running_var.data().to_vec())
    };
    let inv_std: Vec<f64> = var.iter().map(|v| 1.0 / (v + p.epsilon).sqrt()).collect();
    let mut x_hat = Matrix::zeros(n, c);
    let mut y = Matrix::zeros(n, c);
    for i in 0..n {
        for j in 0..c {
            let xh = (x.get(i, j) - mean[j]) * inv_std[j];
            x_hat.set(i, j, xh);
            y.set(i, j, p.gamma.get(0, j) * xh + p.beta.get(0, j));
        }
    }
    let stats = training.then(|| {
        let blend = |run: &Matrix, batch: &[f64]| {
            Matrix::from_fn(1, c, |_, j| p.momentum * run.get(0, j) + (1.0 - p.momentum) * batch[j])
        };
        RunningStats { mean: blend(&p.running_mean, &mean), var: blend(&p.running_var, &var) }
    });
    let cache = BatchNormCache { x_hat, inv_std, gamma: p.gamma.data().to_vec(), training };
    Ok((y, cache, stats))
}

/// Returns `(d_gamma, d_beta, d_x)`.
pub fn batchnorm_backward(cache: &BatchNormCache, dy: &Matrix) -> Result<(Matrix, Matrix, Matrix)> {
    let (n, c) = cache.x_hat.shape();
    if dy.shape() != (n, c) {
        return Err(Error::shape("batch-norm backward", (n, c), dy.shape()));
    }
    let mut d_gamma = Matrix::zeros(1, c);
    let mut d_beta = Matrix::zeros(1, c);
    for i in 0..n {
        for j in 0..c {
            let g = dy.get(i, j);
            d_gamma.data_mut()[j] += g * cache.x_hat.get(i, j);
            d_beta.data_mut()[j] += g;
        }
    }
    let mut dx = Matrix::zeros(n, c);
    if cache.training {
        // dx = inv_std/N * (N*dxh - sum(dxh) - xh*sum(dxh*xh)), with dxh = dy*gamma
        let nf = n as f64;
        for j in 0..c {
            let gamma = cache.gamma[j];
            let sum_dxh = d_beta.get(0, j) * gamma;
            let sum_dxh_xh = d_gamma.get(0, j) * gamma;
            for i in 0..n {
                let dxh = dy.get(i, j) * gamma;
                let v = cache.inv_std[j] / nf * (nf * dxh - sum_dxh - cache.x_hat.get(i, j) * sum_dxh_xh);
                dx.set(i, j, v);
            }
        }
    } else {
        for i in 0..n {
            for j in 0..c {
                dx.set(i, j, dy.get(i, j) * cache.gamma[j] * cache.inv_std[j]);
            }
        }
    }
    Ok((d_gamma, d_beta, dx))
}
