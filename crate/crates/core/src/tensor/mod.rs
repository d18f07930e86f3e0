//! Dense row-major `f64` matrices and the seeded random stream used for
//! initialization, shuffling and dropout.

pub(crate) mod kernel;
mod math;
mod rng;

use std::fmt;

pub use math::{sigmoid, sigmoid_in_place, tanh, tanh_in_place};
pub use rng::SeededRng;

use crate::error::{Error, Result};
use kernel::{gemm, Lhs};

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elementwise {
    Add,
    Sub,
    Mul,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Activation {
    None,
    Relu,
    Sigmoid,
    Tanh,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::None => x,
            Activation::Relu => x.max(0.0),
            Activation::Sigmoid => sigmoid(x),
            Activation::Tanh => tanh(x),
        }
    }

    /// Derivative expressed through the activation's output `y = f(x)`.
    #[inline]
    pub fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::None => 1.0,
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Tanh => 1.0 - y * y,
        }
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Parameter(format!(
                "matrix {rows}x{cols} needs {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds from nested rows; panics on ragged input (test and example helper).
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Matrix { rows: rows.len(), cols, data }
    }

    pub fn row_vector(values: &[f64]) -> Self {
        Matrix { rows: 1, cols: values.len(), data: values.to_vec() }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let c = self.cols;
        &mut self.data[i * c..(i + 1) * c]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// `self * other`; each element accumulates its `k` terms left to right.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::shape("matmul", self.shape(), other.shape()));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        gemm(
            Lhs::plain(&self.data, self.cols),
            &other.data,
            self.rows,
            self.cols,
            other.cols,
            &mut out.data,
            false,
        );
        Ok(out)
    }

    /// `self^T * other` without materializing the transpose; the reduction
    /// runs over rows in order.
    pub fn t_matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::shape("t_matmul", self.shape(), other.shape()));
        }
        let mut out = Matrix::zeros(self.cols, other.cols);
        gemm(
            Lhs::transposed(&self.data, self.cols),
            &other.data,
            self.cols,
            self.rows,
            other.cols,
            &mut out.data,
            false,
        );
        Ok(out)
    }

    /// `out += self^T * other`, continuing each element's sum in row order.
    pub fn t_matmul_acc(&self, other: &Matrix, out: &mut Matrix) -> Result<()> {
        if self.rows != other.rows || out.shape() != (self.cols, other.cols) {
            return Err(Error::shape("t_matmul_acc", self.shape(), other.shape()));
        }
        gemm(
            Lhs::transposed(&self.data, self.cols),
            &other.data,
            self.cols,
            self.rows,
            other.cols,
            &mut out.data,
            true,
        );
        Ok(())
    }

    pub fn elementwise(&self, other: &Matrix, op: Elementwise) -> Result<Matrix> {
        if self.shape() != other.shape() {
            let name = match op {
                Elementwise::Add => "add",
                Elementwise::Sub => "sub",
                Elementwise::Mul => "mul",
            };
            return Err(Error::shape(name, self.shape(), other.shape()));
        }
        let f: fn(f64, f64) -> f64 = match op {
            Elementwise::Add => |a, b| a + b,
            Elementwise::Sub => |a, b| a - b,
            Elementwise::Mul => |a, b| a * b,
        };
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.elementwise(other, Elementwise::Add)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.elementwise(other, Elementwise::Sub)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.elementwise(other, Elementwise::Mul)
    }

    /// Adds a `1 x cols` row vector to every row.
    pub fn add_row(&self, bias: &Matrix) -> Result<Matrix> {
        if bias.rows != 1 || bias.cols != self.cols {
            return Err(Error::shape("add_row", self.shape(), bias.shape()));
        }
        let mut out = self.clone();
        for row in out.data.chunks_exact_mut(self.cols.max(1)) {
            for (x, b) in row.iter_mut().zip(&bias.data) {
                *x += b;
            }
        }
        Ok(out)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn map_activation(&self, act: Activation) -> Matrix {
        let mut out = self.clone();
        match act {
            Activation::Sigmoid => sigmoid_in_place(&mut out.data),
            Activation::Tanh => tanh_in_place(&mut out.data),
            _ => out.data.iter_mut().for_each(|x| *x = act.apply(*x)),
        }
        out
    }

    pub fn scale(&self, s: f64) -> Matrix {
        self.map(|x| x * s)
    }

    /// In-place `self += other` (same shape, checked in debug builds).
    pub(crate) fn add_assign(&mut self, other: &Matrix) {
        debug_assert_eq!(self.shape(), other.shape());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// `1 x cols` sums over rows, rows visited in order.
    pub fn col_sums(&self) -> Matrix {
        let mut out = Matrix::zeros(1, self.cols);
        self.col_sums_acc(&mut out);
        out
    }

    /// Adds each column's sum into the `1 x cols` row `out`, rows in order.
    pub(crate) fn col_sums_acc(&self, out: &mut Matrix) {
        debug_assert_eq!(out.shape(), (1, self.cols));
        for row in self.data.chunks_exact(self.cols.max(1)) {
            for (s, x) in out.data.iter_mut().zip(row) {
                *s += x;
            }
        }
    }

    /// Copies the listed rows, in the listed order.
    pub fn gather_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix { rows: idx.len(), cols: self.cols, data }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} ", self.rows, self.cols)?;
        let mut list = f.debug_list();
        for i in 0..self.rows.min(8) {
            list.entry(&self.row(i));
        }
        list.finish()
    }
}

/// Glorot/Xavier uniform: i.i.d. samples in `[-sqrt(6/(rows+cols)), +sqrt(6/(rows+cols))]`.
pub fn glorot_uniform(rng: &mut SeededRng, rows: usize, cols: usize) -> Matrix {
    let bound = (6.0 / (rows + cols) as f64).sqrt();
    Matrix::from_fn(rows, cols, |_, _| rng.uniform_range(-bound, bound))
}

#[cfg(test)]
mod tests {
    use super::kernel::{gemm_portable, Lhs};
    use super::*;

    fn naive(a: &Matrix, b: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut s = 0.0;
                for k in 0..a.cols() {
                    s += a.get(i, k) * b.get(k, j);
                }
                out.set(i, j, s);
            }
        }
        out
    }

    fn random(rng: &mut SeededRng, r: usize, c: usize) -> Matrix {
        Matrix::from_fn(r, c, |_, _| rng.uniform_range(-3.0, 3.0))
    }

    #[test]
    fn matmul_identity_and_hand_case() {
        let b = Matrix::from_rows(&[[5.0, 6.0], [7.0, 8.0]]);
        assert_eq!(Matrix::identity(2).matmul(&b).unwrap(), b);
        let a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(a.matmul(&b).unwrap(), Matrix::from_rows(&[[19.0, 22.0], [43.0, 50.0]]));
    }

    #[test]
    fn matmul_matches_triple_loop_bitwise() {
        let mut rng = SeededRng::new(11);
        let a = random(&mut rng, 7, 3);
        let b = random(&mut rng, 3, 5);
        assert_eq!(a.matmul(&b).unwrap().data(), naive(&a, &b).data());
        // shapes that exercise the wide, narrow and scalar column paths, the row tail and k-blocking
        for &(m, k, n) in &[(9, 17, 75), (4, 64, 256), (13, 150, 41), (1, 5, 1), (33, 2, 40), (6, 700, 37), (5, 0, 3), (7, 300, 123)] {
            let a = random(&mut rng, m, k);
            let b = random(&mut rng, k, n);
            let want = naive(&a, &b);
            assert_eq!(a.matmul(&b).unwrap().data(), want.data(), "{m}x{k}x{n}");
            let mut portable = vec![0.0; m * n];
            gemm_portable(Lhs::plain(a.data(), k), b.data(), m, k, n, &mut portable, false);
            assert_eq!(portable, want.data());
            let at = a.transpose();
            assert_eq!(at.t_matmul(&b).unwrap().data(), want.data());
        }
    }

    #[test]
    fn split_accumulation_matches_one_product() {
        let mut rng = SeededRng::new(12);
        let a = random(&mut rng, 300, 5);
        let b = random(&mut rng, 300, 70);
        let whole = a.t_matmul(&b).unwrap();
        let mut acc = Matrix::zeros(5, 70);
        for (lo, hi) in [(0, 1), (1, 120), (120, 300)] {
            let rows: Vec<usize> = (lo..hi).collect();
            a.gather_rows(&rows).t_matmul_acc(&b.gather_rows(&rows), &mut acc).unwrap();
        }
        assert_eq!(acc.data(), whole.data());
    }

    #[test]
    fn matmul_shape_error_names_both_shapes() {
        let err = Matrix::zeros(2, 3).matmul(&Matrix::zeros(2, 3)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("(2, 3)"), "{msg}");
    }

    #[test]
    fn identity_is_exact_both_sides() {
        let mut rng = SeededRng::new(5);
        let a = random(&mut rng, 6, 6);
        let i = Matrix::identity(6);
        assert_eq!(a.matmul(&i).unwrap(), a);
        assert_eq!(i.matmul(&a).unwrap(), a);
    }

    #[test]
    fn matmul_distributes_over_add() {
        let mut rng = SeededRng::new(6);
        for _ in 0..20 {
            let a = random(&mut rng, 8, 8);
            let b = random(&mut rng, 8, 8);
            let c = random(&mut rng, 8, 8);
            let lhs = a.matmul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.matmul(&b).unwrap().add(&a.matmul(&c).unwrap()).unwrap();
            for (x, y) in lhs.data().iter().zip(rhs.data()) {
                let scale = x.abs().max(y.abs()).max(1.0);
                assert!((x - y).abs() / scale < 1e-12);
            }
        }
    }

    #[test]
    fn elementwise_cases() {
        let a = Matrix::from_rows(&[[1.5, -2.0], [0.25, 9.0]]);
        assert_eq!(a.add(&Matrix::zeros(2, 2)).unwrap(), a);
        assert_eq!(a.sub(&a).unwrap(), Matrix::zeros(2, 2));
        let m = Matrix::from_rows(&[[2.0, 3.0]]).mul(&Matrix::from_rows(&[[4.0, 5.0]])).unwrap();
        assert_eq!(m, Matrix::from_rows(&[[8.0, 15.0]]));
        assert!(matches!(a.add(&Matrix::zeros(1, 2)), Err(Error::Shape { .. })));
    }

    #[test]
    fn operations_do_not_mutate_inputs() {
        let a = Matrix::from_rows(&[[1.0, 2.0]]);
        let b = Matrix::from_rows(&[[3.0], [4.0]]);
        let (a0, b0) = (a.clone(), b.clone());
        let _ = a.matmul(&b).unwrap();
        let _ = a.add(&a).unwrap();
        let _ = a.map_activation(Activation::Tanh);
        assert_eq!((a, b), (a0, b0));
    }

    #[test]
    fn activations() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert_eq!(tanh(0.0), 0.0);
        let tiny = sigmoid(-1000.0);
        assert!((0.0..=1e-300).contains(&tiny));
        // exp(-1000) underflows to 0 in double precision; the exact value is
        // about 5.07e-435, so 0 is the correctly rounded answer.
        assert_eq!(tiny, 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
        // against the unstable textbook form where it is well conditioned
        for &x in &[-30.0, -5.0, -0.1, 0.3, 4.0, 25.0] {
            let direct = 1.0 / (1.0 + f64::exp(-x));
            assert!((sigmoid(x) - direct).abs() <= 1e-15 * direct.max(1e-300) + 1e-300);
        }
        let m = Matrix::from_rows(&[[-1.0, 0.0, 2.0]]);
        assert_eq!(m.map_activation(Activation::Relu), Matrix::from_rows(&[[0.0, 0.0, 2.0]]));
    }

    #[test]
    fn glorot_bounds_and_determinism() {
        let a = glorot_uniform(&mut SeededRng::new(1), 3, 3);
        let b = glorot_uniform(&mut SeededRng::new(1), 3, 3);
        assert_eq!(a.data(), b.data());
        assert!(a.data().iter().all(|x| x.abs() <= 1.0));
        let big = glorot_uniform(&mut SeededRng::new(2), 1, 100_000);
        let mean = big.data().iter().sum::<f64>() / 100_000.0;
        assert!(mean.abs() < 0.01, "mean {mean}");
        let bound = (6.0f64 / 100_001.0).sqrt();
        assert!(big.data().iter().all(|x| x.abs() <= bound));
    }
}
