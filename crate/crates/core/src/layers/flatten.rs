use crate::error::{Error, Result};
use crate::layers::sequence::SeqBatch;
use crate::tensor::Matrix;

#[derive(Clone, Debug)]
pub struct FlattenCache {
    ids: Vec<u32>,
    batch: usize,
    steps: usize,
    table_rows: usize,
    dim: usize,
}

/// `batch x steps x dim` to `batch x (steps*dim)`, timestep vectors laid out
/// one after another within each row.
pub fn flatten_forward(seq: &SeqBatch) -> (Matrix, FlattenCache) {
    let (batch, steps, dim) = (seq.batch(), seq.steps(), seq.dim());
    let mut out = Matrix::zeros(batch, steps * dim);
    for b in 0..batch {
        let row = out.row_mut(b);
        for t in 0..steps {
            row[t * dim..(t + 1) * dim].copy_from_slice(seq.value(b, t));
        }
    }
    let cache = FlattenCache {
        ids: seq.ids().to_vec(),
        batch,
        steps,
        table_rows: seq.table().rows(),
        dim,
    };
    (out, cache)
}

/// Inverse reshape of the upstream gradient, folded onto the input table.
pub fn flatten_backward(cache: &FlattenCache, d_out: &Matrix) -> Result<Matrix> {
    if d_out.shape() != (cache.batch, cache.steps * cache.dim) {
        return Err(Error::shape("flatten backward", (cache.batch, cache.steps * cache.dim), d_out.shape()));
    }
    let dim = cache.dim;
    let mut grad = Matrix::zeros(cache.table_rows, dim);
    for b in 0..cache.batch {
        let row = d_out.row(b);
        for t in 0..cache.steps {
            let u = cache.ids[b * cache.steps + t] as usize;
            for (g, v) in grad.row_mut(u).iter_mut().zip(&row[t * dim..(t + 1) * dim]) {
                *g += v;
            }
        }
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_layout() {
        let steps = [Matrix::from_rows(&[[1.0, 2.0]]), Matrix::from_rows(&[[3.0, 4.0]])];
        let seq = SeqBatch::from_steps(&steps).unwrap();
        let (flat, _) = flatten_forward(&seq);
        assert_eq!(flat, Matrix::from_rows(&[[1.0, 2.0, 3.0, 4.0]]));
    }

    #[test]
    fn backward_is_inverse_reshape() {
        let steps = [
            Matrix::from_rows(&[[1.0, 2.0], [5.0, 6.0]]),
            Matrix::from_rows(&[[3.0, 4.0], [7.0, 8.0]]),
        ];
        let seq = SeqBatch::from_steps(&steps).unwrap();
        let (flat, cache) = flatten_forward(&seq);
        let back = flatten_backward(&cache, &flat).unwrap();
        assert_eq!(&back, seq.table());
    }
}
