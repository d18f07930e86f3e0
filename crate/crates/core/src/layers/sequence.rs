use crate::error::{Error, Result};
use crate::tensor::Matrix;

/// `batch x steps` grid of token indices, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenBatch {
    batch: usize,
    steps: usize,
    ids: Vec<u32>,
}

impl TokenBatch {
    pub fn new(batch: usize, steps: usize, ids: Vec<u32>) -> Result<Self> {
        if ids.len() != batch * steps {
            return Err(Error::Parameter(format!(
                "token batch {batch}x{steps} needs {} ids, got {}",
                batch * steps,
                ids.len()
            )));
        }
        Ok(TokenBatch { batch, steps, ids })
    }

    pub fn from_rows<R: AsRef<[u32]>>(rows: &[R]) -> Result<Self> {
        let steps = rows.first().map_or(0, |r| r.as_ref().len());
        let mut ids = Vec::with_capacity(rows.len() * steps);
        for r in rows {
            if r.as_ref().len() != steps {
                return Err(Error::Parameter("ragged token rows".into()));
            }
            ids.extend_from_slice(r.as_ref());
        }
        Ok(TokenBatch { batch: rows.len(), steps, ids })
    }

    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn row(&self, b: usize) -> &[u32] {
        &self.ids[b * self.steps..(b + 1) * self.steps]
    }

    pub fn get(&self, b: usize, t: usize) -> u32 {
        self.ids[b * self.steps + t]
    }

    pub fn select_rows(&self, rows: &[usize]) -> TokenBatch {
        let mut ids = Vec::with_capacity(rows.len() * self.steps);
        for &r in rows {
            ids.extend_from_slice(self.row(r));
        }
        TokenBatch { batch: rows.len(), steps: self.steps, ids }
    }
}

/// A `batch x steps x dim` activation tensor stored as a table of distinct
/// vectors plus a per-position index into that table.
///
/// Positions that share an id hold bit-identical vectors. Embedding lookups
/// produce one table row per distinct token, and the recurrent runner emits
/// one row per distinct pair of hidden states, so downstream projections are
/// computed once per distinct vector. Gradients with respect to a `SeqBatch`
/// are matrices shaped like `table`: row `u` holds the sum of the
/// per-position gradients over every position whose id is `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeqBatch {
    batch: usize,
    steps: usize,
    table: Matrix,
    ids: Vec<u32>,
}

impl SeqBatch {
    pub fn new(batch: usize, steps: usize, table: Matrix, ids: Vec<u32>) -> Result<Self> {
        if ids.len() != batch * steps {
            return Err(Error::Parameter(format!(
                "sequence {batch}x{steps} needs {} ids, got {}",
                batch * steps,
                ids.len()
            )));
        }
        if let Some((pos, &bad)) = ids.iter().enumerate().find(|(_, &u)| u as usize >= table.rows()) {
            return Err(Error::Index {
                position: format!("sequence id at flat position {pos}"),
                value: bad as usize,
                limit: table.rows(),
            });
        }
        Ok(SeqBatch { batch, steps, table, ids })
    }

    /// Wraps a time-major list of `batch x dim` matrices, one table row per
    /// position (no sharing).
    pub fn from_steps(steps: &[Matrix]) -> Result<Self> {
        let t_len = steps.len();
        let (batch, dim) = steps.first().map_or((0, 0), Matrix::shape);
        for s in steps {
            if s.shape() != (batch, dim) {
                return Err(Error::shape("sequence step", (batch, dim), s.shape()));
            }
        }
        let mut data = Vec::with_capacity(batch * t_len * dim);
        for b in 0..batch {
            for s in steps {
                data.extend_from_slice(s.row(b));
            }
        }
        let table = Matrix::new(batch * t_len, dim, data)?;
        let ids = (0..(batch * t_len) as u32).collect();
        Ok(SeqBatch { batch, steps: t_len, table, ids })
    }

    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dim(&self) -> usize {
        self.table.cols()
    }

    pub fn table(&self) -> &Matrix {
        &self.table
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    #[inline]
    pub fn id(&self, b: usize, t: usize) -> u32 {
        self.ids[b * self.steps + t]
    }

    pub fn value(&self, b: usize, t: usize) -> &[f64] {
        self.table.row(self.id(b, t) as usize)
    }

    /// Time-major dense view: `steps` matrices of shape `batch x dim`.
    pub fn to_steps(&self) -> Vec<Matrix> {
        (0..self.steps)
            .map(|t| {
                let mut m = Matrix::zeros(self.batch, self.dim());
                for b in 0..self.batch {
                    m.row_mut(b).copy_from_slice(self.value(b, t));
                }
                m
            })
            .collect()
    }

    /// Folds dense per-position gradients (time-major) into a table-shaped
    /// gradient, summing positions in `(batch, step)` order.
    pub fn fold_grad(&self, per_step: &[Matrix]) -> Result<Matrix> {
        if per_step.len() != self.steps {
            return Err(Error::Parameter(format!(
                "expected {} gradient steps, got {}",
                self.steps,
                per_step.len()
            )));
        }
        let mut out = Matrix::zeros(self.table.rows(), self.dim());
        for b in 0..self.batch {
            for (t, g) in per_step.iter().enumerate() {
                if g.shape() != (self.batch, self.dim()) {
                    return Err(Error::shape("fold_grad", (self.batch, self.dim()), g.shape()));
                }
                let u = self.id(b, t) as usize;
                for (o, v) in out.row_mut(u).iter_mut().zip(g.row(b)) {
                    *o += v;
                }
            }
        }
        Ok(out)
    }
}
