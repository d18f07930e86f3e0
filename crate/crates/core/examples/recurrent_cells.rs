//! One step of each recurrent cell, forward and backward.

use fraudtext::layers::{cell_step, cell_step_backward, CellKind, CellParams};
use fraudtext::tensor::{Matrix, SeededRng};

fn main() -> fraudtext::Result<()> {
    let mut rng = SeededRng::new(3);
    let (batch, input, hidden) = (2, 4, 3);
    let x = Matrix::from_fn(batch, input, |i, j| ((i * input + j) as f64 * 0.37).sin());
    let h0 = Matrix::from_fn(batch, hidden, |i, j| 0.1 * (i as f64 - j as f64));
    for kind in [CellKind::Rnn, CellKind::Lstm, CellKind::Gru] {
        let p = CellParams::init(kind, &mut rng, input, hidden);
        let cache = cell_step(&p, &x, &h0, None)?;
        let dh = Matrix::filled(batch, hidden, 1.0);
        let dc = cache.c.as_ref().map(|c| Matrix::zeros(c.rows(), c.cols()));
        let g = cell_step_backward(&p, &x, &cache, &dh, dc.as_ref())?;
        println!("{kind:?}: {} gates, h[0] = {:.4?}", kind.gates(), cache.h.row(0));
        for (name, t) in p.tensor_names().iter().zip(g.params.tensors()) {
            println!("    d{name} {:?} norm {:.4}", t.shape(), t.frobenius_norm());
        }
        println!("    dx norm {:.4}", g.dx.frobenius_norm());
    }
    Ok(())
}
