//! Central finite differences against the analytic dense-layer gradient.

use fraudtext::layers::{dense_backward, dense_forward, DenseParams};
use fraudtext::tensor::{Activation, Matrix, SeededRng};

const STEP: f64 = 1e-5;

fn loss(x: &Matrix, p: &DenseParams, r: &Matrix) -> f64 {
    let (y, _) = dense_forward(x, p, Activation::Tanh).unwrap();
    y.data().iter().zip(r.data()).map(|(a, b)| a * b).sum()
}

fn main() -> fraudtext::Result<()> {
    let mut rng = SeededRng::new(5);
    let x = Matrix::from_fn(3, 4, |_, _| rng.uniform_range(-1.0, 1.0));
    let p = DenseParams::init(&mut rng, 4, 2);
    let r = Matrix::from_fn(3, 2, |_, _| rng.uniform_range(-1.0, 1.0));

    let (_, cache) = dense_forward(&x, &p, Activation::Tanh)?;
    let (grads, _) = dense_backward(&p, &cache, &r)?;

    let mut worst: f64 = 0.0;
    for i in 0..p.w.data().len() {
        let mut up = p.clone();
        up.w.data_mut()[i] += STEP;
        let mut down = p.clone();
        down.w.data_mut()[i] -= STEP;
        let numeric = (loss(&x, &up, &r) - loss(&x, &down, &r)) / (2.0 * STEP);
        let analytic = grads.w.data()[i];
        worst = worst.max((analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6));
    }
    println!("worst relative error over {} weights: {worst:.2e}", p.w.data().len());
    assert!(worst < 1e-6);
    Ok(())
}
