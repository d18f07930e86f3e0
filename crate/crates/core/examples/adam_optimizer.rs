//! Bias-corrected Adam minimizing a quadratic bowl.

use fraudtext::tensor::Matrix;
use fraudtext::train::{adam_step, AdamConfig, AdamState};

fn main() -> fraudtext::Result<()> {
    // f(x, y) = (x - 3)^2 + 10 (y + 1)^2
    let mut theta = Matrix::row_vector(&[0.0, 0.0]);
    let mut state = AdamState::new(AdamConfig { lr: 0.1, ..AdamConfig::default() }, &[&theta]);
    for step in 1..=300 {
        let (x, y) = (theta.data()[0], theta.data()[1]);
        let grad = Matrix::row_vector(&[2.0 * (x - 3.0), 20.0 * (y + 1.0)]);
        adam_step(&mut [&mut theta], &[grad], &mut state)?;
        if step % 60 == 0 {
            println!("step {step:>3}: x {:.5}  y {:.5}", theta.data()[0], theta.data()[1]);
        }
    }
    // the first step moves every coordinate by about lr, whatever the gradient scale
    let mut fresh = Matrix::row_vector(&[0.0]);
    let mut s = AdamState::new(AdamConfig::default(), &[&fresh]);
    adam_step(&mut [&mut fresh], &[Matrix::row_vector(&[250.0])], &mut s)?;
    println!("first step from a gradient of 250: {:.6}", fresh.data()[0]);
    Ok(())
}
