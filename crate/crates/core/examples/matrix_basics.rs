//! Dense matrices, activations and the seeded generator.

use fraudtext::tensor::{glorot_uniform, Activation, Matrix, SeededRng};

fn main() -> fraudtext::Result<()> {
    let a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
    let b = Matrix::from_rows(&[[5.0, 6.0], [7.0, 8.0]]);
    let c = a.matmul(&b)?;
    println!("a * b = {:?}", c.row(0).iter().chain(c.row(1)).collect::<Vec<_>>());

    // same bits as a naive triple loop summed left to right
    let mut rng = SeededRng::new(7);
    let x = glorot_uniform(&mut rng, 7, 3);
    let y = glorot_uniform(&mut rng, 3, 5);
    let fast = x.matmul(&y)?;
    let naive = Matrix::from_fn(7, 5, |i, j| (0..3).fold(0.0, |s, k| s + x.get(i, k) * y.get(k, j)));
    assert_eq!(fast, naive);

    let z = Matrix::row_vector(&[-1000.0, -2.0, 0.0, 2.0, 1000.0]);
    for act in [Activation::Sigmoid, Activation::Tanh, Activation::Relu] {
        println!("{act:?}: {:?}", z.map_activation(act).data());
    }

    let again = glorot_uniform(&mut SeededRng::new(7), 7, 3);
    assert_eq!(again, x);
    println!("glorot 7x3 bound {:.4}, replay identical", (6.0f64 / 10.0).sqrt());
    Ok(())
}
