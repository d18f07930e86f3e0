use crate::error::{Error, Result};
use crate::tensor::{Matrix, SeededRng};

#[derive(Clone, Debug)]
pub struct DropoutCache {
    /// Per-element multiplier (0 or `1/(1-rate)`); `None` when the layer was an identity.
    mask: Option<Vec<f64>>,
}

impl DropoutCache {
    /// A cache with a caller-chosen mask, for checking gradients with the mask held fixed.
    pub fn with_mask(mask: Vec<f64>) -> Self {
        DropoutCache { mask: Some(mask) }
    }

    pub fn mask(&self) -> Option<&[f64]> {
        self.mask.as_deref()
    }
}

/// Inverted dropout. In training mode each element survives with probability
/// `1 - rate` and is scaled by `1/(1 - rate)`; inference and `rate == 0` are
/// exact identities and draw nothing from `rng`.
pub fn dropout_forward(x: &Matrix, rate: f64, rng: &mut SeededRng, training: bool) -> Result<(Matrix, DropoutCache)> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::Parameter(format!("dropout rate must be in [0, 1), got {rate}")));
    }
    if !training || rate == 0.0 {
        return Ok((x.clone(), DropoutCache { mask: None }));
    }
    let keep = 1.0 / (1.0 - rate);
    let mask: Vec<f64> = (0..x.data().len()).map(|_| if rng.uniform() < rate { 0.0 } else { keep }).collect();
    let out = apply_mask(x, &mask);
    Ok((out, DropoutCache { mask: Some(mask) }))
}

fn apply_mask(x: &Matrix, mask: &[f64]) -> Matrix {
    let mut out = x.clone();
    for (v, m) in out.data_mut().iter_mut().zip(mask) {
        *v *= m;
    }
    out
}

pub fn dropout_apply_cached(x: &Matrix, cache: &DropoutCache) -> Matrix {
    match &cache.mask {
        Some(m) => apply_mask(x, m),
        None => x.clone(),
    }
}

pub fn dropout_backward(cache: &DropoutCache, dy: &Matrix) -> Matrix {
    dropout_apply_cached(dy, cache)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rate_and_inference_are_identities() {
        let mut rng = SeededRng::new(1);
        let x = Matrix::from_fn(4, 5, |i, j| (i * 5 + j) as f64 * 0.37 - 3.0);
        for training in [true, false] {
            let (y, _) = dropout_forward(&x, 0.0, &mut rng, training).unwrap();
            assert_eq!(y.data(), x.data());
        }
        let (y, _) = dropout_forward(&x, 0.9, &mut rng, false).unwrap();
        assert_eq!(y.data(), x.data());
    }

    #[test]
    fn half_rate_statistics() {
        let mut rng = SeededRng::new(2);
        let x = Matrix::filled(1, 100_000, 1.5);
        let (y, _) = dropout_forward(&x, 0.5, &mut rng, true).unwrap();
        let kept: Vec<f64> = y.data().iter().copied().filter(|&v| v != 0.0).collect();
        let frac = kept.len() as f64 / 100_000.0;
        assert!((frac - 0.5).abs() <= 0.01, "kept {frac}");
        assert!(kept.iter().all(|&v| v == 3.0));
    }

    #[test]
    fn rate_out_of_range() {
        let mut rng = SeededRng::new(0);
        let x = Matrix::zeros(1, 1);
        assert!(matches!(dropout_forward(&x, 1.0, &mut rng, true), Err(Error::Parameter(_))));
        assert!(matches!(dropout_forward(&x, -0.1, &mut rng, true), Err(Error::Parameter(_))));
    }
}
