use crate::error::{Error, Result};

pub const BCE_CLAMP: f64 = 1e-7;

/// Mean binary cross-entropy on probabilities clamped to
/// `[BCE_CLAMP, 1 - BCE_CLAMP]`. The gradient is that of the clamped form, so
/// it is zero where the clamp is active.
pub fn bce_loss(p: &[f64], y: &[f64]) -> Result<(f64, Vec<f64>)> {
    if p.len() != y.len() || p.is_empty() {
        return Err(Error::shape("bce_loss", (p.len(), 1), (y.len(), 1)));
    }
    let n = p.len() as f64;
    let (lo, hi) = (BCE_CLAMP, 1.0 - BCE_CLAMP);
    let mut total = 0.0;
    let mut grad = Vec::with_capacity(p.len());
    for (&pi, &yi) in p.iter().zip(y) {
        let q = pi.clamp(lo, hi);
        total -= yi * q.ln() + (1.0 - yi) * (1.0 - q).ln();
        let inside = pi >= lo && pi <= hi;
        grad.push(if inside { (-yi / q + (1.0 - yi) / (1.0 - q)) / n } else { 0.0 });
    }
    Ok((total / n, grad))
}
