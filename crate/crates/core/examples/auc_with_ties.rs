//! Rank-based AUC with tied scores, checked against the ROC trapezoid.

use fraudtext::metrics::{auc, roc_points, trapezoid_area};

fn main() -> fraudtext::Result<()> {
    let scores = [0.9, 0.8, 0.8, 0.7, 0.5, 0.5, 0.5, 0.2];
    let labels = [1, 1, 0, 1, 0, 1, 0, 0];
    let a = auc(&scores, &labels)?;
    let points = roc_points(&scores, &labels)?;
    println!("roc: {points:?}");
    println!("rank auc {a:.6}, trapezoid {:.6}", trapezoid_area(&points));

    // each positive/negative pair: 1 if ordered, 1/2 if tied
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (s, _) in scores.iter().zip(labels).filter(|(_, l)| *l == 1) {
        for (t, _) in scores.iter().zip(labels).filter(|(_, l)| *l == 0) {
            pairs += 1.0;
            wins += if s > t { 1.0 } else if s == t { 0.5 } else { 0.0 };
        }
    }
    assert!((a - wins / pairs).abs() < 1e-12);
    println!("pairwise {:.6}", wins / pairs);

    match auc(&[0.3, 0.4], &[1, 1]) {
        Err(e) => println!("single class: {e}"),
        Ok(v) => println!("unexpected {v}"),
    }
    Ok(())
}
