//! AUROC and AUPRC on a handful of labeled scores.
//!
//! cargo run --example evaluate_metrics

use kinemb::metrics::{auprc_scores, auroc_scores};

fn main() -> kinemb::Result<()> {
    let scores = [0.95, 0.9, 0.8, 0.8, 0.6, 0.5, 0.4, 0.2];
    let labels = [true, false, true, false, true, false, false, false];
    println!("AUROC {:.4}", auroc_scores(&scores, &labels)?);
    println!("AUPRC {:.4}", auprc_scores(&scores, &labels)?);

    // Strictly monotone transforms leave both unchanged.
    let logit: Vec<f64> = scores.iter().map(|s: &f64| (s / (1.0 - s + 1e-9)).ln()).collect();
    println!("AUROC after logit {:.4}", auroc_scores(&logit, &labels)?);

    // Reversing the order mirrors AUROC around one half.
    let flipped: Vec<f64> = scores.iter().map(|s| 1.0 - s).collect();
    println!("AUROC reversed {:.4}", auroc_scores(&flipped, &labels)?);
    Ok(())
}
