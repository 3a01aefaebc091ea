//! Spectral snapshot embeddings with and without Procrustes alignment.
//!
//! Unaligned per-snapshot embeddings are only defined up to rotation, so a
//! node's apparent motion between snapshots is dominated by basis changes.
//! Alignment removes that and leaves the real drift.
//!
//! cargo run --example aligned_embedding

use kinemb::embedding::{embed_aligned, procrustes_objective, procrustes_rotation, AlignedEmbedderConfig, Alignment};
use kinemb::kinematics::compute_velocities;
use kinemb::synthetic::{drift_graph, DriftConfig};
use nalgebra::DMatrix;

fn mean_speed(vels: &kinemb::kinematics::VelocitySequence) -> f64 {
    let norms: Vec<f64> = (0..vels.num_nodes())
        .flat_map(|p| {
            vels.history(p.into())
                .chunks(vels.dim())
                .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
                .collect::<Vec<_>>()
        })
        .collect();
    norms.iter().sum::<f64>() / norms.len() as f64
}

fn main() -> kinemb::Result<()> {
    let g = drift_graph(&DriftConfig::default())?;
    for alignment in [Alignment::None, Alignment::Procrustes] {
        let e = embed_aligned(
            &g,
            &AlignedEmbedderConfig {
                dim: 8,
                seed: 1,
                alignment,
            },
        )?;
        let vels = compute_velocities(&e)?;
        println!("{alignment:?}: mean step length {:.4}", mean_speed(&vels));
    }

    // The rotation on its own: recover a planted rotation of random points.
    let x = DMatrix::from_fn(20, 2, |r, c| ((r * 7 + c * 3) % 11) as f64 - 5.0);
    let (s, c) = (0.6f64.sin(), 0.6f64.cos());
    let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    let y = &x * &rot;
    let q = procrustes_rotation(&x, &y);
    println!("planted rotation residual {:.2e}", procrustes_objective(&x, &y, &q));
    Ok(())
}
