//! Difference boosting on two overlapping classes, then the regression
//! adapter on a noisy ramp.

use indexcast::dataio::SupervisedDataset;
use indexcast::dbnn::{dbnn_fit_bins, dbnn_regress_train, dbnn_train_traced, DbnnRegConfig, DbnnTrainConfig};
use indexcast::linalg::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> indexcast::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let labels: Vec<usize> = (0..200).map(|j| j % 2).collect();
    let rows: Vec<[f64; 2]> = labels
        .iter()
        .map(|&c| {
            let s = 0.25 * c as f64;
            [rng.gen_range(0.0..0.7) + s, rng.gen_range(0.0..0.7) + s]
        })
        .collect();
    let x = Matrix::from_rows(&rows)?;
    let bins = dbnn_fit_bins(&x, 6)?;
    let (model, trace) = dbnn_train_traced(&x, &labels, bins, &DbnnTrainConfig::default())?;
    println!("training accuracy per round:");
    for (round, acc) in trace.accuracy.iter().enumerate().take(12) {
        println!("  {round:>2}: {acc:.3}");
    }
    println!(
        "kept round {}; posterior at (0.5, 0.5): {:?}",
        trace.kept_round,
        model.posterior(&[0.5, 0.5])?
    );

    let xs: Vec<[f64; 1]> = (0..300).map(|_| [rng.gen_range(0.0..1.0)]).collect();
    let t = xs.iter().map(|r| 2.0 * r[0] + rng.gen_range(-0.1..0.1)).collect();
    let data = SupervisedDataset::from_rows(&xs, t)?;
    let reg = dbnn_regress_train(&data, &DbnnRegConfig::default())?;
    println!("\nregression adapter, {} target bins:", reg.centers.len());
    for q in [0.1, 0.3, 0.5, 0.7, 0.9] {
        println!(
            "  x = {q:.1}  predicted {:.3}  (noise-free {:.1})",
            reg.predict_one(&[q])?,
            2.0 * q
        );
    }
    Ok(())
}
