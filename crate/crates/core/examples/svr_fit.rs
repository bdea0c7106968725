//! ε-insensitive regression of a noisy sine with an RBF kernel.

use indexcast::svm::{svr_train, Kernel, SvmTrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> indexcast::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x: Vec<Vec<f64>> = (0..60).map(|i| vec![i as f64 / 59.0]).collect();
    let t: Vec<f64> = x
        .iter()
        .map(|r| (6.0 * r[0]).sin() + rng.gen_range(-0.05..0.05))
        .collect();
    for tube in [0.01, 0.1, 0.3] {
        let cfg = SvmTrainConfig {
            c: 10.0,
            epsilon_tube: tube,
            ..SvmTrainConfig::default()
        };
        let (model, _) = svr_train(&x, &t, Kernel::Rbf { gamma: 10.0 }, &cfg)?;
        let mse: f64 = x
            .iter()
            .zip(&t)
            .map(|(p, ti)| (model.predict(p).unwrap() - ti).powi(2))
            .sum::<f64>()
            / x.len() as f64;
        println!(
            "tube {tube:<5} support vectors {:>2}/{}  train rmse {:.4}",
            model.support_vectors.len(),
            x.len(),
            mse.sqrt()
        );
    }
    Ok(())
}
