//! Maximum-margin classification on two separable clouds.

use indexcast::svm::{svc_train, Kernel, SvmTrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> indexcast::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for label in [1.0, -1.0] {
        for _ in 0..20 {
            x.push(vec![
                label * 1.5 + rng.gen_range(-1.0..1.0),
                label + rng.gen_range(-1.0..1.0),
            ]);
            y.push(label);
        }
    }
    let cfg = SvmTrainConfig {
        c: 1e3,
        tolerance: 1e-6,
        ..SvmTrainConfig::default()
    };
    let (model, report) = svc_train(&x, &y, Kernel::Linear, &cfg)?;
    let w: Vec<f64> = (0..2)
        .map(|k| {
            model
                .support_vectors
                .iter()
                .zip(&model.coef)
                .map(|(sv, c)| c * sv[k])
                .sum()
        })
        .collect();
    let wn = (w[0] * w[0] + w[1] * w[1]).sqrt();
    println!(
        "{} support vectors, {} iterations, converged {}",
        model.support_vectors.len(),
        report.iterations,
        report.converged
    );
    println!(
        "w = ({:.4}, {:.4}), b = {:.4}, margin width {:.4}",
        w[0],
        w[1],
        model.b,
        2.0 / wn
    );
    for (sv, c) in model.support_vectors.iter().zip(&model.coef) {
        println!(
            "  sv ({:>7.4}, {:>7.4})  y·α = {:>8.4}  f = {:>7.4}",
            sv[0],
            sv[1],
            c,
            model.predict(sv)?
        );
    }
    let errors = x
        .iter()
        .zip(&y)
        .filter(|(p, l)| model.classify(p).unwrap() != **l)
        .count();
    println!("training errors: {errors}");
    Ok(())
}
