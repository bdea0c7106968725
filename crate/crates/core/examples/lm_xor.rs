//! Levenberg-Marquardt training of a small MLP on XOR, printing the
//! per-epoch error trace of the best seed.

use indexcast::dataio::SupervisedDataset;
use indexcast::lm::{lm_train, LmConfig};
use indexcast::mlp::mlp_init;

fn main() -> indexcast::Result<()> {
    let data = SupervisedDataset::from_rows(
        &[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]],
        vec![0.0, 1.0, 1.0, 0.0],
    )?;
    let cfg = LmConfig {
        max_epochs: 200,
        ..LmConfig::default()
    };
    let mut best = None;
    for seed in 0..5 {
        let (model, trace) = lm_train(&mlp_init(2, 4, seed)?, &data, &cfg)?;
        println!(
            "seed {seed}: psi {:.3e} after {} epochs ({:?})",
            trace.final_psi(),
            trace.epochs,
            trace.termination
        );
        if best
            .as_ref()
            .is_none_or(|(_, t): &(_, indexcast::lm::LmTrace)| trace.final_psi() < t.final_psi())
        {
            best = Some((model, trace));
        }
    }
    let (model, trace) = best.expect("at least one seed");
    println!("\nbest run trace:\n{}", trace.to_csv());
    for j in 0..data.len() {
        println!("{:?} -> {:.4}", data.row(j), model.forward(data.row(j))?);
    }
    Ok(())
}
