//! Hybrid learning of a two-input ANFIS on a smooth surface: least squares
//! for the consequents, gradient steps for the membership functions.

use indexcast::anfis::{anfis_train, build_grid_rules, MembershipFn, MfKind};
use indexcast::dataio::SupervisedDataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> indexcast::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let surface = |x: f64, y: f64| (3.0 * x).sin() * (2.0 * y).cos();
    let rows: Vec<[f64; 2]> = (0..300)
        .map(|_| [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
        .collect();
    let t = rows.iter().map(|r| surface(r[0], r[1])).collect();
    let data = SupervisedDataset::from_rows(&rows, t)?;

    for kind in [MfKind::Triangular, MfKind::Gaussian] {
        let init = build_grid_rules(2, 3, &[(0.0, 1.0), (0.0, 1.0)], kind)?;
        let (model, errors) = anfis_train(&init, &data, 12, 0.01)?;
        println!(
            "{kind:?}: {} rules, {} consequent parameters",
            model.rule_count(),
            model.consequent_count()
        );
        for (epoch, e) in errors.iter().enumerate() {
            println!("  epoch {epoch:>2}  E = {e:.6}");
        }
        for mf in &model.mf_grid[0] {
            match mf {
                MembershipFn::Triangular { a, b, c } => println!("  x: triangle ({a:.3}, {b:.3}, {c:.3})"),
                MembershipFn::Gaussian { c, sigma } => println!("  x: gaussian c={c:.3} σ={sigma:.3}"),
            }
        }
    }
    Ok(())
}
