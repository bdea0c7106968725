//! Online consequent identification with a forgetting factor on a stream
//! whose underlying function changes twice.

use indexcast::anfis::{build_grid_rules, AnfisOnlineState, MfKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> indexcast::Result<()> {
    let regimes: [fn(f64) -> f64; 3] = [|x| 0.3 + 0.4 * x, |x| 1.0 - x * x, |x| 0.5 * (4.0 * x).sin()];
    let mut states = Vec::new();
    for lambda in [1.0, 0.98, 0.9] {
        let init = build_grid_rules(1, 3, &[(0.0, 1.0)], MfKind::Gaussian)?;
        states.push(AnfisOnlineState::new(init, lambda, 1e6)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut sq = vec![0.0; states.len()];
    println!("{:>5} {:>10} {:>10} {:>10}", "step", "λ=1", "λ=0.98", "λ=0.9");
    for step in 1..=600 {
        let f = regimes[(step - 1) / 200];
        let x = rng.gen_range(0.0..1.0);
        for (s, acc) in states.iter_mut().zip(&mut sq) {
            // error before the update: what a live forecaster would see
            *acc += (s.model.predict_one(&[x])? - f(x)).powi(2);
            s.update(&[x], f(x))?;
        }
        if step % 50 == 0 {
            let rms: Vec<String> = sq.iter().map(|v| format!("{:>10.4}", (v / 50.0).sqrt())).collect();
            println!("{step:>5} {}", rms.join(" "));
            sq.iter_mut().for_each(|v| *v = 0.0);
        }
    }
    Ok(())
}
