//! Recursive least squares tracking a coefficient that jumps halfway through
//! the stream, with and without a forgetting factor.

use indexcast::linalg::{lsq_solve, rls_init, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> indexcast::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rows: Vec<[f64; 2]> = (0..400).map(|_| [rng.gen_range(-1.0..1.0), 1.0]).collect();
    let target = |i: usize, a: &[f64; 2]| if i < 200 { 2.0 * a[0] + 0.5 } else { 1.5 - a[0] };

    // with λ = 1 the recursion reproduces the batch solution
    let b: Vec<f64> = rows[..200].iter().enumerate().map(|(i, a)| target(i, a)).collect();
    let batch = lsq_solve(&Matrix::from_rows(&rows[..200])?, &b)?;
    let mut exact = rls_init(2, 1e8)?;
    for (a, bi) in rows[..200].iter().zip(&b) {
        exact.update(a, *bi, 1.0)?;
    }
    println!("batch  {:?}", batch.x);
    println!("rls    {:?}", exact.x);

    println!("\n{:>5} {:>22} {:>22}", "step", "λ = 1.0", "λ = 0.95");
    let mut plain = rls_init(2, 1e8)?;
    let mut forgetful = rls_init(2, 1e8)?;
    for (i, a) in rows.iter().enumerate() {
        let t = target(i, a);
        plain.update(a, t, 1.0)?;
        forgetful.update(a, t, 0.95)?;
        if (i + 1) % 50 == 0 {
            println!(
                "{:>5} {:>10.4} {:>10.4}  {:>10.4} {:>10.4}",
                i + 1,
                plain.x[0],
                plain.x[1],
                forgetful.x[0],
                forgetful.x[1]
            );
        }
    }
    println!("\nafter the jump the true coefficients are (-1.0, 1.5)");
    Ok(())
}
