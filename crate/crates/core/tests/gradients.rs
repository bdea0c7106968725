//! Analytic derivatives against central finite differences.

use indexcast::anfis::{anfis_premise_gradient, AnfisModel, MembershipFn};
use indexcast::dataio::SupervisedDataset;
use indexcast::mlp::{mlp_error_jacobian, mlp_init, MlpModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_data(rng: &mut ChaCha8Rng, d: usize, n: usize) -> SupervisedDataset {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let t = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    SupervisedDataset::from_rows(&rows, t).unwrap()
}

fn errors(m: &MlpModel, data: &SupervisedDataset) -> Vec<f64> {
    m.predict(data)
        .unwrap()
        .iter()
        .zip(&data.t)
        .map(|(y, t)| y - t)
        .collect()
}

#[test]
fn mlp_jacobian_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for inst in 0..20 {
        let d = rng.gen_range(1..=4);
        let h = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=8);
        let model = mlp_init(d, h, inst).unwrap();
        let data = random_data(&mut rng, d, n);
        let (jac, _) = mlp_error_jacobian(&model, &data).unwrap();
        let step = 1e-6;
        for i in 0..model.param_count() {
            let shifted = |s: f64| {
                let mut w = model.weights.clone();
                w[i] += s;
                errors(&MlpModel::from_weights(d, h, w).unwrap(), &data)
            };
            let (up, down) = (shifted(step), shifted(-step));
            for j in 0..n {
                let fd = (up[j] - down[j]) / (2.0 * step);
                assert!(
                    (jac.get(i, j) - fd).abs() < 1e-5,
                    "instance {inst}: J[{i}][{j}] = {} vs {fd}",
                    jac.get(i, j)
                );
            }
        }
    }
}

#[test]
fn jacobian_times_error_is_half_the_psi_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for inst in 0..10 {
        let model = mlp_init(3, 4, 100 + inst).unwrap();
        let data = random_data(&mut rng, 3, 6);
        let (jac, e) = mlp_error_jacobian(&model, &data).unwrap();
        let je = jac.matvec(&e).unwrap();
        let psi = |w: Vec<f64>| -> f64 {
            errors(&MlpModel::from_weights(3, 4, w).unwrap(), &data)
                .iter()
                .map(|v| v * v)
                .sum()
        };
        for (i, g) in je.iter().enumerate() {
            let step = 1e-6;
            let mut up = model.weights.clone();
            let mut down = model.weights.clone();
            up[i] += step;
            down[i] -= step;
            let grad = (psi(up) - psi(down)) / (2.0 * step);
            assert!((g - 0.5 * grad).abs() < 1e-5, "{g} vs {}", 0.5 * grad);
        }
    }
}

fn random_anfis(rng: &mut ChaCha8Rng, d: usize, gaussian: bool) -> AnfisModel {
    let grid = (0..d)
        .map(|_| {
            let k = rng.gen_range(1..=3);
            (0..k)
                .map(|i| {
                    let center = -1.0 + 2.0 * (i as f64 + rng.gen_range(0.2..0.8)) / k as f64;
                    if gaussian {
                        MembershipFn::Gaussian {
                            c: center,
                            sigma: rng.gen_range(0.3..1.0),
                        }
                    } else {
                        MembershipFn::Triangular {
                            a: center - rng.gen_range(0.8..1.6),
                            b: center,
                            c: center + rng.gen_range(0.8..1.6),
                        }
                    }
                })
                .collect()
        })
        .collect();
    let mut m = AnfisModel::new(grid).unwrap();
    m.consequents = (0..m.consequent_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    m
}

fn sse(m: &AnfisModel, data: &SupervisedDataset) -> f64 {
    m.squared_error(data).unwrap()
}

/// Minimum distance from the inputs to any triangle kink, where the
/// central difference is not a derivative.
fn kink_distance(m: &AnfisModel, data: &SupervisedDataset) -> f64 {
    let mut best = f64::INFINITY;
    for j in 0..data.len() {
        for (mi, mfs) in m.mf_grid.iter().enumerate() {
            for mf in mfs {
                if let MembershipFn::Triangular { a, b, c } = *mf {
                    for k in [a, b, c] {
                        best = best.min((data.row(j)[mi] - k).abs());
                    }
                }
            }
        }
    }
    best
}

#[test]
fn anfis_premise_gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut checked = 0;
    let mut attempt = 0;
    while checked < 20 {
        attempt += 1;
        let gaussian = checked % 2 == 0;
        let d = rng.gen_range(1..=3);
        let model = random_anfis(&mut rng, d, gaussian);
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|_| (0..d).map(|_| rng.gen_range(-0.9..0.9)).collect())
            .collect();
        let t = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let data = SupervisedDataset::from_rows(&rows, t).unwrap();
        let step = 1e-6;
        if !gaussian && kink_distance(&model, &data) < 100.0 * step {
            assert!(attempt < 1000);
            continue;
        }
        let g = anfis_premise_gradient(&model, &data).unwrap();
        let p0 = model.premise_params();
        for i in 0..p0.len() {
            let shifted = |s: f64| {
                let mut p = p0.clone();
                p[i] += s;
                let mut m = model.clone();
                m.set_premise_params(&p).unwrap();
                sse(&m, &data)
            };
            let fd = (shifted(step) - shifted(-step)) / (2.0 * step);
            assert!(
                (g[i] - fd).abs() < 1e-5,
                "{} instance {checked}: dE/dθ[{i}] = {} vs {fd}",
                if gaussian { "gaussian" } else { "triangular" },
                g[i]
            );
        }
        checked += 1;
    }
}

#[test]
fn anfis_gradient_vanishes_at_zero_error() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let model = random_anfis(&mut rng, 2, true);
    let rows: Vec<Vec<f64>> = (0..5)
        .map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
        .collect();
    let t: Vec<f64> = rows.iter().map(|r| model.predict_one(r).unwrap()).collect();
    let data = SupervisedDataset::from_rows(&rows, t).unwrap();
    assert!(anfis_premise_gradient(&model, &data).unwrap().iter().all(|g| *g == 0.0));
}

#[test]
fn unfired_membership_has_zero_gradient() {
    let mut model = AnfisModel::new(vec![vec![
        MembershipFn::Triangular { a: 0.0, b: 1.0, c: 2.0 },
        MembershipFn::Triangular { a: 1.0, b: 2.0, c: 3.0 },
        MembershipFn::Triangular {
            a: 10.0,
            b: 11.0,
            c: 12.0,
        },
    ]])
    .unwrap();
    model.consequents = vec![1.0, 0.0, -1.0, 2.0, 3.0, 3.0];
    let data =
        SupervisedDataset::from_rows(&[vec![0.5], vec![1.3], vec![1.7], vec![2.4]], vec![0.0, 1.0, 0.0, 1.0]).unwrap();
    let g = anfis_premise_gradient(&model, &data).unwrap();
    assert!(g[..6].iter().any(|v| *v != 0.0));
    assert_eq!(&g[6..], &[0.0, 0.0, 0.0]);
}
