use indexcast::dataio::SupervisedDataset;
use indexcast::linalg::{cholesky_solve, lsq_solve, Matrix};
use indexcast::lm::{lm_step, lm_train, LeastSquaresModel, LinearModel, LmConfig};
use indexcast::mlp::{mlp_error_jacobian, mlp_init};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn linear_problem(rng: &mut ChaCha8Rng, d: usize, n: usize, noise: f64) -> SupervisedDataset {
    let w: Vec<f64> = (0..=d).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let t = rows
        .iter()
        .map(|r| w[d] + r.iter().zip(&w).map(|(x, c)| x * c).sum::<f64>() + noise * rng.gen_range(-1.0..1.0))
        .collect();
    SupervisedDataset::from_rows(&rows, t).unwrap()
}

fn augmented(data: &SupervisedDataset) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..data.len())
        .map(|j| data.row(j).iter().copied().chain([1.0]).collect())
        .collect();
    Matrix::from_rows(&rows).unwrap()
}

#[test]
fn linear_models_reach_the_least_squares_optimum_in_three_epochs() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for noise in [0.0, 0.1] {
        for _ in 0..10 {
            let d = rng.gen_range(1..=5);
            let data = linear_problem(&mut rng, d, 30, noise);
            let oracle = lsq_solve(&augmented(&data), &data.t).unwrap().x;
            let cfg = LmConfig {
                max_epochs: 3,
                ..LmConfig::default()
            };
            let (fit, trace) = lm_train(&LinearModel::zeros(d), &data, &cfg).unwrap();
            assert!(trace.epochs <= 3);
            for (a, b) in fit.params.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-6, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn accepted_psi_strictly_decreases_on_random_mlps() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for seed in 0..50 {
        let d = rng.gen_range(1..=4);
        let n = rng.gen_range(5..=30);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let t = rows
            .iter()
            .map(|r| (2.0 * r[0]).sin() + 0.3 * rng.gen_range(-1.0..1.0))
            .collect();
        let data = SupervisedDataset::from_rows(&rows, t).unwrap();
        let model = mlp_init(d, rng.gen_range(1..=8), seed).unwrap();
        let cfg = LmConfig {
            max_epochs: 20,
            ..LmConfig::default()
        };
        let (fit, trace) = lm_train(&model, &data, &cfg).unwrap();
        let mut prev = trace.initial_psi;
        for psi in trace.accepted_psi() {
            assert!(psi < prev, "seed {seed}: {psi} !< {prev}");
            prev = psi;
        }
        let final_psi: f64 = fit.errors(&data).unwrap().iter().map(|e| e * e).sum();
        assert_eq!(final_psi, trace.final_psi());
    }
}

fn angle(a: &[f64], b: &[f64]) -> f64 {
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let diff = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x / na - y / nb).powi(2))
        .sum::<f64>()
        .sqrt();
    let sum = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x / na + y / nb).powi(2))
        .sum::<f64>()
        .sqrt();
    2.0 * diff.atan2(sum)
}

#[test]
fn heavy_damping_steps_along_negative_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for seed in 0..10 {
        let data = linear_problem(&mut rng, 3, 12, 0.5);
        let model = mlp_init(3, 5, seed).unwrap();
        let (jac, e) = mlp_error_jacobian(&model, &data).unwrap();
        let g = jac.matvec(&e).unwrap();
        // from the origin the returned weights are the step itself, free of
        // the cancellation in `w_new − w` for a step of size ~1e-12
        let origin = vec![0.0; model.param_count()];
        let delta = lm_step(&origin, &jac, &e, 1e12).unwrap().weights;
        let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
        assert!(angle(&delta, &neg_g) < 1e-6);
    }
}

#[test]
fn damped_normal_matrix_is_positive_definite() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for seed in 0..10 {
        let data = linear_problem(&mut rng, 2, 3, 0.1);
        // more parameters than samples: JJᵀ is singular
        let model = mlp_init(2, 6, seed).unwrap();
        let (jac, _) = mlp_error_jacobian(&model, &data).unwrap();
        for eps in [1e-8, 1e-3, 1.0, 1e6] {
            let mut m = jac.gram_rows();
            for i in 0..m.rows() {
                m.set(i, i, m.get(i, i) + eps);
            }
            let rhs = vec![1.0; m.rows()];
            assert!(cholesky_solve(&m, &rhs).unwrap().is_some(), "eps {eps}");
        }
    }
}

#[test]
fn undamped_step_is_gauss_newton_on_quadratics() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let data = linear_problem(&mut rng, 3, 20, 0.2);
    let model = LinearModel::zeros(3);
    let (jac, e) = model.error_jacobian(&data).unwrap();
    let step = lm_step(model.params(), &jac, &e, 0.0).unwrap();
    let oracle = lsq_solve(&augmented(&data), &data.t).unwrap().x;
    for (a, b) in step.weights.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn xor_is_learned_by_some_seed() {
    let rows = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
    let data = SupervisedDataset::from_rows(&rows, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
    let cfg = LmConfig {
        max_epochs: 200,
        ..LmConfig::default()
    };
    let best = (0..5)
        .map(|seed| {
            lm_train(&mlp_init(2, 4, seed).unwrap(), &data, &cfg)
                .unwrap()
                .1
                .final_psi()
        })
        .fold(f64::INFINITY, f64::min);
    assert!(best < 1e-3, "best psi {best}");
}
