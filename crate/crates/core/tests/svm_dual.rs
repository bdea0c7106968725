use indexcast::svm::{kernel_eval, mercer_gram_check, svc_train, svr_train, Kernel, SvmTrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `W(α) = −Σα + ½ ΣΣ yᵢyⱼαᵢαⱼ k(xᵢ, xⱼ)`, evaluated directly.
fn dual_objective(x: &[Vec<f64>], y: &[f64], alpha: &[f64], k: &Kernel) -> f64 {
    let mut quad = 0.0;
    for i in 0..x.len() {
        for j in 0..x.len() {
            quad += y[i] * y[j] * alpha[i] * alpha[j] * kernel_eval(k, &x[i], &x[j]).unwrap();
        }
    }
    0.5 * quad - alpha.iter().sum::<f64>()
}

/// Uniform box sample rescaled so the two label groups balance.
fn random_feasible(rng: &mut ChaCha8Rng, y: &[f64], c: f64) -> Vec<f64> {
    let mut a: Vec<f64> = y.iter().map(|_| rng.gen_range(0.0..=c)).collect();
    let pos: f64 = a.iter().zip(y).filter(|(_, y)| **y > 0.0).map(|(a, _)| a).sum();
    let neg: f64 = a.iter().zip(y).filter(|(_, y)| **y < 0.0).map(|(a, _)| a).sum();
    let (shrink_label, factor) = if pos > neg { (1.0, neg / pos) } else { (-1.0, pos / neg) };
    for (ai, yi) in a.iter_mut().zip(y) {
        if *yi == shrink_label {
            *ai *= factor;
        }
    }
    a
}

fn random_labeled(rng: &mut ChaCha8Rng, n: usize, d: usize, separable: bool) -> (Vec<Vec<f64>>, Vec<f64>) {
    let w: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut x = Vec::new();
    let mut y = Vec::new();
    while x.len() < n {
        let p: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s: f64 = p.iter().zip(&w).map(|(a, b)| a * b).sum();
        if separable && s.abs() < 0.1 {
            continue;
        }
        let label = if separable {
            s.signum()
        } else if rng.gen_bool(0.5) {
            1.0
        } else {
            -1.0
        };
        x.push(p);
        y.push(label);
    }
    // make sure both labels are present
    y[0] = 1.0;
    y[1] = -1.0;
    if separable {
        let s0: f64 = x[0].iter().zip(&w).map(|(a, b)| a * b).sum();
        let s1: f64 = x[1].iter().zip(&w).map(|(a, b)| a * b).sum();
        if s0 < 0.0 {
            x[0].iter_mut().for_each(|v| *v = -*v);
        }
        if s1 > 0.0 {
            x[1].iter_mut().for_each(|v| *v = -*v);
        }
    }
    (x, y)
}

#[test]
fn two_point_problem_has_the_analytic_solution() {
    let x = vec![vec![1.0, 1.0], vec![-1.0, -1.0]];
    let (m, rep) = svc_train(&x, &[1.0, -1.0], Kernel::Linear, &SvmTrainConfig::default()).unwrap();
    assert!(rep.converged);
    assert!((rep.alphas[0] - 0.25).abs() < 1e-9 && (rep.alphas[1] - 0.25).abs() < 1e-9);
    assert!(m.b.abs() < 1e-9);
    for p in [[1.0, 0.0], [0.0, 1.0], [2.0, 2.0], [0.3, -0.7]] {
        assert!((m.predict(&p).unwrap() - 0.5 * (p[0] + p[1])).abs() < 1e-9);
    }
    assert!((m.predict(&[1.0, 1.0]).unwrap() - 1.0).abs() < 1e-9);
    assert!((m.predict(&[-1.0, -1.0]).unwrap() + 1.0).abs() < 1e-9);
    assert_eq!(m.predict(&[0.4, -0.4]).unwrap().abs(), 0.0);
    assert_eq!(m.classify(&[2.0, 2.0]).unwrap(), 1.0);
    // geometric margin 2/‖w‖ with w = (0.5, 0.5)
    assert!((2.0 / (0.5f64.powi(2) * 2.0).sqrt() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn trained_dual_beats_random_feasible_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let kernels = [
        Kernel::Linear,
        Kernel::Rbf { gamma: 0.7 },
        Kernel::Polynomial { degree: 2, coef0: 1.0 },
    ];
    for inst in 0..12 {
        let n = rng.gen_range(4..=15);
        let (x, y) = random_labeled(&mut rng, n, 2, inst % 2 == 0);
        let kernel = kernels[inst % 3];
        let cfg = SvmTrainConfig {
            c: 2.0,
            ..SvmTrainConfig::default()
        };
        let (_, rep) = svc_train(&x, &y, kernel, &cfg).unwrap();
        let ours = dual_objective(&x, &y, &rep.alphas, &kernel);
        assert!((ours - rep.objective).abs() < 1e-9 * (1.0 + ours.abs()));
        for _ in 0..1000 {
            let a = random_feasible(&mut rng, &y, cfg.c);
            assert!(ours <= dual_objective(&x, &y, &a, &kernel) + 1e-12);
        }
        let eq: f64 = rep.alphas.iter().zip(&y).map(|(a, y)| a * y).sum();
        assert!(eq.abs() < 1e-6);
        assert!(rep.alphas.iter().all(|a| *a >= -1e-6 && *a <= cfg.c + 1e-6));
    }
}

#[test]
fn separable_data_has_unit_functional_margin() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..5 {
        let (x, y) = random_labeled(&mut rng, 20, 2, true);
        let cfg = SvmTrainConfig {
            c: 1e4,
            tolerance: 1e-6,
            ..SvmTrainConfig::default()
        };
        let (m, rep) = svc_train(&x, &y, Kernel::Linear, &cfg).unwrap();
        let margins: Vec<f64> = x.iter().zip(&y).map(|(p, l)| l * m.predict(p).unwrap()).collect();
        assert!(margins.iter().all(|v| *v > 0.0));
        let min = margins.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((min - 1.0).abs() < 1e-3, "min margin {min}");
        for (i, mg) in margins.iter().enumerate() {
            if rep.alphas[i] > 1e-8 {
                assert!((mg - 1.0).abs() < 1e-3);
            }
        }
    }
}

#[test]
fn removing_non_support_vectors_keeps_the_decision_function() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for inst in 0..4 {
        let (x, y) = random_labeled(&mut rng, 25, 2, inst % 2 == 0);
        let kernel = if inst < 2 {
            Kernel::Linear
        } else {
            Kernel::Rbf { gamma: 1.0 }
        };
        let cfg = SvmTrainConfig {
            c: 5.0,
            tolerance: 1e-8,
            ..SvmTrainConfig::default()
        };
        let (full, rep) = svc_train(&x, &y, kernel, &cfg).unwrap();
        let probes: Vec<Vec<f64>> = (0..50)
            .map(|_| vec![rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)])
            .collect();
        for drop in (0..x.len()).filter(|&i| rep.alphas[i] <= 1e-8).take(5) {
            let xs: Vec<Vec<f64>> = x
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != drop)
                .map(|(_, v)| v.clone())
                .collect();
            let ys: Vec<f64> = y
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != drop)
                .map(|(_, v)| *v)
                .collect();
            let (reduced, _) = svc_train(&xs, &ys, kernel, &cfg).unwrap();
            for p in &probes {
                let (a, b) = (full.predict(p).unwrap(), reduced.predict(p).unwrap());
                assert!((a - b).abs() < 1e-4, "dropping {drop}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn svr_fits_a_line_inside_the_tube() {
    let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 / 9.0]).collect();
    let t: Vec<f64> = x.iter().map(|r| r[0]).collect();
    let cfg = SvmTrainConfig {
        c: 100.0,
        epsilon_tube: 0.05,
        tolerance: 1e-8,
        ..SvmTrainConfig::default()
    };
    let (m, rep) = svr_train(&x, &t, Kernel::Linear, &cfg).unwrap();
    for (p, ti) in x.iter().zip(&t) {
        assert!((m.predict(p).unwrap() - ti).abs() <= 0.05 + 1e-6);
    }
    assert!(rep.alphas.iter().sum::<f64>().abs() < 1e-6);
    assert!(rep.alphas.iter().all(|b| b.abs() <= cfg.c + 1e-9));
}

#[test]
fn svr_coefficients_balance_on_random_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..5 {
        let x: Vec<Vec<f64>> = (0..30)
            .map(|_| vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
            .collect();
        let t: Vec<f64> = x
            .iter()
            .map(|r| (3.0 * r[0]).sin() * r[1] + 0.05 * rng.gen_range(-1.0..1.0))
            .collect();
        let cfg = SvmTrainConfig::default();
        let (m, rep) = svr_train(&x, &t, Kernel::Rbf { gamma: 0.5 }, &cfg).unwrap();
        assert!(rep.alphas.iter().sum::<f64>().abs() < 1e-6);
        assert!(m.coef.iter().all(|c| c.abs() <= cfg.c + 1e-9));
    }
}

#[test]
fn mercer_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let pts: Vec<Vec<f64>> = (0..10)
        .map(|_| (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    assert!(mercer_gram_check(&Kernel::Rbf { gamma: 0.5 }, &pts, 1e-10).unwrap());
    assert!(mercer_gram_check(&Kernel::Polynomial { degree: 3, coef0: 1.0 }, &pts, 1e-8).unwrap());
    assert!(mercer_gram_check(&Kernel::Linear, &pts[..1], 0.0).unwrap());
}
