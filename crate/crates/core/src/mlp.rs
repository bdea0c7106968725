//! Single-hidden-layer feedforward network with tanh hidden units and a
//! linear output unit.
//!
//! Weights live in one flat vector of length `h·(d+1) + (h+1)`: for each
//! hidden unit its `d` input weights followed by its bias, then the `h`
//! output weights followed by the output bias.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataio::SupervisedDataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub input_dim: usize,
    pub hidden: usize,
    pub weights: Vec<f64>,
}

pub fn param_count(d: usize, h: usize) -> usize {
    h * (d + 1) + h + 1
}

/// Weights drawn uniformly from `[-0.5, 0.5]`, deterministic in `seed`.
pub fn mlp_init(d: usize, h: usize, seed: u64) -> Result<MlpModel> {
    if d == 0 || h == 0 {
        return Err(Error::InvalidArgument(format!(
            "mlp needs d >= 1 and h >= 1, got d={d}, h={h}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = (0..param_count(d, h)).map(|_| rng.gen_range(-0.5..=0.5)).collect();
    Ok(MlpModel {
        input_dim: d,
        hidden: h,
        weights,
    })
}

impl MlpModel {
    pub fn from_weights(d: usize, h: usize, weights: Vec<f64>) -> Result<Self> {
        if d == 0 || h == 0 {
            return Err(Error::InvalidArgument("mlp needs d >= 1 and h >= 1".into()));
        }
        if weights.len() != param_count(d, h) {
            return Err(Error::Dimension(format!(
                "mlp {d}-{h}-1 has {} parameters, got {}",
                param_count(d, h),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("mlp weights".into()));
        }
        Ok(Self {
            input_dim: d,
            hidden: h,
            weights,
        })
    }

    pub fn param_count(&self) -> usize {
        self.weights.len()
    }

    fn output_offset(&self) -> usize {
        self.hidden * (self.input_dim + 1)
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::Dimension(format!(
                "mlp expects {} inputs, got {}",
                self.input_dim,
                x.len()
            )));
        }
        Ok(())
    }

    fn hidden_activations(&self, x: &[f64], out: &mut [f64]) {
        let stride = self.input_dim + 1;
        for (k, a) in out.iter_mut().enumerate() {
            let w = &self.weights[k * stride..(k + 1) * stride];
            let z = w[self.input_dim] + w[..self.input_dim].iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            *a = z.tanh();
        }
    }

    fn output_from_hidden(&self, act: &[f64]) -> f64 {
        let off = self.output_offset();
        let v = &self.weights[off..off + self.hidden];
        self.weights[off + self.hidden] + v.iter().zip(act).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        let mut act = vec![0.0; self.hidden];
        self.hidden_activations(x, &mut act);
        Ok(self.output_from_hidden(&act))
    }

    /// Output and `∂output/∂w` at `x`.
    pub fn forward_with_gradient(&self, x: &[f64], grad: &mut [f64]) -> Result<f64> {
        self.check_input(x)?;
        let (d, h) = (self.input_dim, self.hidden);
        let mut act = vec![0.0; h];
        self.hidden_activations(x, &mut act);
        let off = self.output_offset();
        for k in 0..h {
            let v = self.weights[off + k];
            let delta = v * (1.0 - act[k] * act[k]);
            let base = k * (d + 1);
            for j in 0..d {
                grad[base + j] = delta * x[j];
            }
            grad[base + d] = delta;
            grad[off + k] = act[k];
        }
        grad[off + h] = 1.0;
        Ok(self.output_from_hidden(&act))
    }

    pub fn predict(&self, dataset: &SupervisedDataset) -> Result<Vec<f64>> {
        (0..dataset.len()).map(|i| self.forward(dataset.row(i))).collect()
    }
}

pub fn mlp_forward(model: &MlpModel, x: &[f64]) -> Result<f64> {
    model.forward(x)
}

/// Jacobian `J[i][j] = ∂e_j/∂w_i` (p × n) and errors `e_j = y_j − t_j`.
pub fn mlp_error_jacobian(model: &MlpModel, dataset: &SupervisedDataset) -> Result<(Matrix, Vec<f64>)> {
    if dataset.dim() != model.input_dim {
        return Err(Error::Dimension(format!(
            "dataset has {} features, mlp expects {}",
            dataset.dim(),
            model.input_dim
        )));
    }
    let p = model.param_count();
    let n = dataset.len();
    let mut jac = Matrix::zeros(p, n);
    let mut e = Vec::with_capacity(n);
    let mut grad = vec![0.0; p];
    for j in 0..n {
        let y = model.forward_with_gradient(dataset.row(j), &mut grad)?;
        e.push(y - dataset.t[j]);
        for (i, g) in grad.iter().enumerate() {
            jac.set(i, j, *g);
        }
    }
    Ok((jac, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_dataset(d: usize, n: usize, seed: u64) -> SupervisedDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let t = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        SupervisedDataset::from_rows(&rows, t).unwrap()
    }

    #[test]
    fn init_is_deterministic_and_sized() {
        assert_eq!(mlp_init(3, 26, 9).unwrap(), mlp_init(3, 26, 9).unwrap());
        assert_ne!(mlp_init(3, 26, 9).unwrap(), mlp_init(3, 26, 10).unwrap());
        assert_eq!(mlp_init(3, 26, 0).unwrap().param_count(), 131);
        assert_eq!(mlp_init(4, 26, 0).unwrap().param_count(), 157);
        assert!(mlp_init(3, 26, 0).unwrap().weights.iter().all(|w| w.abs() <= 0.5));
        assert!(mlp_init(0, 2, 0).is_err());
    }

    #[test]
    fn zero_weights_give_zero() {
        let m = MlpModel::from_weights(2, 3, vec![0.0; param_count(2, 3)]).unwrap();
        assert_eq!(m.forward(&[0.3, -7.0]).unwrap(), 0.0);
    }

    #[test]
    fn constant_path() {
        // hidden weights/bias 0, output weight 1, output bias c
        let m = MlpModel::from_weights(2, 1, vec![0.0, 0.0, 0.0, 1.0, 0.75]).unwrap();
        assert_eq!(m.forward(&[5.0, -1.0]).unwrap(), 0.75);
    }

    #[test]
    fn dimension_checks() {
        let m = mlp_init(2, 2, 1).unwrap();
        assert!(m.forward(&[1.0]).is_err());
        assert!(mlp_error_jacobian(&m, &random_dataset(3, 2, 0)).is_err());
        assert!(MlpModel::from_weights(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn directional_derivative_matches_central_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for seed in 0..10 {
            let m = mlp_init(3, 5, seed).unwrap();
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let dir: Vec<f64> = (0..m.param_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut grad = vec![0.0; m.param_count()];
            m.forward_with_gradient(&x, &mut grad).unwrap();
            let analytic: f64 = grad.iter().zip(&dir).map(|(g, v)| g * v).sum();
            let h = 1e-5;
            let shifted = |s: f64| {
                let w = m.weights.iter().zip(&dir).map(|(w, v)| w + s * v).collect();
                MlpModel::from_weights(3, 5, w).unwrap().forward(&x).unwrap()
            };
            let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
            assert!((analytic - fd).abs() < 1e-6, "{analytic} vs {fd}");
        }
    }

    #[test]
    fn duplicated_rows_give_identical_columns() {
        let rows = vec![vec![0.1, 0.2], vec![0.1, 0.2], vec![-0.4, 0.9]];
        let ds = SupervisedDataset::from_rows(&rows, vec![0.5, 0.5, 0.0]).unwrap();
        let m = mlp_init(2, 4, 3).unwrap();
        let (j, e) = mlp_error_jacobian(&m, &ds).unwrap();
        for i in 0..j.rows() {
            assert_eq!(j.get(i, 0), j.get(i, 1));
        }
        assert_eq!(e[0], e[1]);
    }

    #[test]
    fn zero_output_layer_errors_are_negated_targets() {
        let mut m = mlp_init(2, 3, 4).unwrap();
        let off = 3 * 3;
        m.weights[off..].iter_mut().for_each(|w| *w = 0.0);
        let ds = random_dataset(2, 6, 1);
        let (_, e) = mlp_error_jacobian(&m, &ds).unwrap();
        for (ej, tj) in e.iter().zip(&ds.t) {
            assert_eq!(*ej, -tj);
        }
    }

    #[test]
    fn output_is_bounded_by_output_layer() {
        let m = mlp_init(3, 7, 5).unwrap();
        let off = 7 * 4;
        let bound = m.weights[off + 7].abs() + m.weights[off..off + 7].iter().map(|v| v.abs()).sum::<f64>();
        let ds = random_dataset(3, 50, 2);
        for y in m.predict(&ds).unwrap() {
            assert!(y.abs() <= bound + 1e-12);
        }
    }
}
