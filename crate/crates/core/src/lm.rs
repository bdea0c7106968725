//! Levenberg-Marquardt training on the sum-of-squares error
//! `ψ = Σ e_j²` with `e_j = y_j − t_j`.
//!
//! Each step solves `(JJᵀ + εI) δ = J e` with `J` the p × n error Jacobian
//! and moves `w ← w − δ`. The damping `ε` shrinks by `epsilon_decrease`
//! after a step that lowers `ψ` and grows by `epsilon_increase` after a step
//! that does not; rejected steps are retried within the same epoch. The
//! step length is fixed at one, so `ε` alone controls how far a step goes.

use std::fmt::Write as _;

use crate::dataio::SupervisedDataset;
use crate::error::{Error, Result};
use crate::linalg::{cholesky_solve, dot, lsq_solve, Matrix};
use crate::mlp::{mlp_error_jacobian, MlpModel};

/// Rejected steps allowed in one epoch before training is declared diverged.
pub const MAX_RETRIES: usize = 20;

/// A parametric model whose per-sample errors are differentiable in its
/// parameters.
pub trait LeastSquaresModel: Clone {
    fn params(&self) -> &[f64];

    fn with_params(&self, params: Vec<f64>) -> Result<Self>;

    /// Per-sample errors `y_j − t_j`.
    fn errors(&self, data: &SupervisedDataset) -> Result<Vec<f64>>;

    /// `(J, e)` with `J[i][j] = ∂e_j/∂w_i`.
    fn error_jacobian(&self, data: &SupervisedDataset) -> Result<(Matrix, Vec<f64>)>;
}

impl LeastSquaresModel for MlpModel {
    fn params(&self) -> &[f64] {
        &self.weights
    }

    fn with_params(&self, params: Vec<f64>) -> Result<Self> {
        MlpModel::from_weights(self.input_dim, self.hidden, params)
    }

    fn errors(&self, data: &SupervisedDataset) -> Result<Vec<f64>> {
        Ok(self
            .predict(data)?
            .into_iter()
            .zip(&data.t)
            .map(|(y, t)| y - t)
            .collect())
    }

    fn error_jacobian(&self, data: &SupervisedDataset) -> Result<(Matrix, Vec<f64>)> {
        mlp_error_jacobian(self, data)
    }
}

/// Affine model `y = w·x + b`; parameters are `[w.., b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub params: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(d: usize) -> Self {
        Self {
            params: vec![0.0; d + 1],
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let d = self.params.len() - 1;
        self.params[d] + dot(&self.params[..d], x)
    }

    fn check(&self, data: &SupervisedDataset) -> Result<()> {
        if data.dim() + 1 != self.params.len() {
            return Err(Error::Dimension(format!(
                "linear model has {} inputs, dataset {}",
                self.params.len() - 1,
                data.dim()
            )));
        }
        Ok(())
    }
}

impl LeastSquaresModel for LinearModel {
    fn params(&self) -> &[f64] {
        &self.params
    }

    fn with_params(&self, params: Vec<f64>) -> Result<Self> {
        if params.len() != self.params.len() {
            return Err(Error::Dimension("linear model parameter count".into()));
        }
        Ok(Self { params })
    }

    fn errors(&self, data: &SupervisedDataset) -> Result<Vec<f64>> {
        self.check(data)?;
        Ok((0..data.len()).map(|j| self.predict(data.row(j)) - data.t[j]).collect())
    }

    fn error_jacobian(&self, data: &SupervisedDataset) -> Result<(Matrix, Vec<f64>)> {
        let e = self.errors(data)?;
        let d = data.dim();
        let mut jac = Matrix::zeros(d + 1, data.len());
        for j in 0..data.len() {
            for (i, x) in data.row(j).iter().enumerate() {
                jac.set(i, j, *x);
            }
            jac.set(d, j, 1.0);
        }
        Ok((jac, e))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmConfig {
    pub epsilon_init: f64,
    pub epsilon_decrease: f64,
    pub epsilon_increase: f64,
    pub epsilon_max: f64,
    pub max_epochs: usize,
    pub target_error: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self {
            epsilon_init: 1e-3,
            epsilon_decrease: 0.1,
            epsilon_increase: 10.0,
            epsilon_max: 1e10,
            max_epochs: 50,
            target_error: 0.0,
        }
    }
}

impl LmConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.epsilon_init > 0.0
            && self.epsilon_decrease > 0.0
            && self.epsilon_decrease < 1.0
            && self.epsilon_increase > 1.0
            && self.epsilon_max >= self.epsilon_init
            && self.target_error >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid LM config {self:?}")))
        }
    }
}

/// One attempted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmRecord {
    pub epoch: usize,
    /// `ψ` at the candidate weights.
    pub psi: f64,
    pub epsilon: f64,
    pub accepted: bool,
    /// The damped system was solved by pseudo-inverse instead of Cholesky.
    pub min_norm_fallback: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    MaxEpochs,
    TargetError,
    /// Zero gradient or a step too small to change the weights.
    Stationary,
    /// `ε` exceeded `epsilon_max` or the retry budget ran out.
    Diverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmTrace {
    pub initial_psi: f64,
    pub records: Vec<LmRecord>,
    pub epochs: usize,
    pub termination: Termination,
}

impl LmTrace {
    pub fn final_psi(&self) -> f64 {
        self.accepted_psi().last().copied().unwrap_or(self.initial_psi)
    }

    pub fn accepted_psi(&self) -> Vec<f64> {
        self.records.iter().filter(|r| r.accepted).map(|r| r.psi).collect()
    }

    pub fn diverged(&self) -> bool {
        self.termination == Termination::Diverged
    }

    /// `epoch,psi,epsilon,accepted` rows, one per attempted step.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,psi,epsilon,accepted\n");
        for r in &self.records {
            let _ = writeln!(out, "{},{:e},{:e},{}", r.epoch, r.psi, r.epsilon, r.accepted);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmStep {
    pub weights: Vec<f64>,
    pub min_norm_fallback: bool,
}

/// `w − (JJᵀ + εI)⁻¹ J e`.
///
/// For `ε > 0` the system is solved by Cholesky. With `ε = 0` (or if
/// Cholesky breaks down numerically) the minimum-norm pseudo-inverse
/// solution is used and flagged.
pub fn lm_step(weights: &[f64], jac: &Matrix, e: &[f64], epsilon: f64) -> Result<LmStep> {
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} must be >= 0")));
    }
    let p = weights.len();
    if jac.rows() != p || jac.cols() != e.len() {
        return Err(Error::Dimension(format!(
            "jacobian is {}x{}, expected {p}x{}",
            jac.rows(),
            jac.cols(),
            e.len()
        )));
    }
    let g = jac.matvec(e)?;
    if g.iter().all(|v| *v == 0.0) {
        return Ok(LmStep {
            weights: weights.to_vec(),
            min_norm_fallback: false,
        });
    }
    let mut m = jac.gram_rows();
    for i in 0..p {
        m.set(i, i, m.get(i, i) + epsilon);
    }

    let cholesky = if epsilon > 0.0 { cholesky_solve(&m, &g)? } else { None };
    let (delta, fallback) = match cholesky {
        Some(d) => (d, false),
        None => {
            let sol = lsq_solve(&m, &g)?;
            (sol.x, sol.rank < p)
        }
    };
    Ok(LmStep {
        weights: weights.iter().zip(&delta).map(|(w, d)| w - d).collect(),
        min_norm_fallback: fallback,
    })
}

fn sum_sq(e: &[f64]) -> f64 {
    e.iter().map(|v| v * v).sum()
}

/// Trains `model` on `data` and returns the best weights found with the trace.
pub fn lm_train<M: LeastSquaresModel>(model: &M, data: &SupervisedDataset, config: &LmConfig) -> Result<(M, LmTrace)> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::InvalidArgument("cannot train on an empty dataset".into()));
    }

    let mut current = model.clone();
    let (mut jac, mut e) = current.error_jacobian(data)?;
    let mut psi = sum_sq(&e);
    if !psi.is_finite() {
        return Err(Error::NonFinite("sum-of-squares error at epoch 0".into()));
    }
    let mut trace = LmTrace {
        initial_psi: psi,
        records: Vec::new(),
        epochs: 0,
        termination: Termination::MaxEpochs,
    };
    let mut epsilon = config.epsilon_init;

    'epochs: for epoch in 1..=config.max_epochs {
        if psi <= config.target_error {
            trace.termination = Termination::TargetError;
            break;
        }
        let w = current.params().to_vec();
        let w_norm = dot(&w, &w).sqrt();
        let mut retries = 0;
        loop {
            let step = lm_step(&w, &jac, &e, epsilon)?;
            let moved = step
                .weights
                .iter()
                .zip(&w)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if moved <= 1e-15 * (1.0 + w_norm) {
                trace.termination = Termination::Stationary;
                break 'epochs;
            }
            let candidate = current.with_params(step.weights)?;
            let cand_psi = sum_sq(&candidate.errors(data)?);
            let accepted = cand_psi.is_finite() && cand_psi < psi;
            trace.records.push(LmRecord {
                epoch,
                psi: cand_psi,
                epsilon,
                accepted,
                min_norm_fallback: step.min_norm_fallback,
            });
            if accepted {
                current = candidate;
                (jac, e) = current.error_jacobian(data)?;
                psi = sum_sq(&e);
                if !psi.is_finite() {
                    return Err(Error::NonFinite(format!("sum-of-squares error at epoch {epoch}")));
                }
                epsilon *= config.epsilon_decrease;
                trace.epochs = epoch;
                break;
            }
            epsilon *= config.epsilon_increase;
            retries += 1;
            if epsilon > config.epsilon_max || retries >= MAX_RETRIES {
                trace.termination = Termination::Diverged;
                break 'epochs;
            }
        }
    }
    Ok((current, trace))
}
