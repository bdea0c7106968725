//! Kernel machines trained in the dual.
//!
//! Both problems are instances of
//!
//! ```text
//! min ½ αᵀQα + pᵀα   s.t.  yᵀα = 0,  0 ≤ αᵢ ≤ C
//! ```
//!
//! solved by pairwise coordinate optimization: each iteration picks the
//! maximal-violating index `i` and the partner `j` with the largest
//! second-order decrease, then solves the two-variable subproblem exactly.
//! Classification uses `Qᵢⱼ = yᵢyⱼk(xᵢ,xⱼ)` and `p = −1`. Epsilon-insensitive
//! regression doubles the variables into `(α, α*)` with `p = (ε − t, ε + t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, psd_check, Matrix};

/// Curvature floor for non-positive-definite pairs.
const TAU: f64 = 1e-12;
/// Dual coefficients at or below this magnitude are dropped from the model.
pub const SV_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Kernel {
    Linear,
    Polynomial { degree: u32, coef0: f64 },
    Rbf { gamma: f64 },
}

impl Kernel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Polynomial { degree, coef0 } if degree == 0 || !coef0.is_finite() => Err(Error::InvalidArgument(
                format!("polynomial kernel degree {degree}, coef0 {coef0}"),
            )),
            Kernel::Rbf { gamma } if !(gamma > 0.0 && gamma.is_finite()) => Err(Error::InvalidArgument(format!(
                "rbf gamma must be positive, got {gamma}"
            ))),
            _ => Ok(()),
        }
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => dot(x, y),
            Kernel::Polynomial { degree, coef0 } => (dot(x, y) + coef0).powi(degree as i32),
            Kernel::Rbf { gamma } => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-gamma * d2).exp()
            }
        }
    }
}

pub fn kernel_eval(k: &Kernel, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "kernel arguments of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(k.eval(x, y))
}

fn gram<R: AsRef<[f64]>>(k: &dyn Fn(&[f64], &[f64]) -> f64, points: &[R]) -> Matrix {
    let n = points.len();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = k(points[i].as_ref(), points[j].as_ref());
            g.set(i, j, v);
            g.set(j, i, v);
        }
    }
    g
}

/// Finite Mercer test: is the Gram matrix of `kernel` on `points` PSD up to `tol`?
pub fn mercer_gram_check<R: AsRef<[f64]>>(kernel: &Kernel, points: &[R], tol: f64) -> Result<bool> {
    kernel.validate()?;
    custom_mercer_gram_check(&|x, y| kernel.eval(x, y), points, tol)
}

/// [`mercer_gram_check`] for an arbitrary symmetric function.
pub fn custom_mercer_gram_check<R: AsRef<[f64]>>(
    k: &dyn Fn(&[f64], &[f64]) -> f64,
    points: &[R],
    tol: f64,
) -> Result<bool> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidArgument("mercer check needs at least one point".into()));
    };
    let d = first.as_ref().len();
    if points.iter().any(|p| p.as_ref().len() != d) {
        return Err(Error::Dimension("points of differing dimension".into()));
    }
    psd_check(&gram(k, points), tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SvmMode {
    Classify,
    Regress,
}

/// Trained kernel expansion `f(x) = Σ coefᵢ k(svᵢ, x) + b`.
///
/// For classification `coefᵢ = yᵢαᵢ`; for regression `coefᵢ = αᵢ − αᵢ*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub input_dim: usize,
    pub support_vectors: Vec<Vec<f64>>,
    pub coef: Vec<f64>,
    pub b: f64,
    pub kernel: Kernel,
    pub mode: SvmMode,
}

impl SvmModel {
    /// Raw decision / regression value.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if self.input_dim == 0 {
            return Err(Error::InvalidArgument("svm model is empty".into()));
        }
        if x.len() != self.input_dim {
            return Err(Error::Dimension(format!(
                "svm expects {} inputs, got {}",
                self.input_dim,
                x.len()
            )));
        }
        Ok(self.b
            + self
                .support_vectors
                .iter()
                .zip(&self.coef)
                .map(|(sv, c)| c * self.kernel.eval(sv, x))
                .sum::<f64>())
    }

    /// `+1` on the non-negative side of the hyperplane, `-1` otherwise.
    pub fn classify(&self, x: &[f64]) -> Result<f64> {
        Ok(if self.predict(x)? >= 0.0 { 1.0 } else { -1.0 })
    }
}

pub fn svm_predict(model: &SvmModel, x: &[f64]) -> Result<f64> {
    model.predict(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmTrainConfig {
    pub c: f64,
    /// Stop once the maximal KKT violation falls below this.
    pub tolerance: f64,
    /// Iteration budget in units of one update per dual variable;
    /// `None` means `10·n`.
    pub max_passes: Option<usize>,
    pub epsilon_tube: f64,
    /// Kept for config round-trips; the working-set solver is deterministic.
    pub seed: u64,
}

impl Default for SvmTrainConfig {
    fn default() -> Self {
        Self {
            c: 10.0,
            tolerance: 1e-4,
            max_passes: None,
            epsilon_tube: 0.01,
            seed: 0,
        }
    }
}

impl SvmTrainConfig {
    fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.tolerance > 0.0 && self.epsilon_tube >= 0.0) {
            return Err(Error::InvalidArgument(format!("invalid svm config {self:?}")));
        }
        Ok(())
    }
}

/// Solver diagnostics returned next to the model.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    /// Full dual vector: `α` for classification, `α − α*` for regression.
    pub alphas: Vec<f64>,
    /// Final dual objective `½αᵀQα + pᵀα`.
    pub objective: f64,
    pub iterations: usize,
    /// False when the iteration budget ran out before the KKT tolerance was met.
    pub converged: bool,
}

struct DualProblem<'a> {
    kernel: &'a Matrix,
    y: Vec<f64>,
    p: Vec<f64>,
    c: f64,
}

struct DualSolution {
    alpha: Vec<f64>,
    grad: Vec<f64>,
    rho: f64,
    iterations: usize,
    converged: bool,
}

impl DualProblem<'_> {
    fn n_points(&self) -> usize {
        self.kernel.rows()
    }

    fn q(&self, i: usize, j: usize) -> f64 {
        let n = self.n_points();
        self.y[i] * self.y[j] * self.kernel.get(i % n, j % n)
    }

    fn solve(&self, tol: f64, max_iter: usize) -> DualSolution {
        let l = self.y.len();
        let c = self.c;
        let mut alpha = vec![0.0; l];
        let mut grad = self.p.clone();
        let qd: Vec<f64> = (0..l).map(|i| self.q(i, i)).collect();
        let upper = |a: f64| a >= c;
        let lower = |a: f64| a <= 0.0;

        let mut iterations = 0;
        let mut converged = false;
        let mut qi = vec![0.0; l];
        let mut qj = vec![0.0; l];
        while iterations < max_iter {
            // i: maximal violator among indices that may move "up"
            let mut gmax = f64::NEG_INFINITY;
            let mut i_sel = None;
            for t in 0..l {
                let cand = if self.y[t] > 0.0 {
                    (!upper(alpha[t])).then_some(-grad[t])
                } else {
                    (!lower(alpha[t])).then_some(grad[t])
                };
                if let Some(v) = cand {
                    if v >= gmax {
                        gmax = v;
                        i_sel = Some(t);
                    }
                }
            }
            let Some(i) = i_sel else {
                converged = true;
                break;
            };
            for (k, q) in qi.iter_mut().enumerate() {
                *q = self.q(i, k);
            }

            // j: second-order choice among indices that may move "down"
            let mut gmax2 = f64::NEG_INFINITY;
            let mut best = f64::INFINITY;
            let mut j_sel = None;
            for t in 0..l {
                let (grad_diff, quad) = if self.y[t] > 0.0 {
                    if lower(alpha[t]) {
                        continue;
                    }
                    gmax2 = gmax2.max(grad[t]);
                    (gmax + grad[t], qd[i] + qd[t] - 2.0 * self.y[i] * qi[t])
                } else {
                    if upper(alpha[t]) {
                        continue;
                    }
                    gmax2 = gmax2.max(-grad[t]);
                    (gmax - grad[t], qd[i] + qd[t] + 2.0 * self.y[i] * qi[t])
                };
                if grad_diff > 0.0 {
                    let obj = -(grad_diff * grad_diff) / if quad > 0.0 { quad } else { TAU };
                    if obj <= best {
                        best = obj;
                        j_sel = Some(t);
                    }
                }
            }
            if gmax + gmax2 < tol {
                converged = true;
                break;
            }
            let Some(j) = j_sel else {
                converged = true;
                break;
            };
            for (k, q) in qj.iter_mut().enumerate() {
                *q = self.q(j, k);
            }

            let (old_i, old_j) = (alpha[i], alpha[j]);
            if self.y[i] != self.y[j] {
                let quad = (qd[i] + qd[j] + 2.0 * qi[j]).max(TAU);
                let delta = (-grad[i] - grad[j]) / quad;
                let diff = alpha[i] - alpha[j];
                alpha[i] += delta;
                alpha[j] += delta;
                if diff > 0.0 {
                    if alpha[j] < 0.0 {
                        alpha[j] = 0.0;
                        alpha[i] = diff;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = -diff;
                }
                if diff > 0.0 {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = c - diff;
                    }
                } else if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = c + diff;
                }
            } else {
                let quad = (qd[i] + qd[j] - 2.0 * qi[j]).max(TAU);
                let delta = (grad[i] - grad[j]) / quad;
                let sum = alpha[i] + alpha[j];
                alpha[i] -= delta;
                alpha[j] += delta;
                if sum > c {
                    if alpha[i] > c {
                        alpha[i] = c;
                        alpha[j] = sum - c;
                    }
                } else if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
                if sum > c {
                    if alpha[j] > c {
                        alpha[j] = c;
                        alpha[i] = sum - c;
                    }
                } else if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }

            let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
            for k in 0..l {
                grad[k] += qi[k] * di + qj[k] * dj;
            }
            iterations += 1;
        }

        // offset: average over free variables, else midpoint of the feasible interval
        let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut free, mut sum_free) = (0usize, 0.0);
        for t in 0..l {
            let yg = self.y[t] * grad[t];
            if upper(alpha[t]) {
                if self.y[t] < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if lower(alpha[t]) {
                if self.y[t] > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                free += 1;
                sum_free += yg;
            }
        }
        let rho = if free > 0 {
            sum_free / free as f64
        } else {
            (ub + lb) / 2.0
        };

        DualSolution {
            alpha,
            grad,
            rho,
            iterations,
            converged,
        }
    }

    fn objective(&self, alpha: &[f64], grad: &[f64]) -> f64 {
        // ½αᵀQα + pᵀα = ½ Σ αᵢ (Gᵢ + pᵢ)
        0.5 * alpha
            .iter()
            .zip(grad.iter().zip(&self.p))
            .map(|(a, (g, p))| a * (g + p))
            .sum::<f64>()
    }
}

fn check_rows<R: AsRef<[f64]>>(x: &[R], targets: usize) -> Result<usize> {
    if x.len() != targets {
        return Err(Error::Dimension(format!(
            "{} feature rows but {targets} targets",
            x.len()
        )));
    }
    let d = x.first().map_or(0, |r| r.as_ref().len());
    if d == 0 {
        return Err(Error::InvalidArgument("svm needs at least one feature".into()));
    }
    if x.iter().any(|r| r.as_ref().len() != d) {
        return Err(Error::Dimension("feature rows of differing length".into()));
    }
    if x.iter().flat_map(|r| r.as_ref()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("svm features".into()));
    }
    Ok(d)
}

fn budget(cfg: &SvmTrainConfig, n: usize, l: usize) -> usize {
    cfg.max_passes.unwrap_or(10 * n).saturating_mul(l).max(1)
}

/// Soft-margin classifier for labels `±1`.
pub fn svc_train<R: AsRef<[f64]>>(
    x: &[R],
    y: &[f64],
    kernel: Kernel,
    cfg: &SvmTrainConfig,
) -> Result<(SvmModel, SolverReport)> {
    cfg.validate()?;
    kernel.validate()?;
    let d = check_rows(x, y.len())?;
    if y.iter().any(|v| *v != 1.0 && *v != -1.0) {
        return Err(Error::InvalidArgument("labels must be +1 or -1".into()));
    }
    if !(y.contains(&1.0) && y.contains(&-1.0)) {
        return Err(Error::InvalidArgument("both classes must be present".into()));
    }
    let n = y.len();
    let k = gram(&|a, b| kernel.eval(a, b), x);
    let prob = DualProblem {
        kernel: &k,
        y: y.to_vec(),
        p: vec![-1.0; n],
        c: cfg.c,
    };
    let sol = prob.solve(cfg.tolerance, budget(cfg, n, n));
    let objective = prob.objective(&sol.alpha, &sol.grad);

    let mut support_vectors = Vec::new();
    let mut coef = Vec::new();
    for i in 0..n {
        if sol.alpha[i] > SV_THRESHOLD {
            support_vectors.push(x[i].as_ref().to_vec());
            coef.push(y[i] * sol.alpha[i]);
        }
    }
    Ok((
        SvmModel {
            input_dim: d,
            support_vectors,
            coef,
            b: -sol.rho,
            kernel,
            mode: SvmMode::Classify,
        },
        SolverReport {
            alphas: sol.alpha,
            objective,
            iterations: sol.iterations,
            converged: sol.converged,
        },
    ))
}

/// Epsilon-insensitive support vector regression.
pub fn svr_train<R: AsRef<[f64]>>(
    x: &[R],
    t: &[f64],
    kernel: Kernel,
    cfg: &SvmTrainConfig,
) -> Result<(SvmModel, SolverReport)> {
    cfg.validate()?;
    kernel.validate()?;
    let d = check_rows(x, t.len())?;
    let n = t.len();
    if n < 2 {
        return Err(Error::InvalidArgument("svr needs at least 2 samples".into()));
    }
    if t.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("svr targets".into()));
    }
    let k = gram(&|a, b| kernel.eval(a, b), x);
    let eps = cfg.epsilon_tube;
    let prob = DualProblem {
        kernel: &k,
        y: (0..2 * n).map(|i| if i < n { 1.0 } else { -1.0 }).collect(),
        p: (0..2 * n)
            .map(|i| if i < n { eps - t[i] } else { eps + t[i - n] })
            .collect(),
        c: cfg.c,
    };
    let sol = prob.solve(cfg.tolerance, budget(cfg, n, 2 * n));
    let objective = prob.objective(&sol.alpha, &sol.grad);
    let beta: Vec<f64> = (0..n).map(|i| sol.alpha[i] - sol.alpha[i + n]).collect();

    let mut support_vectors = Vec::new();
    let mut coef = Vec::new();
    for i in 0..n {
        if beta[i].abs() > SV_THRESHOLD {
            support_vectors.push(x[i].as_ref().to_vec());
            coef.push(beta[i]);
        }
    }
    Ok((
        SvmModel {
            input_dim: d,
            support_vectors,
            coef,
            b: -sol.rho,
            kernel,
            mode: SvmMode::Regress,
        },
        SolverReport {
            alphas: beta,
            objective,
            iterations: sol.iterations,
            converged: sol.converged,
        },
    ))
}
