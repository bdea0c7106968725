//! First-order Takagi-Sugeno fuzzy inference with hybrid learning.
//!
//! Each input carries an ordered list of membership functions; the rule base
//! is the full grid of their combinations. A rule's firing strength is the
//! product of its antecedent memberships, and the output is the
//! strength-weighted mean of the rule consequents `pᵢ·x + rᵢ`.
//!
//! The output is linear in the consequents, so for fixed premises they are
//! identified by least squares (batch pseudo-inverse or the sequential
//! recursion). Premise parameters are then moved along the exact gradient of
//! the squared error.

use serde::{Deserialize, Serialize};

use crate::dataio::SupervisedDataset;
use crate::error::{Error, Result};
use crate::linalg::{lsq_solve_rcond, rls_init, Matrix, RlsState};

/// Strength assigned to every rule when none fires at an input.
pub const STRENGTH_FLOOR: f64 = 1e-12;
/// Relative singular-value cutoff of the batch consequent fit. Adjacent
/// memberships that nearly sum to one make the design matrix nearly rank
/// deficient; directions below this level carry no usable signal and would
/// otherwise produce huge, cancelling consequents.
pub const LSE_RCOND: f64 = 1e-8;
const SIGMA_MIN: f64 = 1e-6;
const TRI_MIN_WIDTH: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MembershipFn {
    Gaussian {
        c: f64,
        sigma: f64,
    },
    /// Left foot `a`, peak `b`, right foot `c`.
    Triangular {
        a: f64,
        b: f64,
        c: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MfKind {
    Gaussian,
    Triangular,
}

impl MembershipFn {
    pub fn param_count(&self) -> usize {
        match self {
            MembershipFn::Gaussian { .. } => 2,
            MembershipFn::Triangular { .. } => 3,
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            MembershipFn::Gaussian { c, sigma } => vec![c, sigma],
            MembershipFn::Triangular { a, b, c } => vec![a, b, c],
        }
    }

    fn with_params(&self, p: &[f64]) -> MembershipFn {
        match self {
            MembershipFn::Gaussian { .. } => MembershipFn::Gaussian { c: p[0], sigma: p[1] },
            MembershipFn::Triangular { .. } => MembershipFn::Triangular {
                a: p[0],
                b: p[1],
                c: p[2],
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            MembershipFn::Gaussian { c, sigma } => c.is_finite() && sigma.is_finite() && sigma > 0.0,
            MembershipFn::Triangular { a, b, c } => a.is_finite() && c.is_finite() && a <= b && b <= c && a < c,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid membership function {self:?}")))
        }
    }

    /// Clamps `sigma` positive or restores `a ≤ b ≤ c` with `a < c`.
    fn project(&self) -> MembershipFn {
        match *self {
            MembershipFn::Gaussian { c, sigma } => MembershipFn::Gaussian {
                c,
                sigma: sigma.max(SIGMA_MIN),
            },
            MembershipFn::Triangular { a, b, c } => {
                let mut v = [a, b, c];
                v.sort_by(f64::total_cmp);
                if v[2] - v[0] < TRI_MIN_WIDTH {
                    v[0] -= TRI_MIN_WIDTH;
                    v[2] += TRI_MIN_WIDTH;
                }
                MembershipFn::Triangular {
                    a: v[0],
                    b: v[1],
                    c: v[2],
                }
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            MembershipFn::Gaussian { c, sigma } => {
                let u = (x - c) / sigma;
                (-0.5 * u * u).exp()
            }
            MembershipFn::Triangular { a, b, c } => {
                if x <= a || x >= c {
                    if x == b {
                        1.0
                    } else {
                        0.0
                    }
                } else if x < b {
                    (x - a) / (b - a)
                } else if x == b {
                    1.0
                } else {
                    (c - x) / (c - b)
                }
            }
        }
    }

    /// Membership value and its partial derivatives in parameter order.
    /// Triangular functions use the one-sided derivative of the active piece.
    pub fn eval_with_grad(&self, x: f64, grad: &mut [f64]) -> f64 {
        match *self {
            MembershipFn::Gaussian { c, sigma } => {
                let u = (x - c) / sigma;
                let mu = (-0.5 * u * u).exp();
                grad[0] = mu * u / sigma;
                grad[1] = mu * u * u / sigma;
                mu
            }
            MembershipFn::Triangular { a, b, c } => {
                grad[..3].iter_mut().for_each(|g| *g = 0.0);
                if x <= a || x >= c {
                    return self.eval(x);
                }
                if x < b {
                    let w = b - a;
                    grad[0] = (x - b) / (w * w);
                    grad[1] = -(x - a) / (w * w);
                    (x - a) / w
                } else if x > b {
                    let w = c - b;
                    grad[1] = (c - x) / (w * w);
                    grad[2] = (x - b) / (w * w);
                    (c - x) / w
                } else {
                    1.0
                }
            }
        }
    }
}

pub fn mf_eval(mf: &MembershipFn, x: f64) -> f64 {
    mf.eval(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnfisModel {
    pub input_dim: usize,
    /// Premise parameters: membership functions per input.
    pub mf_grid: Vec<Vec<MembershipFn>>,
    /// Membership index per input for every rule.
    pub rules: Vec<Vec<usize>>,
    /// Consequents, `d + 1` per rule: `p₁..p_d` then `r`.
    pub consequents: Vec<f64>,
}

/// Evenly spaced membership functions over each input range; the rule base
/// is their full grid and consequents start at zero.
///
/// Triangles put their feet on the neighbouring peaks (the outer feet one
/// spacing beyond the range) so memberships sum to one inside the range.
/// Gaussians use `σ = spacing / 2`.
pub fn build_grid_rules(
    d: usize,
    mfs_per_input: usize,
    input_ranges: &[(f64, f64)],
    kind: MfKind,
) -> Result<AnfisModel> {
    if d == 0 || mfs_per_input == 0 {
        return Err(Error::InvalidArgument(format!(
            "anfis needs d >= 1 and at least one membership function, got d={d}, mfs={mfs_per_input}"
        )));
    }
    if input_ranges.len() != d {
        return Err(Error::Dimension(format!(
            "{} input ranges for {d} inputs",
            input_ranges.len()
        )));
    }
    let mut mf_grid = Vec::with_capacity(d);
    for (m, &(lo, hi)) in input_ranges.iter().enumerate() {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "input {m} has degenerate range [{lo}, {hi}]"
            )));
        }
        let k = mfs_per_input;
        let (spacing, peaks): (f64, Vec<f64>) = if k == 1 {
            (hi - lo, vec![0.5 * (lo + hi)])
        } else {
            let s = (hi - lo) / (k - 1) as f64;
            (s, (0..k).map(|i| lo + s * i as f64).collect())
        };
        let mfs = peaks
            .into_iter()
            .map(|p| match kind {
                MfKind::Gaussian => MembershipFn::Gaussian {
                    c: p,
                    sigma: spacing / 2.0,
                },
                MfKind::Triangular => MembershipFn::Triangular {
                    a: p - spacing,
                    b: p,
                    c: p + spacing,
                },
            })
            .collect();
        mf_grid.push(mfs);
    }
    AnfisModel::new(mf_grid)
}

/// Rule-layer outputs at one input.
#[derive(Debug, Clone, PartialEq)]
pub struct AnfisForward {
    pub output: f64,
    /// Firing strengths.
    pub w: Vec<f64>,
    /// Normalized firing strengths.
    pub w_norm: Vec<f64>,
}

/// How consequents are identified for fixed premises.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LseMode {
    Batch,
    /// Sequential recursion with `S₀ = γI` and no forgetting.
    Sequential {
        gamma: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LseOutcome {
    pub consequents: Vec<f64>,
    /// More unknowns than rows; the minimum-norm solution was used.
    pub underdetermined: bool,
}

impl AnfisModel {
    /// Full-grid model from membership functions, consequents zero.
    pub fn new(mf_grid: Vec<Vec<MembershipFn>>) -> Result<Self> {
        let d = mf_grid.len();
        if d == 0 || mf_grid.iter().any(Vec::is_empty) {
            return Err(Error::InvalidArgument("every input needs a membership function".into()));
        }
        for mf in mf_grid.iter().flatten() {
            mf.validate()?;
        }
        let mut rules: Vec<Vec<usize>> = vec![Vec::new()];
        for mfs in &mf_grid {
            rules = rules
                .into_iter()
                .flat_map(|r| {
                    (0..mfs.len()).map(move |k| {
                        let mut r = r.clone();
                        r.push(k);
                        r
                    })
                })
                .collect();
        }
        let consequents = vec![0.0; rules.len() * (d + 1)];
        Ok(Self {
            input_dim: d,
            mf_grid,
            rules,
            consequents,
        })
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    pub fn consequent_count(&self) -> usize {
        self.consequents.len()
    }

    pub fn premise_count(&self) -> usize {
        self.mf_grid.iter().flatten().map(MembershipFn::param_count).sum()
    }

    /// Premise parameters flattened input by input, function by function.
    pub fn premise_params(&self) -> Vec<f64> {
        self.mf_grid.iter().flatten().flat_map(MembershipFn::params).collect()
    }

    /// Replaces the premise parameters, projecting each function back into
    /// its valid region.
    pub fn set_premise_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.premise_count() {
            return Err(Error::Dimension(format!(
                "{} premise parameters, expected {}",
                params.len(),
                self.premise_count()
            )));
        }
        if params.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("premise parameters".into()));
        }
        let mut off = 0;
        for mf in self.mf_grid.iter_mut().flatten() {
            let n = mf.param_count();
            *mf = mf.with_params(&params[off..off + n]).project();
            off += n;
        }
        Ok(())
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::Dimension(format!(
                "anfis expects {} inputs, got {}",
                self.input_dim,
                x.len()
            )));
        }
        Ok(())
    }

    fn memberships(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.mf_grid
            .iter()
            .zip(x)
            .map(|(mfs, &xi)| mfs.iter().map(|mf| mf.eval(xi)).collect())
            .collect()
    }

    /// Raw strengths (product T-norm) and normalized strengths. Returns
    /// whether the floor was applied.
    fn strengths(&self, mu: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>, bool) {
        let mut w: Vec<f64> = self
            .rules
            .iter()
            .map(|r| r.iter().enumerate().map(|(m, &k)| mu[m][k]).product())
            .collect();
        let mut total: f64 = w.iter().sum();
        let floored = !(total > 0.0);
        if floored {
            w.iter_mut().for_each(|v| *v = v.max(STRENGTH_FLOOR));
            total = w.iter().sum();
        }
        let w_norm = w.iter().map(|v| v / total).collect();
        (w, w_norm, floored)
    }

    fn rule_output(&self, i: usize, x: &[f64]) -> f64 {
        let d = self.input_dim;
        let c = &self.consequents[i * (d + 1)..(i + 1) * (d + 1)];
        c[d] + c[..d].iter().zip(x).map(|(p, v)| p * v).sum::<f64>()
    }

    pub fn forward(&self, x: &[f64]) -> Result<AnfisForward> {
        self.check_input(x)?;
        let mu = self.memberships(x);
        let (w, w_norm, _) = self.strengths(&mu);
        let output = w_norm
            .iter()
            .enumerate()
            .map(|(i, wn)| wn * self.rule_output(i, x))
            .sum();
        Ok(AnfisForward { output, w, w_norm })
    }

    pub fn predict_one(&self, x: &[f64]) -> Result<f64> {
        Ok(self.forward(x)?.output)
    }

    pub fn predict(&self, data: &SupervisedDataset) -> Result<Vec<f64>> {
        (0..data.len()).map(|j| self.predict_one(data.row(j))).collect()
    }

    /// `E = Σ (output_j − t_j)²`.
    pub fn squared_error(&self, data: &SupervisedDataset) -> Result<f64> {
        Ok(self
            .predict(data)?
            .iter()
            .zip(&data.t)
            .map(|(o, t)| (o - t) * (o - t))
            .sum())
    }

    /// Row of the consequent design matrix: `w̄ᵢ·(x, 1)` for each rule.
    pub fn design_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        let fw = self.forward(x)?;
        let d = self.input_dim;
        let mut row = Vec::with_capacity(self.consequent_count());
        for wn in &fw.w_norm {
            row.extend(x.iter().map(|v| wn * v));
            row.push(*wn);
        }
        debug_assert_eq!(row.len(), self.rule_count() * (d + 1));
        Ok(row)
    }

    fn check_data(&self, data: &SupervisedDataset) -> Result<()> {
        if data.is_empty() {
            return Err(Error::InvalidArgument("empty dataset".into()));
        }
        if data.dim() != self.input_dim {
            return Err(Error::Dimension(format!(
                "dataset has {} features, anfis expects {}",
                data.dim(),
                self.input_dim
            )));
        }
        Ok(())
    }
}

pub fn anfis_forward(model: &AnfisModel, x: &[f64]) -> Result<AnfisForward> {
    model.forward(x)
}

/// Least-squares consequents for the current premises.
pub fn anfis_consequent_lse(model: &AnfisModel, data: &SupervisedDataset, mode: LseMode) -> Result<LseOutcome> {
    model.check_data(data)?;
    let m = model.consequent_count();
    let underdetermined = m > data.len();
    let consequents = match mode {
        LseMode::Batch => {
            let mut rows = Vec::with_capacity(data.len() * m);
            for j in 0..data.len() {
                rows.extend(model.design_row(data.row(j))?);
            }
            let a = Matrix::new(data.len(), m, rows)?;
            lsq_solve_rcond(&a, &data.t, LSE_RCOND)?.x
        }
        LseMode::Sequential { gamma } => {
            let mut st = rls_init(m, gamma)?;
            for j in 0..data.len() {
                st.update(&model.design_row(data.row(j))?, data.t[j], 1.0)?;
            }
            st.x
        }
    };
    Ok(LseOutcome {
        consequents,
        underdetermined,
    })
}

/// `∂E/∂θ` for every premise parameter, in [`AnfisModel::premise_params`] order.
pub fn anfis_premise_gradient(model: &AnfisModel, data: &SupervisedDataset) -> Result<Vec<f64>> {
    model.check_data(data)?;
    let d = model.input_dim;
    // offset of each membership function's parameters in the flat vector
    let mut offsets: Vec<Vec<usize>> = Vec::with_capacity(d);
    let mut off = 0;
    for mfs in &model.mf_grid {
        offsets.push(
            mfs.iter()
                .map(|mf| {
                    let o = off;
                    off += mf.param_count();
                    o
                })
                .collect(),
        );
    }
    let mut grad = vec![0.0; off];
    let mut mf_grad = [0.0; 3];
    let mut mu_grads: Vec<Vec<[f64; 3]>> = model.mf_grid.iter().map(|m| vec![[0.0; 3]; m.len()]).collect();

    for j in 0..data.len() {
        let x = data.row(j);
        let mut mu: Vec<Vec<f64>> = Vec::with_capacity(d);
        for (m, mfs) in model.mf_grid.iter().enumerate() {
            mu.push(
                mfs.iter()
                    .enumerate()
                    .map(|(k, mf)| {
                        let v = mf.eval_with_grad(x[m], &mut mf_grad);
                        mu_grads[m][k] = mf_grad;
                        v
                    })
                    .collect(),
            );
        }
        let (w, w_norm, floored) = model.strengths(&mu);
        if floored {
            continue;
        }
        let total: f64 = w.iter().sum();
        let f: Vec<f64> = (0..model.rule_count()).map(|i| model.rule_output(i, x)).collect();
        // same expression as `forward`, so a zero residual is exactly zero
        let out: f64 = w_norm.iter().zip(&f).map(|(wn, fi)| wn * fi).sum();
        let de_do = 2.0 * (out - data.t[j]);

        // ∂o/∂μ_{m,k} = Σ_{rules using (m,k)} (f_i − o)/S · Π_{m'≠m} μ
        let mut do_dmu: Vec<Vec<f64>> = mu.iter().map(|v| vec![0.0; v.len()]).collect();
        for (i, rule) in model.rules.iter().enumerate() {
            let coef = (f[i] - out) / total;
            if coef == 0.0 {
                continue;
            }
            for m in 0..d {
                let others: f64 = rule
                    .iter()
                    .enumerate()
                    .filter(|(m2, _)| *m2 != m)
                    .map(|(m2, &k2)| mu[m2][k2])
                    .product();
                do_dmu[m][rule[m]] += coef * others;
            }
        }
        for m in 0..d {
            for (k, mf) in model.mf_grid[m].iter().enumerate() {
                let scale = de_do * do_dmu[m][k];
                if scale == 0.0 {
                    continue;
                }
                for p in 0..mf.param_count() {
                    grad[offsets[m][k] + p] += scale * mu_grads[m][k][p];
                }
            }
        }
    }
    Ok(grad)
}

/// One hybrid epoch: batch consequent LSE, then a gradient step of size
/// `eta` on the premises. Returns the updated model and the post-LSE error.
pub fn anfis_hybrid_epoch(model: &AnfisModel, data: &SupervisedDataset, eta: f64) -> Result<(AnfisModel, f64)> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::InvalidArgument(format!("learning rate {eta} must be >= 0")));
    }
    let mut next = model.clone();
    next.consequents = anfis_consequent_lse(model, data, LseMode::Batch)?.consequents;
    let err = next.squared_error(data)?;
    if !err.is_finite() {
        return Err(Error::NonFinite("anfis epoch error".into()));
    }
    if eta > 0.0 {
        let g = anfis_premise_gradient(&next, data)?;
        let params: Vec<f64> = next
            .premise_params()
            .iter()
            .zip(&g)
            .map(|(p, gi)| p - eta * gi)
            .collect();
        next.set_premise_params(&params)?;
    }
    Ok((next, err))
}

/// Runs `epochs` hybrid epochs followed by a final consequent fit so the
/// returned consequents match the returned premises.
pub fn anfis_train(
    model: &AnfisModel,
    data: &SupervisedDataset,
    epochs: usize,
    eta: f64,
) -> Result<(AnfisModel, Vec<f64>)> {
    let mut current = model.clone();
    let mut errors = Vec::with_capacity(epochs + 1);
    for _ in 0..epochs {
        let (next, err) = anfis_hybrid_epoch(&current, data, eta)?;
        errors.push(err);
        current = next;
    }
    current.consequents = anfis_consequent_lse(&current, data, LseMode::Batch)?.consequents;
    errors.push(current.squared_error(data)?);
    Ok((current, errors))
}

/// Consequent-only online learner with exponential forgetting.
#[derive(Debug, Clone, PartialEq)]
pub struct AnfisOnlineState {
    pub model: AnfisModel,
    pub rls: RlsState,
    pub lambda: f64,
}

impl AnfisOnlineState {
    /// Starts the recursion from `X₀ = 0`, `S₀ = γI`; premises stay fixed.
    pub fn new(model: AnfisModel, lambda: f64, gamma: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "forgetting factor {lambda} outside (0, 1]"
            )));
        }
        let rls = rls_init(model.consequent_count(), gamma)?;
        let mut model = model;
        model.consequents.clone_from(&rls.x);
        Ok(Self { model, rls, lambda })
    }

    pub fn update(&mut self, x: &[f64], t: f64) -> Result<()> {
        let row = self.model.design_row(x)?;
        self.rls.update(&row, t, self.lambda)?;
        self.model.consequents.clone_from(&self.rls.x);
        Ok(())
    }
}

pub fn anfis_online_update(state: &mut AnfisOnlineState, x: &[f64], t: f64) -> Result<()> {
    state.update(x, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[Vec<f64>], t: Vec<f64>) -> SupervisedDataset {
        SupervisedDataset::from_rows(rows, t).unwrap()
    }

    #[test]
    fn grid_rule_counts() {
        let r3 = [(0.0, 1.0); 3];
        assert_eq!(
            build_grid_rules(3, 3, &r3, MfKind::Triangular).unwrap().rule_count(),
            27
        );
        let r4 = [(0.0, 1.0); 4];
        let m4 = build_grid_rules(4, 3, &r4, MfKind::Gaussian).unwrap();
        assert_eq!(m4.rule_count(), 81);
        assert_eq!(m4.consequent_count(), 81 * 5);
        assert_eq!(
            build_grid_rules(1, 1, &[(0.0, 1.0)], MfKind::Triangular)
                .unwrap()
                .rule_count(),
            1
        );
        assert!(build_grid_rules(1, 2, &[(1.0, 1.0)], MfKind::Triangular).is_err());
    }

    #[test]
    fn membership_examples() {
        let g = MembershipFn::Gaussian { c: 0.0, sigma: 1.0 };
        assert_eq!(mf_eval(&g, 0.0), 1.0);
        assert!((mf_eval(&g, 1.0) - (-0.5f64).exp()).abs() < 1e-15);
        assert!((mf_eval(&g, 1.0) - 0.60653).abs() < 1e-5);
        let t = MembershipFn::Triangular { a: 0.0, b: 1.0, c: 2.0 };
        assert_eq!(mf_eval(&t, 1.0), 1.0);
        assert_eq!(mf_eval(&t, 3.0), 0.0);
        assert_eq!(mf_eval(&t, 0.5), 0.5);
    }

    #[test]
    fn triangles_partition_unity_inside_range() {
        let m = build_grid_rules(1, 4, &[(-1.0, 2.0)], MfKind::Triangular).unwrap();
        for i in 0..=30 {
            let x = -1.0 + 0.1 * i as f64;
            let s: f64 = m.mf_grid[0].iter().map(|mf| mf.eval(x)).sum();
            assert!((s - 1.0).abs() < 1e-12, "x={x} sum={s}");
        }
    }

    #[test]
    fn single_rule_is_linear() {
        let mut m = build_grid_rules(2, 1, &[(0.0, 1.0), (0.0, 1.0)], MfKind::Gaussian).unwrap();
        m.consequents = vec![2.0, -1.0, 0.5];
        let f = m.forward(&[0.3, 0.9]).unwrap();
        assert_eq!(f.w_norm, vec![1.0]);
        assert!((f.output - (0.6 - 0.9 + 0.5)).abs() < 1e-15);
    }

    #[test]
    fn symmetric_gaussians_midpoint() {
        let mut m = AnfisModel::new(vec![vec![
            MembershipFn::Gaussian { c: 0.0, sigma: 1.0 },
            MembershipFn::Gaussian { c: 2.0, sigma: 1.0 },
        ]])
        .unwrap();
        m.consequents = vec![0.0, 0.0, 0.0, 2.0];
        assert!((m.forward(&[1.0]).unwrap().output - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_strength_input_falls_back_to_uniform() {
        let mut m = build_grid_rules(1, 2, &[(0.0, 1.0)], MfKind::Triangular).unwrap();
        m.consequents = vec![0.0, 1.0, 0.0, 3.0];
        let f = m.forward(&[10.0]).unwrap();
        assert_eq!(f.w_norm, vec![0.5, 0.5]);
        assert!((f.output - 2.0).abs() < 1e-12);
    }

    #[test]
    fn single_rule_lse_recovers_line() {
        let m = build_grid_rules(1, 1, &[(0.0, 1.0)], MfKind::Gaussian).unwrap();
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 / 19.0]).collect();
        let t = rows.iter().map(|r| 2.0 * r[0] + 1.0).collect();
        let out = anfis_consequent_lse(&m, &ds(&rows, t), LseMode::Batch).unwrap();
        assert!((out.consequents[0] - 2.0).abs() < 1e-8);
        assert!((out.consequents[1] - 1.0).abs() < 1e-8);
        assert!(!out.underdetermined);
    }

    #[test]
    fn underdetermined_lse_is_flagged() {
        let m = build_grid_rules(2, 3, &[(0.0, 1.0), (0.0, 1.0)], MfKind::Triangular).unwrap();
        let out = anfis_consequent_lse(
            &m,
            &ds(&[vec![0.2, 0.4], vec![0.7, 0.1]], vec![1.0, 2.0]),
            LseMode::Batch,
        )
        .unwrap();
        assert!(out.underdetermined);
    }

    #[test]
    fn zero_eta_keeps_premises() {
        let m = build_grid_rules(2, 2, &[(0.0, 1.0), (0.0, 1.0)], MfKind::Gaussian).unwrap();
        let rows: Vec<Vec<f64>> = (0..25)
            .map(|i| vec![(i % 5) as f64 / 4.0, (i / 5) as f64 / 4.0])
            .collect();
        let t = rows.iter().map(|r| (r[0] * 3.0).sin() + r[1] * r[1]).collect();
        let data = ds(&rows, t);
        let pre_lse = m.squared_error(&data).unwrap();
        let (next, err) = anfis_hybrid_epoch(&m, &data, 0.0).unwrap();
        assert_eq!(next.mf_grid, m.mf_grid);
        assert_eq!(err, next.squared_error(&data).unwrap());
        assert!(err <= pre_lse);
    }

    #[test]
    fn projection_restores_ordering() {
        let mut m = build_grid_rules(1, 1, &[(0.0, 1.0)], MfKind::Triangular).unwrap();
        m.set_premise_params(&[2.0, 0.0, 1.0]).unwrap();
        assert_eq!(m.mf_grid[0][0], MembershipFn::Triangular { a: 0.0, b: 1.0, c: 2.0 });
        let mut g = build_grid_rules(1, 1, &[(0.0, 1.0)], MfKind::Gaussian).unwrap();
        g.set_premise_params(&[0.5, -3.0]).unwrap();
        assert!(matches!(g.mf_grid[0][0], MembershipFn::Gaussian { sigma, .. } if sigma > 0.0));
    }

    #[test]
    fn online_rejects_bad_lambda() {
        let m = build_grid_rules(1, 2, &[(0.0, 1.0)], MfKind::Triangular).unwrap();
        assert!(AnfisOnlineState::new(m.clone(), 0.0, 1e8).is_err());
        assert!(AnfisOnlineState::new(m, 1.1, 1e8).is_err());
    }
}
