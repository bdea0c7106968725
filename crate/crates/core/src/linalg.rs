//! Small dense linear-algebra kernel shared by the trainers.
//!
//! [`Matrix`] is a plain row-major buffer. Decompositions (SVD, Cholesky,
//! symmetric eigensolver) are delegated to `nalgebra`; the recursive
//! least-squares recursion in [`RlsState`] is written out directly because
//! its exact update order matters to callers that compare runs bitwise.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Dense row-major matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "matrix entry ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|r| dot(self.row(r), v)).collect())
    }

    /// `self * selfᵀ`, exploiting symmetry of the result.
    pub fn gram_rows(&self) -> Matrix {
        let n = self.rows;
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = dot(self.row(i), self.row(j));
                g.data[i * n + j] = v;
                g.data[j * n + i] = v;
            }
        }
        g
    }

    /// Largest `|m_ij - m_ji|`; `None` for non-square matrices.
    pub fn max_asymmetry(&self) -> Option<f64> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i]).abs());
            }
        }
        Some(worst)
    }

    fn to_na(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Least-squares estimate of `AX = B`.
#[derive(Debug, Clone, PartialEq)]
pub struct LsqSolution {
    pub x: Vec<f64>,
    pub residual_norm_sq: f64,
    /// Numerical rank of `A` used by the pseudo-inverse.
    pub rank: usize,
}

/// Minimum-norm least-squares solution of `AX = B` via the SVD pseudo-inverse.
///
/// Singular values below `max(P, M) · eps · σ_max` are treated as zero, so a
/// rank-deficient `AᵀA` yields the minimum-norm minimizer instead of an error.
pub fn lsq_solve(a: &Matrix, b: &[f64]) -> Result<LsqSolution> {
    lsq_solve_rcond(a, b, a.rows.max(a.cols) as f64 * f64::EPSILON)
}

/// [`lsq_solve`] with singular values below `rcond · σ_max` treated as zero.
pub fn lsq_solve_rcond(a: &Matrix, b: &[f64], rcond: f64) -> Result<LsqSolution> {
    if !(0.0..1.0).contains(&rcond) {
        return Err(Error::InvalidArgument(format!("rcond {rcond} outside [0, 1)")));
    }
    if a.rows == 0 || a.cols == 0 {
        return Err(Error::Dimension("empty design matrix".into()));
    }
    if b.len() != a.rows {
        return Err(Error::Dimension(format!(
            "design matrix has {} rows but target has {} entries",
            a.rows,
            b.len()
        )));
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("least-squares target".into()));
    }

    let svd = a.to_na().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let cutoff = rcond * sigma_max;
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    let x = if sigma_max == 0.0 {
        DVector::zeros(a.cols)
    } else {
        svd.solve(&DVector::from_column_slice(b), cutoff)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
    };
    let x: Vec<f64> = x.iter().copied().collect();
    let residual_norm_sq = a.matvec(&x)?.iter().zip(b).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok(LsqSolution {
        x,
        residual_norm_sq,
        rank,
    })
}

/// Solves the symmetric positive definite system `A x = b` by Cholesky.
/// Returns `None` when `A` is not numerically positive definite.
pub fn cholesky_solve(a: &Matrix, b: &[f64]) -> Result<Option<Vec<f64>>> {
    if a.rows != a.cols || b.len() != a.rows {
        return Err(Error::Dimension(format!(
            "cholesky solve of {}x{} with rhs {}",
            a.rows,
            a.cols,
            b.len()
        )));
    }
    Ok(a.to_na()
        .cholesky()
        .map(|ch| ch.solve(&DVector::from_column_slice(b)).iter().copied().collect()))
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(g: &Matrix) -> Result<Vec<f64>> {
    if g.rows != g.cols {
        return Err(Error::Dimension(format!(
            "eigenvalues of non-square {}x{} matrix",
            g.rows, g.cols
        )));
    }
    let mut ev: Vec<f64> = g.to_na().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// True iff the smallest eigenvalue of the symmetric matrix `g` is `≥ -tol`.
pub fn psd_check(g: &Matrix, tol: f64) -> Result<bool> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be >= 0")));
    }
    let asym = g
        .max_asymmetry()
        .ok_or_else(|| Error::Dimension(format!("psd check of non-square {}x{}", g.rows, g.cols)))?;
    let scale = g.data.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if asym > tol + 1e-12 * scale {
        return Err(Error::NotSymmetric(asym));
    }
    if g.rows == 0 {
        return Ok(true);
    }
    Ok(symmetric_eigenvalues(g)?[0] >= -tol)
}

/// State of the sequential least-squares recursion: estimate `x`, covariance
/// `s` and the number of rows consumed.
#[derive(Debug, Clone, PartialEq)]
pub struct RlsState {
    pub x: Vec<f64>,
    pub s: Matrix,
    pub samples_seen: usize,
}

/// Default initial covariance scale.
pub const DEFAULT_RLS_GAMMA: f64 = 1e8;

/// `X₀ = 0`, `S₀ = γI`.
pub fn rls_init(m: usize, gamma: f64) -> Result<RlsState> {
    if m == 0 {
        return Err(Error::InvalidArgument("rls dimension must be >= 1".into()));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "rls gamma must be positive and finite, got {gamma}"
        )));
    }
    let mut s = Matrix::identity(m);
    s.data.iter_mut().for_each(|v| *v *= gamma);
    Ok(RlsState {
        x: vec![0.0; m],
        s,
        samples_seen: 0,
    })
}

impl RlsState {
    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Consumes one row `(a, b)` with forgetting factor `lambda`.
    ///
    /// `S ← [S − S a aᵀ S / (λ + aᵀ S a)] / λ`, then `X ← X + S a (b − aᵀX)`
    /// using the updated `S`. `S` is re-symmetrized after every step.
    pub fn update(&mut self, a: &[f64], b: f64, lambda: f64) -> Result<()> {
        let m = self.dim();
        if a.len() != m {
            return Err(Error::Dimension(format!(
                "rls row has {} entries, state has {m}",
                a.len()
            )));
        }
        if a.iter().any(|v| !v.is_finite()) || !b.is_finite() {
            return Err(Error::NonFinite("rls input row".into()));
        }
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "forgetting factor {lambda} outside (0, 1]"
            )));
        }

        let sa = self.s.matvec(a)?;
        let denom = lambda + dot(a, &sa);
        let s = &mut self.s.data;
        for i in 0..m {
            for j in 0..m {
                s[i * m + j] = (s[i * m + j] - sa[i] * sa[j] / denom) / lambda;
            }
        }
        for i in 0..m {
            for j in 0..i {
                let avg = 0.5 * (s[i * m + j] + s[j * m + i]);
                s[i * m + j] = avg;
                s[j * m + i] = avg;
            }
        }

        let err = b - dot(a, &self.x);
        let gain = self.s.matvec(a)?;
        for (x, g) in self.x.iter_mut().zip(&gain) {
            *x += g * err;
        }
        if self.x.iter().any(|v| !v.is_finite()) || self.s.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "rls state after {} samples",
                self.samples_seen + 1
            )));
        }
        self.samples_seen += 1;
        Ok(())
    }
}

/// Functional form of [`RlsState::update`].
pub fn rls_update(state: &RlsState, a: &[f64], b: f64, lambda: f64) -> Result<RlsState> {
    let mut next = state.clone();
    next.update(a, b, lambda)?;
    Ok(next)
}
