//! Difference-boosting naive Bayes over discretized attributes.
//!
//! Attributes are cut into equal-width bins fitted on the training range.
//! Training starts from a Laplace-smoothed naive Bayes table and then
//! repeatedly raises the weights of the cells that support the true class of
//! each misclassified example, in proportion to how far it trails its
//! nearest rival. One classifier is refined throughout.

use serde::{Deserialize, Serialize};

use crate::dataio::SupervisedDataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeBins {
    k: usize,
    /// Interior cut points per attribute; empty for a constant attribute.
    cuts: Vec<Vec<f64>>,
    ranges: Vec<(f64, f64)>,
}

impl AttributeBins {
    /// Equal-width bins from explicit ranges.
    pub fn from_ranges(ranges: &[(f64, f64)], k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 bins, got {k}")));
        }
        if ranges.is_empty() {
            return Err(Error::InvalidArgument("no attributes".into()));
        }
        let mut cuts = Vec::with_capacity(ranges.len());
        for (m, &(lo, hi)) in ranges.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() || hi < lo {
                return Err(Error::InvalidArgument(format!("attribute {m} range [{lo}, {hi}]")));
            }
            if hi == lo {
                cuts.push(Vec::new());
            } else {
                cuts.push((1..k).map(|i| lo + (hi - lo) * i as f64 / k as f64).collect());
            }
        }
        Ok(Self {
            k,
            cuts,
            ranges: ranges.to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.cuts.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cuts(&self, m: usize) -> &[f64] {
        &self.cuts[m]
    }

    pub fn range(&self, m: usize) -> (f64, f64) {
        self.ranges[m]
    }

    /// Constant training attribute: one bin, carries no evidence.
    pub fn is_degenerate(&self, m: usize) -> bool {
        self.cuts[m].is_empty()
    }

    pub fn degenerate_attributes(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&m| self.is_degenerate(m)).collect()
    }

    /// Number of bins used by attribute `m`.
    pub fn bin_count(&self, m: usize) -> usize {
        if self.is_degenerate(m) {
            1
        } else {
            self.k
        }
    }

    /// Bin of `x` for attribute `m`; out-of-range values clamp to the edges.
    pub fn bin(&self, m: usize, x: f64) -> usize {
        self.cuts[m].partition_point(|&c| c <= x)
    }

    pub fn bin_row(&self, x: &[f64]) -> Result<Vec<usize>> {
        if x.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "{} attributes, bins fitted on {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(x.iter().enumerate().map(|(m, &v)| self.bin(m, v)).collect())
    }

    /// Midpoint of bin `b` of attribute `m`.
    pub fn center(&self, m: usize, b: usize) -> f64 {
        let (lo, hi) = self.ranges[m];
        if self.is_degenerate(m) {
            return lo;
        }
        lo + (hi - lo) * (b as f64 + 0.5) / self.k as f64
    }

    pub fn width(&self, m: usize) -> f64 {
        let (lo, hi) = self.ranges[m];
        (hi - lo) / self.k as f64
    }
}

/// Equal-width bins over the per-attribute range of the rows of `x`.
pub fn dbnn_fit_bins(x: &Matrix, k: usize) -> Result<AttributeBins> {
    if x.rows() == 0 || x.cols() == 0 {
        return Err(Error::InvalidArgument("cannot fit bins on empty data".into()));
    }
    let ranges: Vec<(f64, f64)> = (0..x.cols())
        .map(|m| {
            (0..x.rows()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                let v = x.get(r, m);
                (lo.min(v), hi.max(v))
            })
        })
        .collect();
    AttributeBins::from_ranges(&ranges, k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbnnTrainConfig {
    pub rounds: usize,
    pub learn_rate: f64,
}

impl Default for DbnnTrainConfig {
    fn default() -> Self {
        Self {
            rounds: 50,
            learn_rate: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbnnModel {
    pub bins: AttributeBins,
    /// Sorted class labels.
    pub classes: Vec<usize>,
    pub priors: Vec<f64>,
    /// `P(U_m = b | C_k)` at `[m][b·C + k]`.
    pub likelihoods: Vec<Vec<f64>>,
    /// Boost multipliers, same layout as `likelihoods`.
    pub weights: Vec<Vec<f64>>,
}

/// Training accuracy before boosting and after each round that ran.
#[derive(Debug, Clone, PartialEq)]
pub struct DbnnTrace {
    pub accuracy: Vec<f64>,
    /// Round whose weights were kept (0 = plain naive Bayes).
    pub kept_round: usize,
}

impl DbnnModel {
    /// Laplace-smoothed naive Bayes with unit weights.
    pub fn naive_bayes(bins: AttributeBins, binned: &[Vec<usize>], labels: &[usize]) -> Result<Self> {
        if binned.is_empty() {
            return Err(Error::InvalidArgument("empty training data".into()));
        }
        if binned.len() != labels.len() {
            return Err(Error::Dimension(format!(
                "{} rows vs {} labels",
                binned.len(),
                labels.len()
            )));
        }
        let mut classes = labels.to_vec();
        classes.sort_unstable();
        classes.dedup();
        if classes.len() < 2 {
            return Err(Error::InvalidArgument("need at least 2 classes".into()));
        }
        let nc = classes.len();
        let class_idx: Vec<usize> = labels
            .iter()
            .map(|l| classes.binary_search(l).unwrap_or_default())
            .collect();
        let mut n_k = vec![0usize; nc];
        for &c in &class_idx {
            n_k[c] += 1;
        }
        let n = labels.len() as f64;
        let priors = n_k.iter().map(|&c| c as f64 / n).collect();
        let mut likelihoods = Vec::with_capacity(bins.dim());
        for m in 0..bins.dim() {
            let kb = bins.bin_count(m);
            let mut counts = vec![0usize; kb * nc];
            for (row, &c) in binned.iter().zip(&class_idx) {
                counts[row[m] * nc + c] += 1;
            }
            likelihoods.push(
                counts
                    .iter()
                    .enumerate()
                    .map(|(i, &cnt)| (cnt as f64 + 1.0) / (n_k[i % nc] as f64 + kb as f64))
                    .collect::<Vec<f64>>(),
            );
        }
        let weights = likelihoods.iter().map(|l| vec![1.0; l.len()]).collect();
        Ok(Self {
            bins,
            classes,
            priors,
            likelihoods,
            weights,
        })
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Posterior over `classes` for an already-binned example.
    pub fn posterior_binned(&self, row: &[usize]) -> Vec<f64> {
        let nc = self.class_count();
        let mut log_score: Vec<f64> = self.priors.iter().map(|p| p.ln()).collect();
        for (m, &b) in row.iter().enumerate() {
            for (k, s) in log_score.iter_mut().enumerate() {
                let i = b * nc + k;
                *s += (self.weights[m][i] * self.likelihoods[m][i]).ln();
            }
        }
        let top = log_score.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut p: Vec<f64> = log_score.iter().map(|s| (s - top).exp()).collect();
        let z: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= z);
        p
    }

    pub fn posterior(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.posterior_binned(&self.bins.bin_row(x)?))
    }

    /// Index into `classes` of the most probable class; ties go to the
    /// lower index.
    pub fn classify_index(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax(&self.posterior(x)?))
    }

    pub fn classify(&self, x: &[f64]) -> Result<usize> {
        Ok(self.classes[self.classify_index(x)?])
    }

    fn class_indices(&self, labels: &[usize]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|l| {
                self.classes
                    .binary_search(l)
                    .map_err(|_| Error::InvalidArgument(format!("label {l} not seen in training")))
            })
            .collect()
    }

    /// Fraction of binned examples whose argmax class matches the label.
    pub fn accuracy_binned(&self, binned: &[Vec<usize>], labels: &[usize]) -> Result<f64> {
        let idx = self.class_indices(labels)?;
        let hits = binned
            .iter()
            .zip(&idx)
            .filter(|(row, &c)| argmax(&self.posterior_binned(row)) == c)
            .count();
        Ok(hits as f64 / labels.len() as f64)
    }

    /// One boosting pass: posteriors are taken with the weights as they stood
    /// at the start of the pass, then every misclassified example multiplies
    /// its true-class cells by `1 + learn_rate·(P(rival) − P(true))`.
    /// Returns the number of misclassified examples.
    pub fn boost_round(&mut self, binned: &[Vec<usize>], labels: &[usize], learn_rate: f64) -> Result<usize> {
        if !(learn_rate > 0.0) || !learn_rate.is_finite() {
            return Err(Error::InvalidArgument(format!("learn rate {learn_rate} must be > 0")));
        }
        let idx = self.class_indices(labels)?;
        let nc = self.class_count();
        let mut boosts = Vec::new();
        for (row, &c) in binned.iter().zip(&idx) {
            let p = self.posterior_binned(row);
            let rival = (0..nc)
                .filter(|&k| k != c)
                .max_by(|&a, &b| p[a].total_cmp(&p[b]).then(b.cmp(&a)))
                .unwrap_or(c);
            if argmax(&p) != c {
                boosts.push((row, c, 1.0 + learn_rate * (p[rival] - p[c])));
            }
        }
        for (row, c, factor) in &boosts {
            for (m, &b) in row.iter().enumerate() {
                self.weights[m][b * nc + c] *= factor;
            }
        }
        if self.weights.iter().flatten().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("dbnn weights".into()));
        }
        Ok(boosts.len())
    }
}

fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in p.iter().enumerate() {
        if *v > p[best] {
            best = i;
        }
    }
    best
}

/// Naive Bayes followed by up to `rounds` boosting passes, stopping once
/// every training example is classified correctly. The weights with the best
/// training accuracy seen (earliest on ties) are kept.
pub fn dbnn_train_traced(
    x: &Matrix,
    labels: &[usize],
    bins: AttributeBins,
    cfg: &DbnnTrainConfig,
) -> Result<(DbnnModel, DbnnTrace)> {
    if x.rows() != labels.len() {
        return Err(Error::Dimension(format!(
            "{} rows vs {} labels",
            x.rows(),
            labels.len()
        )));
    }
    let binned: Vec<Vec<usize>> = (0..x.rows()).map(|r| bins.bin_row(x.row(r))).collect::<Result<_>>()?;
    let mut model = DbnnModel::naive_bayes(bins, &binned, labels)?;
    let mut accuracy = vec![model.accuracy_binned(&binned, labels)?];
    let mut best = (accuracy[0], 0, model.weights.clone());
    for round in 1..=cfg.rounds {
        if accuracy[round - 1] == 1.0 {
            break;
        }
        model.boost_round(&binned, labels, cfg.learn_rate)?;
        let acc = model.accuracy_binned(&binned, labels)?;
        accuracy.push(acc);
        if acc > best.0 {
            best = (acc, round, model.weights.clone());
        }
    }
    model.weights = best.2;
    Ok((
        model,
        DbnnTrace {
            accuracy,
            kept_round: best.1,
        },
    ))
}

pub fn dbnn_train(x: &Matrix, labels: &[usize], bins: AttributeBins, cfg: &DbnnTrainConfig) -> Result<DbnnModel> {
    Ok(dbnn_train_traced(x, labels, bins, cfg)?.0)
}

pub fn dbnn_posterior(model: &DbnnModel, x: &[f64]) -> Result<Vec<f64>> {
    model.posterior(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DbnnRegConfig {
    /// Attribute bins.
    pub bins: usize,
    pub target_bins: usize,
    pub rounds: usize,
    pub learn_rate: f64,
}

impl Default for DbnnRegConfig {
    fn default() -> Self {
        Self {
            bins: 16,
            target_bins: 32,
            rounds: 50,
            learn_rate: 0.5,
        }
    }
}

/// Classifier over target bins decoded by expected value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbnnRegressor {
    pub input_dim: usize,
    pub target_bins: AttributeBins,
    /// `None` when the training target is constant.
    pub classifier: Option<DbnnModel>,
    /// Bin center for each class of the classifier, or the constant.
    pub centers: Vec<f64>,
}

impl DbnnRegressor {
    pub fn predict_one(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.input_dim {
            return Err(Error::Dimension(format!(
                "dbnn expects {} inputs, got {}",
                self.input_dim,
                x.len()
            )));
        }
        match &self.classifier {
            None => Ok(self.centers[0]),
            Some(m) => Ok(m.posterior(x)?.iter().zip(&self.centers).map(|(p, c)| p * c).sum()),
        }
    }

    pub fn predict(&self, data: &SupervisedDataset) -> Result<Vec<f64>> {
        (0..data.len()).map(|j| self.predict_one(data.row(j))).collect()
    }
}

pub fn dbnn_regress_train(data: &SupervisedDataset, cfg: &DbnnRegConfig) -> Result<DbnnRegressor> {
    if cfg.target_bins < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 target bins, got {}",
            cfg.target_bins
        )));
    }
    if data.is_empty() {
        return Err(Error::InvalidArgument("empty training data".into()));
    }
    let t_lo = data.t.iter().copied().fold(f64::INFINITY, f64::min);
    let t_hi = data.t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let target_bins = AttributeBins::from_ranges(&[(t_lo, t_hi)], cfg.target_bins)?;
    if target_bins.is_degenerate(0) {
        return Ok(DbnnRegressor {
            input_dim: data.dim(),
            target_bins,
            classifier: None,
            centers: vec![t_lo],
        });
    }
    let labels: Vec<usize> = data.t.iter().map(|&t| target_bins.bin(0, t)).collect();
    let bins = dbnn_fit_bins(&data.x, cfg.bins)?;
    let train_cfg = DbnnTrainConfig {
        rounds: cfg.rounds,
        learn_rate: cfg.learn_rate,
    };
    let model = dbnn_train(&data.x, &labels, bins, &train_cfg)?;
    let centers = model.classes.iter().map(|&c| target_bins.center(0, c)).collect();
    Ok(DbnnRegressor {
        input_dim: data.dim(),
        target_bins,
        classifier: Some(model),
        centers,
    })
}

pub fn dbnn_regress_predict(model: &DbnnRegressor, x: &[f64]) -> Result<f64> {
    model.predict_one(x)
}
