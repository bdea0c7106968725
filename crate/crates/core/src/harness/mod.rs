//! Experiment pipeline: ingest, scale, window, split, train the four model
//! families, evaluate and report.

pub mod config;
pub mod model_io;
pub mod report;
pub mod synth;

use std::fs::File;
use std::time::Instant;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anfis::{anfis_train, build_grid_rules, AnfisModel};
use crate::dataio::{
    apply_scale, chrono_split, fit_scaler, load_ohlc_csv, make_supervised, train_rows, Column, ScalerParams,
    SupervisedDataset, TimeSeriesFrame, DATE_FORMAT,
};
use crate::dbnn::{dbnn_regress_train, DbnnRegressor};
use crate::error::{Error, Result};
use crate::lm::{lm_train, LmConfig};
use crate::metrics::{evaluate, rmse};
use crate::mlp::{mlp_init, MlpModel};
use crate::svm::{svr_train, Kernel, SvmModel, SvmTrainConfig};

pub use config::{DataSource, ExperimentConfig, KernelChoice, ModelKind};
pub use model_io::{load_model, load_model_as, save_model, ModelBundle};
pub use report::{emit_report, parse_report_csv, EvalReport, Phase, ReportFormat, ReportRow};
pub use synth::{synth_ohlc, SynthConfig};

/// Any trained forecaster, predicting the scaled target from scaled features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum Model {
    Mlp(MlpModel),
    Anfis(AnfisModel),
    Svm(SvmModel),
    Dbnn(DbnnRegressor),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Mlp(_) => ModelKind::Mlp,
            Model::Anfis(_) => ModelKind::Anfis,
            Model::Svm(_) => ModelKind::Svm,
            Model::Dbnn(_) => ModelKind::Dbnn,
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Model::Mlp(m) => m.input_dim,
            Model::Anfis(m) => m.input_dim,
            Model::Svm(m) => m.input_dim,
            Model::Dbnn(m) => m.input_dim,
        }
    }

    pub fn predict_one(&self, x: &[f64]) -> Result<f64> {
        match self {
            Model::Mlp(m) => m.forward(x),
            Model::Anfis(m) => m.predict_one(x),
            Model::Svm(m) => m.predict(x),
            Model::Dbnn(m) => m.predict_one(x),
        }
    }

    pub fn predict(&self, data: &SupervisedDataset) -> Result<Vec<f64>> {
        (0..data.len()).map(|j| self.predict_one(data.row(j))).collect()
    }
}

/// One dataset after scaling, windowing and splitting.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedDataset {
    pub name: String,
    pub features: Vec<Column>,
    pub target: Column,
    pub horizon: usize,
    /// Fitted on the rows that the training split touches.
    pub scaler: ScalerParams,
    pub train: SupervisedDataset,
    pub test: SupervisedDataset,
    /// Raw target values aligned with `train` / `test`.
    pub train_actual: Vec<f64>,
    pub test_actual: Vec<f64>,
    /// Scaled target on each test feature day, the persistence forecast.
    pub test_persistence: Vec<f64>,
}

impl PreparedDataset {
    /// Test RMSE (scaled) of predicting the target `horizon` days ahead by
    /// its value today.
    pub fn persistence_rmse(&self) -> Result<f64> {
        rmse(&self.test.t, &self.test_persistence)
    }
}

/// Scales, windows and splits `frame`. The scaler is fitted on the first
/// `n_train + horizon` records only: the feature and target days of the
/// training rows.
pub fn prepare_dataset(frame: &TimeSeriesFrame, cfg: &ExperimentConfig) -> Result<PreparedDataset> {
    let name = frame.index_name().to_string();
    if frame.len() <= cfg.horizon + 1 {
        return Err(Error::InvalidArgument(format!(
            "{} records are too few for horizon {}",
            frame.len(),
            cfg.horizon
        )));
    }
    let n_rows = frame.len() - cfg.horizon;
    let n_train = train_rows(n_rows, cfg.train_fraction)?;
    let scaler = fit_scaler(&frame.head(n_train + cfg.horizon), &Column::ALL)?;
    let scaled = apply_scale(frame, &scaler)?;
    let all = make_supervised(&scaled, &cfg.features, cfg.target, cfg.horizon)?;
    let (train, test) = chrono_split(&all, cfg.train_fraction)?;
    debug_assert_eq!(train.len(), n_train);

    let raw_target = frame
        .column(cfg.target)
        .ok_or_else(|| Error::InvalidArgument(format!("missing column {}", cfg.target)))?;
    let scaled_target = scaled.column(cfg.target).expect("scaled frame keeps fitted columns");
    let h = cfg.horizon;
    Ok(PreparedDataset {
        name,
        features: cfg.features.clone(),
        target: cfg.target,
        horizon: h,
        scaler,
        train_actual: raw_target[h..h + n_train].to_vec(),
        test_actual: raw_target[h + n_train..].to_vec(),
        test_persistence: scaled_target[n_train..n_rows].to_vec(),
        train,
        test,
    })
}

fn kernel_for(choice: KernelChoice, d: usize) -> Kernel {
    match choice {
        KernelChoice::Linear => Kernel::Linear,
        KernelChoice::Polynomial { degree, coef0 } => Kernel::Polynomial { degree, coef0 },
        KernelChoice::Rbf { gamma } => Kernel::Rbf {
            gamma: gamma.unwrap_or(1.0 / d as f64),
        },
    }
}

/// Trains one model family on scaled training rows.
pub fn train_model(kind: ModelKind, cfg: &ExperimentConfig, train: &SupervisedDataset) -> Result<Model> {
    let d = train.dim();
    match kind {
        ModelKind::Mlp => {
            let init = mlp_init(d, cfg.mlp.hidden, cfg.seed)?;
            let lm = LmConfig {
                max_epochs: cfg.mlp.epochs,
                ..LmConfig::default()
            };
            Ok(Model::Mlp(lm_train(&init, train, &lm)?.0))
        }
        ModelKind::Anfis => {
            let ranges: Vec<(f64, f64)> = (0..d)
                .map(|m| {
                    let col = (0..train.len()).map(|j| train.x.get(j, m));
                    let (lo, hi) = col.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
                    if hi > lo {
                        (lo, hi)
                    } else {
                        (lo - 0.5, hi + 0.5)
                    }
                })
                .collect();
            let init = build_grid_rules(d, cfg.anfis.mfs, &ranges, cfg.anfis.kind)?;
            Ok(Model::Anfis(
                anfis_train(&init, train, cfg.anfis.epochs, cfg.anfis.eta)?.0,
            ))
        }
        ModelKind::Svm => {
            let rows: Vec<&[f64]> = (0..train.len()).map(|j| train.row(j)).collect();
            let svm_cfg = SvmTrainConfig {
                c: cfg.svm.c,
                tolerance: cfg.svm.tolerance,
                epsilon_tube: cfg.svm.epsilon_tube,
                seed: cfg.seed,
                ..SvmTrainConfig::default()
            };
            Ok(Model::Svm(
                svr_train(&rows, &train.t, kernel_for(cfg.svm.kernel, d), &svm_cfg)?.0,
            ))
        }
        ModelKind::Dbnn => Ok(Model::Dbnn(dbnn_regress_train(train, &cfg.dbnn)?)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub dataset: String,
    pub model: Model,
    pub train_seconds: f64,
}

/// Raw-unit test forecasts of one model.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSeries {
    pub model: ModelKind,
    pub dataset: String,
    pub dates: Vec<NaiveDate>,
    pub actual: Vec<f64>,
    pub predicted: Vec<f64>,
}

impl PredictionSeries {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,actual,predicted\n");
        for ((d, a), p) in self.dates.iter().zip(&self.actual).zip(&self.predicted) {
            out.push_str(&format!("{},{a},{p}\n", d.format(DATE_FORMAT)));
        }
        out
    }
}

fn raw_predictions(model: &Model, data: &SupervisedDataset, prep: &PreparedDataset) -> Result<(Vec<f64>, Vec<f64>)> {
    let scaled = model.predict(data)?;
    let raw = scaled
        .iter()
        .map(|&v| prep.scaler.unscale(prep.target, v))
        .collect::<Result<Vec<_>>>()?;
    Ok((scaled, raw))
}

pub fn prediction_series(model: &Model, prep: &PreparedDataset) -> Result<PredictionSeries> {
    let (_, predicted) = raw_predictions(model, &prep.test, prep)?;
    Ok(PredictionSeries {
        model: model.kind(),
        dataset: prep.name.clone(),
        dates: prep.test.target_dates.clone(),
        actual: prep.test_actual.clone(),
        predicted,
    })
}

/// `date,actual,predicted` for the test split in raw index units; `date`
/// is the day being forecast.
pub fn emit_predictions(model: &Model, prep: &PreparedDataset) -> Result<String> {
    Ok(prediction_series(model, prep)?.to_csv())
}

fn evaluate_rows(trained: &TrainedModel, prep: &PreparedDataset) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::with_capacity(2);
    for (phase, data, actual) in [
        (Phase::Train, &prep.train, &prep.train_actual),
        (Phase::Test, &prep.test, &prep.test_actual),
    ] {
        let (scaled, raw) = raw_predictions(&trained.model, data, prep)?;
        let stats = evaluate(&data.t, &scaled, actual, &raw)?;
        rows.push(ReportRow {
            model: trained.model.kind().to_string(),
            dataset: prep.name.clone(),
            phase,
            rmse_scaled: stats.rmse,
            map: stats.map,
            mape: stats.mape,
            corr: stats.corr,
            train_seconds: trained.train_seconds,
        });
    }
    Ok(rows)
}

pub fn load_frame(source: &DataSource, seed: u64) -> Result<TimeSeriesFrame> {
    match source {
        DataSource::Csv { path, name } => {
            let file = File::open(path).map_err(|e| Error::io(path, e))?;
            load_ohlc_csv(file, name).map_err(|e| e.context(format!("reading {}", path.display())))
        }
        DataSource::Synthetic { days, name } => {
            Ok(synth_ohlc(&SynthConfig::new(*days, seed))?.with_index_name(name.clone()))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub report: EvalReport,
    pub prepared: Vec<PreparedDataset>,
    /// Dataset-major, models in config order.
    pub models: Vec<TrainedModel>,
    pub predictions: Vec<PredictionSeries>,
}

/// Runs every configured model on every dataset. Trainings run in parallel
/// (on `cfg.threads` workers when nonzero); results are assembled in config
/// order, so output does not depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let prepared = cfg
        .datasets
        .iter()
        .map(|src| {
            load_frame(src, cfg.seed)
                .and_then(|f| prepare_dataset(&f, cfg))
                .map_err(|e| e.context(format!("dataset {}", src.name())))
        })
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, ModelKind)> = (0..prepared.len())
        .flat_map(|di| cfg.models.iter().map(move |&k| (di, k)))
        .collect();
    let train_one = |&(di, kind): &(usize, ModelKind)| -> Result<TrainedModel> {
        let prep = &prepared[di];
        let start = Instant::now();
        let model = train_model(kind, cfg, &prep.train)
            .map_err(|e| e.context(format!("dataset {}, model {kind}", prep.name)))?;
        let train_seconds = if cfg.timings {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        };
        Ok(TrainedModel {
            dataset: prep.name.clone(),
            model,
            train_seconds,
        })
    };
    let results: Vec<Result<TrainedModel>> = if cfg.threads == 0 {
        jobs.par_iter().map(train_one).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| jobs.par_iter().map(train_one).collect())
    };
    let models = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut report = EvalReport::default();
    let mut predictions = Vec::with_capacity(models.len());
    for (trained, &(di, kind)) in models.iter().zip(&jobs) {
        let prep = &prepared[di];
        let ctx = |e: Error| e.context(format!("dataset {}, model {kind}", prep.name));
        report.rows.extend(evaluate_rows(trained, prep).map_err(ctx)?);
        predictions.push(prediction_series(&trained.model, prep).map_err(ctx)?);
    }
    Ok(ExperimentOutput {
        report,
        prepared,
        models,
        predictions,
    })
}

/// Forecasts from every record of `frame`: `(feature date, raw forecast)`.
pub fn forecast_frame(bundle: &ModelBundle, frame: &TimeSeriesFrame) -> Result<Vec<(NaiveDate, f64)>> {
    let scaled = apply_scale(frame, &bundle.scaler)?;
    let cols = bundle
        .features
        .iter()
        .map(|&c| {
            scaled
                .column(c)
                .ok_or_else(|| Error::InvalidArgument(format!("scaler has no column {c}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut x = vec![0.0; cols.len()];
    let mut out = Vec::with_capacity(frame.len());
    for (i, date) in frame.dates().iter().enumerate() {
        for (slot, col) in x.iter_mut().zip(&cols) {
            *slot = col[i];
        }
        let y = bundle.model.predict_one(&x)?;
        out.push((*date, bundle.scaler.unscale(bundle.target, y)?));
    }
    Ok(out)
}
