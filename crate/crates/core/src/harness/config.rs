//! Flat `key = value` experiment configuration.
//!
//! One setting per line, `#` starts a comment, section keys are dotted
//! (`mlp.hidden = 26`). Lists are comma separated. Unknown or repeated keys
//! are errors.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::anfis::MfKind;
use crate::dataio::{Column, NASDAQ_FEATURES};
use crate::dbnn::DbnnRegConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Mlp,
    Anfis,
    Svm,
    Dbnn,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Mlp, ModelKind::Anfis, ModelKind::Svm, ModelKind::Dbnn];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Mlp => "mlp",
            ModelKind::Anfis => "anfis",
            ModelKind::Svm => "svm",
            ModelKind::Dbnn => "dbnn",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownModel(s.trim().to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Csv {
        path: PathBuf,
        name: String,
    },
    /// Logistic-map series generated from the experiment seed.
    Synthetic {
        days: usize,
        name: String,
    },
}

impl DataSource {
    pub fn name(&self) -> &str {
        match self {
            DataSource::Csv { name, .. } | DataSource::Synthetic { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpSettings {
    pub hidden: usize,
    pub epochs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnfisSettings {
    pub mfs: usize,
    pub kind: MfKind,
    pub epochs: usize,
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelChoice {
    Linear,
    Polynomial {
        degree: u32,
        coef0: f64,
    },
    /// `None` means `1/d`.
    Rbf {
        gamma: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmSettings {
    pub kernel: KernelChoice,
    pub c: f64,
    pub epsilon_tube: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub datasets: Vec<DataSource>,
    pub features: Vec<Column>,
    pub target: Column,
    pub horizon: usize,
    pub train_fraction: f64,
    pub models: Vec<ModelKind>,
    pub seed: u64,
    /// Worker threads for training; 0 uses the global pool.
    pub threads: usize,
    /// Record wall-clock training time; when off the column is 0.
    pub timings: bool,
    pub mlp: MlpSettings,
    pub anfis: AnfisSettings,
    pub svm: SvmSettings,
    pub dbnn: DbnnRegConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            datasets: Vec::new(),
            features: NASDAQ_FEATURES.to_vec(),
            target: Column::Close,
            horizon: 1,
            train_fraction: 0.5,
            models: ModelKind::ALL.to_vec(),
            seed: 0,
            threads: 0,
            timings: true,
            mlp: MlpSettings { hidden: 26, epochs: 50 },
            anfis: AnfisSettings {
                mfs: 3,
                kind: MfKind::Triangular,
                epochs: 12,
                eta: 0.01,
            },
            svm: SvmSettings {
                kernel: KernelChoice::Rbf { gamma: None },
                c: 10.0,
                epsilon_tube: 0.01,
                tolerance: 1e-4,
            },
            dbnn: DbnnRegConfig::default(),
        }
    }
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
}

impl ExperimentConfig {
    /// Parses config text; relative dataset paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            let key = k.trim().to_ascii_lowercase();
            if key.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", i + 1)));
            }
            if entries.insert(key.clone(), (i + 1, v.trim().to_string())).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key {key}", i + 1)));
            }
        }

        let mut cfg = ExperimentConfig::default();
        let mut csv_paths = Vec::new();
        let mut names: Option<Vec<String>> = None;
        let mut synth_days = None;
        for (key, (line, v)) in &entries {
            let at = |e: Error| Error::Config(format!("line {line}: {e}"));
            let v = v.as_str();
            match key.as_str() {
                "data.csv" => csv_paths = list(v).map(|p| base_dir.join(p)).collect(),
                "data.names" => names = Some(list(v).map(str::to_string).collect()),
                "data.synthetic" => synth_days = Some(num::<usize>(key, v).map_err(at)?),
                "features" => {
                    cfg.features = list(v).map(str::parse).collect::<Result<_>>().map_err(at)?;
                }
                "target" => cfg.target = v.parse().map_err(at)?,
                "horizon" => cfg.horizon = num(key, v).map_err(at)?,
                "train_fraction" => cfg.train_fraction = num(key, v).map_err(at)?,
                "scaler" => {
                    if v != "minmax" {
                        return Err(at(Error::Config(format!("unsupported scaler {v:?}"))));
                    }
                }
                "models" => cfg.models = list(v).map(str::parse).collect::<Result<_>>()?,
                "seed" => cfg.seed = num(key, v).map_err(at)?,
                "threads" => cfg.threads = num(key, v).map_err(at)?,
                "report.timings" => cfg.timings = num(key, v).map_err(at)?,
                "mlp.hidden" => cfg.mlp.hidden = num(key, v).map_err(at)?,
                "mlp.epochs" => cfg.mlp.epochs = num(key, v).map_err(at)?,
                "anfis.mfs" => cfg.anfis.mfs = num(key, v).map_err(at)?,
                "anfis.kind" => {
                    cfg.anfis.kind = match v {
                        "triangular" => MfKind::Triangular,
                        "gaussian" => MfKind::Gaussian,
                        _ => return Err(at(Error::Config(format!("unknown membership kind {v:?}")))),
                    }
                }
                "anfis.epochs" => cfg.anfis.epochs = num(key, v).map_err(at)?,
                "anfis.eta" => cfg.anfis.eta = num(key, v).map_err(at)?,
                "svm.kernel" | "svm.gamma" | "svm.degree" | "svm.coef0" => {}
                "svm.c" => cfg.svm.c = num(key, v).map_err(at)?,
                "svm.epsilon_tube" => cfg.svm.epsilon_tube = num(key, v).map_err(at)?,
                "svm.tolerance" => cfg.svm.tolerance = num(key, v).map_err(at)?,
                "dbnn.bins" => cfg.dbnn.bins = num(key, v).map_err(at)?,
                "dbnn.target_bins" => cfg.dbnn.target_bins = num(key, v).map_err(at)?,
                "dbnn.rounds" => cfg.dbnn.rounds = num(key, v).map_err(at)?,
                "dbnn.learn_rate" => cfg.dbnn.learn_rate = num(key, v).map_err(at)?,
                _ => return Err(Error::Config(format!("line {line}: unknown key {key}"))),
            }
        }
        cfg.svm.kernel = parse_kernel(&entries)?;

        let names = names.unwrap_or_default();
        for (i, path) in csv_paths.into_iter().enumerate() {
            let name = names.get(i).cloned().unwrap_or_else(|| {
                path.file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| format!("dataset{i}"))
            });
            cfg.datasets.push(DataSource::Csv { path, name });
        }
        if let Some(days) = synth_days {
            let name = names
                .get(cfg.datasets.len())
                .cloned()
                .unwrap_or_else(|| "synthetic".into());
            cfg.datasets.push(DataSource::Synthetic { days, name });
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.datasets.is_empty() {
            return bad("no dataset: set data.csv or data.synthetic".into());
        }
        if self.models.is_empty() {
            return bad("at least one model is required".into());
        }
        let mut seen = self.models.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.models.len() {
            return bad("models listed twice".into());
        }
        let mut names: Vec<&str> = self.datasets.iter().map(DataSource::name).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != self.datasets.len() {
            return bad("dataset names must be distinct".into());
        }
        if self.features.is_empty() {
            return bad("at least one feature column is required".into());
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return bad(format!("train_fraction {} outside (0, 1)", self.train_fraction));
        }
        if self.horizon == 0 {
            return bad("horizon must be >= 1".into());
        }
        if self.mlp.hidden == 0 || self.anfis.mfs == 0 {
            return bad("mlp.hidden and anfis.mfs must be >= 1".into());
        }
        if self.dbnn.bins < 2 || self.dbnn.target_bins < 2 {
            return bad("dbnn.bins and dbnn.target_bins must be >= 2".into());
        }
        Ok(())
    }
}

fn parse_kernel(entries: &BTreeMap<String, (usize, String)>) -> Result<KernelChoice> {
    let get = |k: &str| entries.get(k).map(|(_, v)| v.as_str());
    let kind = get("svm.kernel").unwrap_or("rbf");
    match kind {
        "linear" => Ok(KernelChoice::Linear),
        "poly" | "polynomial" => Ok(KernelChoice::Polynomial {
            degree: get("svm.degree").map_or(Ok(3), |v| num("svm.degree", v))?,
            coef0: get("svm.coef0").map_or(Ok(1.0), |v| num("svm.coef0", v))?,
        }),
        "rbf" => Ok(KernelChoice::Rbf {
            gamma: match get("svm.gamma") {
                None | Some("auto") => None,
                Some(v) => Some(num("svm.gamma", v)?),
            },
        }),
        other => Err(Error::Config(format!("unknown svm kernel {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let text = "# example\ndata.synthetic = 300\nmlp.hidden=8 # small\nmodels = mlp, svm\nsvm.kernel = poly\nsvm.degree = 2\n";
        let cfg = ExperimentConfig::parse(text, Path::new(".")).unwrap();
        assert_eq!(cfg.mlp.hidden, 8);
        assert_eq!(cfg.mlp.epochs, 50);
        assert_eq!(cfg.models, vec![ModelKind::Mlp, ModelKind::Svm]);
        assert_eq!(cfg.svm.kernel, KernelChoice::Polynomial { degree: 2, coef0: 1.0 });
        assert_eq!(
            cfg.datasets,
            vec![DataSource::Synthetic {
                days: 300,
                name: "synthetic".into()
            }]
        );
    }

    #[test]
    fn csv_paths_resolve_against_base() {
        let cfg = ExperimentConfig::parse("data.csv = a.csv, sub/b.csv\n", Path::new("/cfg")).unwrap();
        assert_eq!(
            cfg.datasets[1],
            DataSource::Csv {
                path: PathBuf::from("/cfg/sub/b.csv"),
                name: "b".into()
            }
        );
    }

    #[test]
    fn unknown_model_is_reported() {
        let err = ExperimentConfig::parse("data.synthetic=100\nmodels = mlp, gru\n", Path::new(".")).unwrap_err();
        assert!(matches!(err, Error::UnknownModel(ref m) if m == "gru"));
        assert!(err.to_string().contains("unknown model"));
    }

    #[test]
    fn malformed_lines_are_rejected() {
        for text in [
            "data.synthetic=100\nmlp.hidden\n",
            "data.synthetic=100\nmlp.hiden=3\n",
            "data.synthetic=100\nseed=1\nseed=2\n",
            "data.synthetic=100\ntrain_fraction=1.5\n",
            "mlp.hidden=3\n",
        ] {
            assert!(ExperimentConfig::parse(text, Path::new(".")).is_err(), "{text}");
        }
    }
}
