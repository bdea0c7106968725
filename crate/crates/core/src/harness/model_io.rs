//! Model files: a one-line header `indexcast-model <version> <kind>`
//! followed by the JSON bundle.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ModelKind;
use super::Model;
use crate::dataio::{Column, ScalerParams};
use crate::error::{Error, Result};

pub const MAGIC: &str = "indexcast-model";
pub const FORMAT_VERSION: u32 = 1;

/// A trained model with everything needed to forecast from raw records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub features: Vec<Column>,
    pub target: Column,
    pub horizon: usize,
    pub scaler: ScalerParams,
    pub model: Model,
}

impl ModelBundle {
    pub fn to_text(&self) -> Result<String> {
        let body = serde_json::to_string(self).map_err(|e| Error::Format(e.to_string()))?;
        Ok(format!("{MAGIC} {FORMAT_VERSION} {}\n{body}\n", self.model.kind()))
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (header, body) = text
            .split_once('\n')
            .ok_or_else(|| Error::Format("missing header line".into()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some(MAGIC) {
            return Err(Error::Format("not a model file".into()));
        }
        let version: u32 = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Format("missing format version".into()))?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "format version {version}, this build reads {FORMAT_VERSION}"
            )));
        }
        let kind: ModelKind = parts
            .next()
            .ok_or_else(|| Error::Format("missing model kind".into()))?
            .parse()
            .map_err(|e: Error| Error::Format(e.to_string()))?;
        let bundle: ModelBundle = serde_json::from_str(body).map_err(|e| Error::Format(e.to_string()))?;
        if bundle.model.kind() != kind {
            return Err(Error::Format(format!(
                "header says {kind}, body holds {}",
                bundle.model.kind()
            )));
        }
        if bundle.features.len() != bundle.model.input_dim() {
            return Err(Error::Format("feature list does not match model input size".into()));
        }
        Ok(bundle)
    }
}

pub fn save_model(path: &Path, bundle: &ModelBundle) -> Result<()> {
    std::fs::write(path, bundle.to_text()?).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<ModelBundle> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ModelBundle::from_text(&text).map_err(|e| e.context(format!("loading {}", path.display())))
}

/// Like [`load_model`] but fails with a type error unless the file holds `kind`.
pub fn load_model_as(path: &Path, kind: ModelKind) -> Result<ModelBundle> {
    let bundle = load_model(path)?;
    if bundle.model.kind() != kind {
        return Err(Error::ModelType {
            expected: kind.to_string(),
            found: bundle.model.kind().to_string(),
        });
    }
    Ok(bundle)
}
