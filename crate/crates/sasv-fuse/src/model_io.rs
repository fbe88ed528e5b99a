//! JSON persistence for trained models and other serde types.

use std::fs;
use std::path::Path;

use sasv_core::backends::BackendModel;
use sasv_core::fusion::TrainedPipeline;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::score_io::read_text;

/// Pretty-printed JSON with a trailing newline. Floats are written in
/// shortest round-trip form, so reading back is lossless.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    fs::write(path, to_json_string(value)).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|source| Error::Json { path: path.to_path_buf(), source })
}

pub fn save_model(model: &BackendModel, path: &Path) -> Result<()> {
    write_json(model, path)
}

pub fn load_model(path: &Path) -> Result<BackendModel> {
    read_json(path)
}

pub fn save_pipeline(pipeline: &TrainedPipeline, path: &Path) -> Result<()> {
    write_json(pipeline, path)
}

pub fn load_pipeline(path: &Path) -> Result<TrainedPipeline> {
    read_json(path)
}
