//! JSON configuration files and run manifests.
//!
//! A configuration file is a JSON object whose keys are the camelCase names
//! of a subcommand's options; every key present replaces the value given on
//! the command line. A manifest written by a previous run is accepted as a
//! configuration file too, which re-runs it.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{AppError, AppResult};

pub const MANIFEST_FILE: &str = "manifest.json";

/// Replaces the fields of `args` named in `overrides`.
pub fn overlay<T: Serialize + DeserializeOwned>(
    args: &T,
    overrides: &Map<String, Value>,
) -> AppResult<T> {
    let mut base = serde_json::to_value(args).map_err(|e| AppError::Usage(e.to_string()))?;
    let Some(obj) = base.as_object_mut() else {
        return Err(AppError::Usage("options do not form an object".into()));
    };
    for (k, v) in overrides {
        if !obj.contains_key(k) {
            return Err(AppError::Usage(format!("unknown configuration key `{k}`")));
        }
        obj.insert(k.clone(), v.clone());
    }
    serde_json::from_value(base).map_err(|e| AppError::Usage(format!("invalid configuration: {e}")))
}

/// Reads the option overrides for `command` from a configuration file or a
/// manifest.
pub fn load_overrides(path: &Path, command: &str) -> AppResult<Map<String, Value>> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| AppError::Usage(format!("{}: invalid JSON: {e}", path.display())))?;
    let Value::Object(obj) = value else {
        return Err(AppError::Usage(format!(
            "{}: expected a JSON object",
            path.display()
        )));
    };
    if let Some(Value::Object(args)) = obj.get("args") {
        if let Some(c) = obj.get("command").and_then(Value::as_str) {
            if c != command {
                return Err(AppError::Usage(format!(
                    "{} is a manifest for `{c}`, not `{command}`",
                    path.display()
                )));
            }
        }
        return Ok(args.clone());
    }
    Ok(obj)
}

/// Everything needed to reproduce a run: the resolved options, the seeds
/// and the files produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub args: Value,
    pub seeds: Value,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new<T: Serialize>(
        command: &str,
        args: &T,
        seeds: Value,
        outputs: Vec<String>,
    ) -> AppResult<Self> {
        Ok(Manifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            args: serde_json::to_value(args).map_err(|e| AppError::Usage(e.to_string()))?,
            seeds,
            outputs,
        })
    }

    pub fn write(&self, dir: &Path) -> AppResult<()> {
        let path = dir.join(MANIFEST_FILE);
        let mut text =
            serde_json::to_string_pretty(self).map_err(|e| AppError::Usage(e.to_string()))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| AppError::io(&path, e))
    }

    pub fn read(path: &Path) -> AppResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| AppError::Usage(format!("{}: {e}", path.display())))
    }
}
