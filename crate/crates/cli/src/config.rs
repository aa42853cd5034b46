//! `--config file.json`: keys override parsed flags; unknown keys are rejected.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use nhlatt_core::{Error, Result};

/// Applies the config file (if any) on top of `args` and returns the merged
/// arguments with their JSON echo.
pub fn resolve<T>(args: T, path: Option<&str>) -> Result<(T, Value)>
where
    T: Serialize + DeserializeOwned,
{
    let mut value = serde_json::to_value(&args).map_err(invalid)?;
    let Some(path) = path else {
        return Ok((args, value));
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("{path}: cannot read config: {e}")))?;
    let overrides: Value = serde_json::from_str(&text).map_err(invalid)?;
    let Value::Object(overrides) = overrides else {
        return Err(Error::InvalidParameter(format!("{path}: config must be a JSON object")));
    };
    let target = value.as_object_mut().expect("argument structs serialise to objects");
    for (key, v) in overrides {
        match target.get_mut(&key) {
            Some(slot) => *slot = v,
            None => {
                return Err(Error::InvalidParameter(format!("{path}: unknown config key {key:?}")));
            }
        }
    }
    let merged = serde_json::from_value(value.clone()).map_err(invalid)?;
    Ok((merged, value))
}

fn invalid(e: serde_json::Error) -> Error {
    Error::InvalidParameter(format!("config: {e}"))
}
