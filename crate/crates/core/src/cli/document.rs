use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{CliError, CliResult};

pub const SCHEMA_VERSION: &str = "1";

/// The single JSON document a command writes to stdout.
#[derive(Debug, Serialize, Deserialize)]
pub struct OutputDocument<T> {
    pub schema_version: String,
    /// Parameters the result depends on.
    pub command: Value,
    pub result: T,
}

impl<T: Serialize> OutputDocument<T> {
    pub fn new(command: Value, result: T) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_owned(),
            command,
            result,
        }
    }

    /// serde_json writes the shortest decimal that parses back to the
    /// same `f64`, so printed numbers round-trip exactly.
    pub fn emit(&self) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::data(format!("cannot serialize output: {e}")))?;
        println!("{text}");
        Ok(())
    }
}

/// Accepts either a bare payload or a full document wrapping one, so the
/// output of one command can be fed straight to another.
pub fn parse_payload<T: DeserializeOwned>(text: &str) -> Result<T, serde_json::Error> {
    match serde_json::from_str::<OutputDocument<T>>(text) {
        Ok(doc) => Ok(doc.result),
        Err(_) => serde_json::from_str::<T>(text),
    }
}
