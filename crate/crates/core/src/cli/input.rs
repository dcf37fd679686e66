use std::fs;
use std::path::Path;

use super::{CliError, CliResult};

/// Observations read from a text file, with the line each came from.
pub struct Observations {
    pub values: Vec<f64>,
    pub lines: Vec<usize>,
}

impl Observations {
    pub fn line_of(&self, index: usize) -> usize {
        self.lines.get(index).copied().unwrap_or(0)
    }
}

/// One real per line. Text after `#` is a comment; blank lines are skipped.
pub fn parse_observations(text: &str) -> CliResult<Observations> {
    let mut values = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let value: f64 = content
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| {
                CliError::data(format!(
                    "line {}: cannot parse '{content}' as a number",
                    i + 1
                ))
            })?;
        values.push(value);
        lines.push(i + 1);
    }
    Ok(Observations { values, lines })
}

pub fn read_observations(path: &Path) -> CliResult<Observations> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    parse_observations(&text)
}
