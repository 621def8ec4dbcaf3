//! Flat `key = value` run-configuration files.
//!
//! The CLI merges these under its command-line flags: a key supplies a value
//! only when the corresponding flag was not given, so flags always win.
//! Lines starting with `#` and blank lines are ignored; keys may use `-` or
//! `_` interchangeably (normalized to `_`). When a key repeats, the last
//! occurrence wins at merge time.

use crate::error::{Error, Result};

/// Parse configuration text into `(key, value)` pairs in file order.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::InvalidInput(format!(
                "config line {}: expected `key = value`, got {raw:?}",
                idx + 1
            )));
        };
        let key = key.trim().replace('-', "_");
        if key.is_empty() {
            return Err(Error::InvalidInput(format!(
                "config line {}: empty key",
                idx + 1
            )));
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

/// Read and parse a configuration file.
pub fn load_config(path: &std::path::Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::InvalidInput(format!("cannot read config {}: {e}", path.display()))
    })?;
    parse_config(&text)
}
