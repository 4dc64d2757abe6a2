//! Versioned report envelope. Text output is rendered from the JSON.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

pub const SCHEMA: &str = "dst-report/1";

#[derive(Clone, Debug, PartialEq)]
pub struct Input {
    pub path: String,
    pub sha256: String,
}

impl Input {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let digest = Sha256::digest(&bytes);
        let sha256 = digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        Ok(Self { path: path.display().to_string(), sha256 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Rejected,
}

pub struct Report<'a> {
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub inputs: &'a [Input],
    pub warnings: &'a [String],
    pub status: Status,
    pub result: Value,
}

impl Report<'_> {
    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "tool": { "name": "dst", "version": env!("CARGO_PKG_VERSION") },
            "command": self.command,
            "status": match self.status { Status::Ok => "ok", Status::Rejected => "rejected" },
            "exact": self.config.exact,
            "seed": self.config.seed,
            "tolerances": serde_json::to_value(self.config.tolerances).expect("plain struct"),
            "inputs": self.inputs.iter().map(|i| json!({ "path": i.path, "sha256": i.sha256 })).collect::<Vec<_>>(),
            "warnings": self.warnings,
            "result": self.result,
        })
    }
}

/// One `path = value` line per leaf.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    flatten(v, String::new(), &mut out);
    out
}

fn flatten(v: &Value, prefix: String, out: &mut String) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, child) in map {
                flatten(child, join(k), out);
            }
        }
        Value::Array(items) if !items.is_empty() && items.iter().any(|i| i.is_object() || i.is_array()) => {
            for (i, child) in items.iter().enumerate() {
                flatten(child, format!("{prefix}[{i}]"), out);
            }
        }
        leaf => {
            let _ = writeln!(out, "{prefix} = {leaf}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_is_flattened_json() {
        let v = json!({"a": {"b": 1, "c": [1, 2]}, "d": [{"e": "x"}], "f": {}});
        assert_eq!(render_text(&v), "a.b = 1\na.c = [1,2]\nd[0].e = \"x\"\nf = {}\n");
    }

    #[test]
    fn digest_of_known_bytes() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        std::io::Write::write_all(&mut f, b"abc").unwrap();
        let i = Input::read(f.path()).unwrap();
        assert_eq!(i.sha256, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
