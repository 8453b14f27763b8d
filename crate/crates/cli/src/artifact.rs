//! Output artifacts: a JSON document with the resolved run configuration,
//! hashes of any word certificates used, and the result.

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::Path;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the canonical (compact, key-sorted) JSON of a value.
pub fn value_hash(v: &Value) -> String {
    sha256_hex(v.to_string().as_bytes())
}

pub struct Artifact {
    command: String,
    config: Value,
    certificates: Vec<Value>,
    result: Value,
    pass: Option<bool>,
}

impl Artifact {
    pub fn new(command: &str, config: impl Serialize) -> Self {
        Self {
            command: command.to_string(),
            config: serde_json::to_value(config).unwrap_or(Value::Null),
            certificates: Vec::new(),
            result: Value::Null,
            pass: None,
        }
    }

    pub fn certificate(&mut self, cert: &Value) {
        self.certificates.push(json!({
            "target": cert["target"],
            "class": cert["class"],
            "sha256": value_hash(cert),
        }));
    }

    pub fn result(mut self, result: Value, pass: Option<bool>) -> Self {
        self.result = result;
        self.pass = pass;
        self
    }

    pub fn to_value(&self) -> Value {
        let mut v = json!({
            "tool": "nilmodel",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": self.config,
            "certificates": self.certificates,
            "result": self.result,
        });
        if let Some(p) = self.pass {
            v["pass"] = json!(p);
        }
        v
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).unwrap_or_default();
        s.push('\n');
        s
    }
}

/// Writes `bytes` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}
