use std::path::Path;
use std::time::Instant;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "pfml/1";

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub json: bool,
    pub timing: bool,
}

/// A failed command: message for stderr and the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects the JSON report for one command.
pub struct Report {
    fields: Map<String, Value>,
    started: Instant,
}

impl Report {
    pub fn new(command: &str, args: Value) -> Self {
        let mut fields = Map::new();
        fields.insert("schema".into(), json!(SCHEMA));
        fields.insert("command".into(), json!({ "name": command, "args": args }));
        Self {
            fields,
            started: Instant::now(),
        }
    }

    pub fn model(&mut self, path: &Path, bytes: &[u8]) {
        self.add_model("model", path, bytes);
    }

    pub fn add_model(&mut self, key: &str, path: &Path, bytes: &[u8]) {
        self.fields.insert(
            key.into(),
            json!({ "path": path.display().to_string(), "sha256": sha256_hex(bytes) }),
        );
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.fields.insert(key.into(), value);
    }

    pub fn print(mut self, opts: Options) {
        if opts.timing {
            self.fields.insert("timing_us".into(), json!(self.elapsed_us()));
        }
        println!(
            "{}",
            serde_json::to_string_pretty(&Value::Object(self.fields)).expect("reports serialise")
        );
    }

    pub fn elapsed_us(&self) -> u64 {
        u64::try_from(self.started.elapsed().as_micros()).unwrap_or(u64::MAX)
    }
}
