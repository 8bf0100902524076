//! Machine-readable run reports. Identical inputs must produce
//! byte-identical reports, so everything here serializes through fixed
//! struct field order or sorted maps, and no timestamps or environment
//! details leak in.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Conventions echoed into every report so results are self-describing.
#[derive(Debug, Clone, Serialize)]
pub struct Conventions {
    pub units: &'static str,
    pub zero_convention: &'static str,
    pub tie_breaking: &'static str,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            units: "nats (natural logarithm)",
            zero_convention: "0 ln 0 = 0",
            tie_breaking: "first minimizing maximal chain in lexicographic enumeration order",
        }
    }
}

/// Oracle cross-check attached by `--verify`.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyRecord {
    pub oracle: &'static str,
    pub tolerance: f64,
    pub deviation: f64,
    pub oracle_result: serde_json::Value,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs_digest: String,
    pub conventions: Conventions,
    /// Present exactly when the run exits 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyRecord>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn new(command: impl Into<String>, digest: &InputDigest, result: serde_json::Value) -> Self {
        Self {
            command: command.into(),
            inputs_digest: digest.hex(),
            conventions: Conventions::default(),
            result: Some(result),
            verify: None,
            warnings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Flat key/value table for human eyes; nested values stay compact JSON.
    pub fn to_human(&self) -> String {
        let mut rows: Vec<(String, String)> = vec![
            ("command".into(), self.command.clone()),
            ("inputs_digest".into(), self.inputs_digest.clone()),
        ];
        if let Some(serde_json::Value::Object(map)) = &self.result {
            for (key, value) in map {
                rows.push((key.clone(), render_value(value)));
            }
        } else if let Some(value) = &self.result {
            rows.push(("result".into(), render_value(value)));
        }
        if let Some(verify) = &self.verify {
            rows.push(("verify.oracle".into(), verify.oracle.to_string()));
            rows.push(("verify.deviation".into(), verify.deviation.to_string()));
            rows.push(("verify.pass".into(), verify.pass.to_string()));
        }
        for (i, warning) in self.warnings.iter().enumerate() {
            rows.push((format!("warning[{i}]"), warning.clone()));
        }
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        rows.iter()
            .map(|(k, v)| format!("{k:<width$}  {v}"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

fn render_value(value: &serde_json::Value) -> String {
    match value {
        serde_json::Value::String(s) => s.clone(),
        other => serde_json::to_string(other).expect("value serializes"),
    }
}

/// Content hash over input files, in the order they are read. Commands
/// without file inputs hash the empty byte string.
#[derive(Debug, Default)]
pub struct InputDigest {
    hasher: Sha256,
}

impl InputDigest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn absorb(&mut self, bytes: &[u8]) {
        self.hasher.update(bytes);
    }

    pub fn hex(&self) -> String {
        hex::encode(self.hasher.clone().finalize())
    }
}
