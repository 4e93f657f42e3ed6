//! Versioned JSON reports. Field order is fixed and every map is ordered, so
//! identical inputs give byte-identical output.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub verdict: Value,
    pub certificates: Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Report {
    pub fn new(command: impl Into<String>) -> Report {
        Report {
            schema: SCHEMA,
            command: command.into(),
            inputs: Vec::new(),
            verdict: Value::Null,
            certificates: Value::Null,
        }
    }

    pub fn input(mut self, name: impl Into<String>, bytes: &[u8]) -> Report {
        self.inputs.push(InputDigest {
            name: name.into(),
            sha256: sha256_hex(bytes),
        });
        self
    }

    pub fn verdict(mut self, v: impl Serialize) -> Report {
        self.verdict = serde_json::to_value(v).expect("report payloads serialise");
        self
    }

    pub fn certificates(mut self, v: impl Serialize) -> Report {
        self.certificates = serde_json::to_value(v).expect("report payloads serialise");
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}
