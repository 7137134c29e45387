use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

/// Bumped whenever a field is renamed or removed.
pub const SCHEMA_VERSION: &str = "1";

pub enum Body {
    Json(Value),
    Csv(String),
}

pub struct Report {
    pub body: Body,
    /// The computation answered "no"; with --strict this becomes exit 1.
    pub negative: bool,
}

impl Report {
    /// Wraps `fields` in an object carrying the schema version and command
    /// name, with every number rewritten as a decimal string.
    pub fn json(command: &str, fields: Value, negative: bool) -> Self {
        let mut obj = Map::new();
        obj.insert("schema_version".into(), SCHEMA_VERSION.into());
        obj.insert("command".into(), command.into());
        match stringify_numbers(fields) {
            Value::Object(m) => obj.extend(m),
            other => {
                obj.insert("result".into(), other);
            }
        }
        Report { body: Body::Json(Value::Object(obj)), negative }
    }

    pub fn csv(text: String) -> Self {
        Report { body: Body::Csv(text), negative: false }
    }
}

fn stringify_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) => Value::String(n.to_string()),
        Value::Array(a) => Value::Array(a.into_iter().map(stringify_numbers).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, stringify_numbers(v))).collect()),
        other => other,
    }
}

pub fn emit(report: &Report, out: Option<&Path>) -> std::io::Result<()> {
    let mut text = match &report.body {
        Body::Json(v) => serde_json::to_string_pretty(v).map_err(std::io::Error::other)?,
        Body::Csv(s) => s.clone(),
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}
