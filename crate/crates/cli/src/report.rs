use std::fmt::Write as _;
use std::time::Duration;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Field {
    Text(String),
    Lines(Vec<String>),
}

/// An ordered `key: value` report. Multi-line fields print as `key:`
/// followed by lines indented by two spaces.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<(String, String)>,
    pub fields: Vec<(String, Field)>,
    pub elapsed: Option<Duration>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            ..Report::default()
        }
    }

    pub fn input(&mut self, path: impl Into<String>, bytes: &[u8]) {
        self.inputs.push((path.into(), sha256_hex(bytes)));
    }

    pub fn text(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.fields
            .push((key.into(), Field::Text(value.to_string())));
        self
    }

    pub fn lines<I, S>(&mut self, key: impl Into<String>, lines: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.fields.push((
            key.into(),
            Field::Lines(lines.into_iter().map(Into::into).collect()),
        ));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Field> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, f)| f)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "command: {}", self.command).expect("string write");
        for (path, digest) in &self.inputs {
            writeln!(out, "input: {path} sha256:{digest}").expect("string write");
        }
        for (key, field) in &self.fields {
            match field {
                Field::Text(v) => writeln!(out, "{key}: {v}").expect("string write"),
                Field::Lines(ls) => {
                    writeln!(out, "{key}:").expect("string write");
                    for l in ls {
                        writeln!(out, "  {l}").expect("string write");
                    }
                }
            }
        }
        if let Some(t) = self.elapsed {
            writeln!(out, "time_ms: {:.3}", t.as_secs_f64() * 1e3).expect("string write");
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let mut result = Map::new();
        for (key, field) in &self.fields {
            let v = match field {
                Field::Text(s) => Value::String(s.clone()),
                Field::Lines(ls) => Value::Array(ls.iter().cloned().map(Value::String).collect()),
            };
            result.insert(key.clone(), v);
        }
        json!({
            "command": self.command,
            "inputs": self.inputs.iter().map(|(p, d)| json!({"path": p, "sha256": d})).collect::<Vec<_>>(),
            "result": result,
            "time_ms": self.elapsed.map(|t| t.as_secs_f64() * 1e3),
        })
    }
}
