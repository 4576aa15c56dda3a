//! Plain-text reports: `[section]` headers followed by `key = value` lines,
//! in insertion order.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::{fmt_sig, Probability};
use crate::ExactProb;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(ExactProb),
    Real(f64),
    Int(i128),
    Bool(bool),
    Text(String),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Exact(p) => p.render(),
            Value::Real(x) => fmt_sig(*x),
            Value::Int(n) => n.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Section {
    pub name: String,
    pub entries: Vec<(String, Value)>,
}

impl Section {
    pub fn push(&mut self, key: impl Into<String>, value: Value) -> &mut Self {
        self.entries.push((key.into(), value));
        self
    }

    /// Adds `key = p/q` and `key_decimal = <15 significant digits>`.
    pub fn exact(&mut self, key: &str, p: &ExactProb) -> &mut Self {
        self.push(key, Value::Exact(p.clone()));
        self.push(format!("{key}_decimal"), Value::Real(p.to_f64()))
    }

    pub fn real(&mut self, key: &str, x: f64) -> &mut Self {
        self.push(key, Value::Real(x))
    }

    pub fn int(&mut self, key: &str, n: impl Into<i128>) -> &mut Self {
        self.push(key, Value::Int(n.into()))
    }

    pub fn flag(&mut self, key: &str, b: bool) -> &mut Self {
        self.push(key, Value::Bool(b))
    }

    pub fn text(&mut self, key: &str, s: impl Into<String>) -> &mut Self {
        self.push(key, Value::Text(s.into()))
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a new section and returns it.
    pub fn section(&mut self, name: &str) -> &mut Section {
        self.sections.push(Section {
            name: name.to_string(),
            entries: Vec::new(),
        });
        self.sections.last_mut().expect("just pushed")
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&Value> {
        self.sections.iter().find(|s| s.name == section)?.get(key)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "[{}]", s.name);
            for (k, v) in &s.entries {
                let _ = writeln!(out, "{k} = {}", v.render());
            }
        }
        out
    }
}

/// Parses rendered text back into `(section, key, value)` triples. Blank
/// lines and `#` comments are skipped.
pub fn parse_report(text: &str) -> Result<Vec<(String, String, String)>> {
    let mut section = None;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = Some(name.to_string());
            continue;
        }
        let err = |msg: &str| Error::Transcript {
            line: i + 1,
            msg: msg.to_string(),
        };
        let (k, v) = line.split_once(" = ").ok_or_else(|| err("expected `key = value`"))?;
        let s = section.clone().ok_or_else(|| err("entry before any section"))?;
        out.push((s, k.to_string(), v.to_string()));
    }
    Ok(out)
}
