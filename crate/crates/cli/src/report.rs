//! Report trees with deterministic text and JSON renderings.

use lrs_core::kernel::{Domain, Matrix, Scalar};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Text(String),
    Flag(bool),
    Count(usize),
    /// A coordinate vector, rendered `(a,b,c)`.
    Vector(Vec<String>),
    Vectors(Vec<Vec<String>>),
    Group(Section),
    List(Vec<Value>),
}

/// An ordered list of named values.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Section {
    pub entries: Vec<(String, Value)>,
}

impl Section {
    pub fn new() -> Section {
        Section::default()
    }

    pub fn push(&mut self, key: &str, value: Value) -> &mut Section {
        self.entries.push((key.to_string(), value));
        self
    }

    pub fn text(&mut self, key: &str, value: impl Into<String>) -> &mut Section {
        self.push(key, Value::Text(value.into()))
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Section {
        self.push(key, Value::Flag(value))
    }

    pub fn count(&mut self, key: &str, value: usize) -> &mut Section {
        self.push(key, Value::Count(value))
    }

    pub fn vector(&mut self, key: &str, domain: &Domain, v: &[Scalar]) -> &mut Section {
        self.push(key, Value::Vector(coords(domain, v)))
    }

    pub fn vectors(&mut self, key: &str, domain: &Domain, vs: &[Vec<Scalar>]) -> &mut Section {
        self.push(key, Value::Vectors(vs.iter().map(|v| coords(domain, v)).collect()))
    }

    pub fn matrix(&mut self, key: &str, m: &Matrix) -> &mut Section {
        let d = m.domain().clone();
        self.push(key, Value::Vectors(m.to_rows().iter().map(|r| coords(&d, r)).collect()))
    }

    pub fn group(&mut self, key: &str, section: Section) -> &mut Section {
        self.push(key, Value::Group(section))
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

pub fn coords(domain: &Domain, v: &[Scalar]) -> Vec<String> {
    v.iter().map(|s| domain.format(s)).collect()
}

pub fn tuple(items: &[String]) -> String {
    format!("({})", items.join(","))
}

/// `⟨g₁, g₂⟩` with each generator written in terms of the basis names; `0` for no generators.
pub fn span_of(domain: &Domain, names: &[String], gens: &[Vec<Scalar>]) -> String {
    if gens.is_empty() {
        return "0".into();
    }
    let parts: Vec<String> = gens.iter().map(|g| combination(domain, names, g)).collect();
    format!("⟨{}⟩", parts.join(", "))
}

/// `2*x - 1/2*z` style rendering of a coordinate vector.
pub fn combination(domain: &Domain, names: &[String], v: &[Scalar]) -> String {
    let mut out = String::new();
    for (c, name) in v.iter().zip(names) {
        if domain.is_zero(c) {
            continue;
        }
        let text = domain.format(c);
        let compound = text.contains(['+', ' ']) || text[1..].contains('-');
        let (negative, magnitude) = match text.strip_prefix('-') {
            Some(rest) if !compound => (true, rest.to_string()),
            _ => (false, text),
        };
        let term = match magnitude.as_str() {
            "1" => name.clone(),
            m if compound => format!("({m})*{name}"),
            m => format!("{m}*{name}"),
        };
        out.push_str(match (out.is_empty(), negative) {
            (true, true) => "-",
            (true, false) => "",
            (false, true) => " - ",
            (false, false) => " + ",
        });
        out.push_str(&term);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub command: String,
    pub body: Section,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

impl Report {
    pub fn new(command: impl Into<String>, body: Section) -> Report {
        Report { command: command.into(), body }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.command);
        write_section(&mut out, &self.body, 1);
        out
    }

    pub fn to_json(&self) -> String {
        let mut body = self.body.clone();
        body.entries.insert(0, ("command".into(), Value::Text(self.command.clone())));
        let mut out = serde_json::to_string_pretty(&Value::Group(body)).expect("reports serialize");
        out.push('\n');
        out
    }
}

fn indent(level: usize) -> String {
    "  ".repeat(level)
}

fn scalar_line(v: &Value) -> Option<String> {
    match v {
        Value::Text(t) => Some(t.clone()),
        Value::Flag(b) => Some(if *b { "yes" } else { "no" }.into()),
        Value::Count(n) => Some(n.to_string()),
        Value::Vector(c) => Some(tuple(c)),
        Value::Vectors(vs) if vs.is_empty() => Some("none".into()),
        Value::List(items) if items.is_empty() => Some("none".into()),
        Value::Group(s) if s.entries.is_empty() => Some("none".into()),
        _ => None,
    }
}

fn write_section(out: &mut String, section: &Section, level: usize) {
    for (key, value) in &section.entries {
        match scalar_line(value) {
            Some(line) => out.push_str(&format!("{}{key}: {line}\n", indent(level))),
            None => {
                out.push_str(&format!("{}{key}:\n", indent(level)));
                write_value(out, value, level + 1);
            }
        }
    }
}

fn write_value(out: &mut String, value: &Value, level: usize) {
    match value {
        Value::Vectors(vs) => {
            for v in vs {
                out.push_str(&format!("{}{}\n", indent(level), tuple(v)));
            }
        }
        Value::Group(s) => write_section(out, s, level),
        Value::List(items) => {
            for (i, item) in items.iter().enumerate() {
                match scalar_line(item) {
                    Some(line) => out.push_str(&format!("{}- {line}\n", indent(level))),
                    None => {
                        out.push_str(&format!("{}- [{}]\n", indent(level), i + 1));
                        write_value(out, item, level + 1);
                    }
                }
            }
        }
        other => {
            let line = scalar_line(other).expect("scalar value");
            out.push_str(&format!("{}{line}\n", indent(level)));
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Text(t) => s.serialize_str(t),
            Value::Flag(b) => s.serialize_bool(*b),
            Value::Count(n) => s.serialize_u64(*n as u64),
            Value::Vector(c) => c.serialize(s),
            Value::Vectors(vs) => vs.serialize(s),
            Value::Group(section) => {
                let mut map = s.serialize_map(Some(section.entries.len()))?;
                for (k, v) in &section.entries {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
            Value::List(items) => {
                let mut seq = s.serialize_seq(Some(items.len()))?;
                for item in items {
                    seq.serialize_element(item)?;
                }
                seq.end()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        ["x", "y", "z"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn combinations() {
        let q = Domain::Rationals;
        let v = |a: i64, b: i64, c: i64| vec![q.from_i64(a), q.from_i64(b), q.from_i64(c)];
        assert_eq!(combination(&q, &names(), &v(0, 0, 1)), "z");
        assert_eq!(combination(&q, &names(), &v(-1, 2, 0)), "-x + 2*y");
        assert_eq!(combination(&q, &names(), &v(0, 0, 0)), "0");
        assert_eq!(span_of(&q, &names(), &[v(0, 0, 2)]), "⟨2*z⟩");
    }

    #[test]
    fn renderings() {
        let mut s = Section::new();
        s.text("annihilator", "⟨z⟩").flag("regular", true).count("components", 1);
        let mut inner = Section::new();
        inner.push("basis", Value::Vectors(vec![vec!["1".into(), "0".into()]]));
        s.push("parts", Value::List(vec![Value::Group(inner)]));
        let r = Report::new("analyze ring", s);
        assert_eq!(
            r.to_text(),
            "analyze ring\n  annihilator: ⟨z⟩\n  regular: yes\n  components: 1\n  parts:\n    - [1]\n      basis:\n        (1,0)\n"
        );
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["command"], "analyze ring");
        assert_eq!(json["parts"][0]["basis"][0][1], "0");
        assert!(r.to_json().find("annihilator").unwrap() < r.to_json().find("regular").unwrap());
    }
}
