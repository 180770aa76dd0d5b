//! Report documents and their CSV and JSON renderings.
//!
//! CSV output starts with `#` metadata lines, writes floats with 17
//! significant digits and ends lines with LF. Several tables in one file
//! are separated by a blank line and a `# table:` line.

use std::fmt::Write as _;

use serde::Serialize;

use crate::args::Format;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Scalar {
    fn csv_text(&self) -> String {
        match self {
            Scalar::Int(v) => v.to_string(),
            Scalar::Float(v) => float(*v),
            Scalar::Bool(v) => v.to_string(),
            Scalar::Text(v) => v.clone(),
        }
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Float(v)
    }
}

impl From<usize> for Scalar {
    fn from(v: usize) -> Self {
        Scalar::Int(v as i64)
    }
}

impl From<bool> for Scalar {
    fn from(v: bool) -> Self {
        Scalar::Bool(v)
    }
}

impl From<&str> for Scalar {
    fn from(v: &str) -> Self {
        Scalar::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub version: &'static str,
    pub formulas: Vec<&'static str>,
}

impl Meta {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            n: None,
            a: None,
            seed: None,
            version: env!("CARGO_PKG_VERSION"),
            formulas: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Document {
    pub meta: Meta,
    /// Named scalar results, in insertion order.
    #[serde(serialize_with = "ordered_map")]
    pub results: Vec<(String, Scalar)>,
    pub tables: Vec<Table>,
}

fn ordered_map<S: serde::Serializer>(v: &[(String, Scalar)], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(v.len()))?;
    for (k, x) in v {
        m.serialize_entry(k, x)?;
    }
    m.end()
}

impl Document {
    pub fn new(meta: Meta) -> Self {
        Self {
            meta,
            results: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn result(&mut self, key: &str, value: impl Into<Scalar>) {
        self.results.push((key.to_string(), value.into()));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
                s.push('\n');
                s
            }
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let m = &self.meta;
        let _ = writeln!(out, "# command: {}", m.command);
        if let Some(n) = m.n {
            let _ = writeln!(out, "# n: {n}");
        }
        if let Some(a) = m.a {
            let _ = writeln!(out, "# a: {}", float(a));
        }
        if let Some(seed) = m.seed {
            let _ = writeln!(out, "# seed: {seed}");
        }
        let _ = writeln!(out, "# version: {}", m.version);
        let _ = writeln!(out, "# formulas: {}", m.formulas.join("; "));
        for (k, v) in &self.results {
            let _ = writeln!(out, "# {k}: {}", v.csv_text());
        }
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "# table: {}", t.name);
            out.push_str(&t.columns.join(","));
            out.push('\n');
            for row in &t.rows {
                let cells: Vec<String> = row.iter().map(|&v| float(v)).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        out
    }
}

/// 17 significant digits, enough to round-trip any double.
pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}
