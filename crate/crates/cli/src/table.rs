//! Tabular output. CSV carries `# key=value` metadata lines, a header row, the
//! data rows and `# summary key=value` trailer lines; JSON holds the same data
//! as one object with `meta`, `columns`, `rows` and `summary`. Floats are
//! written with 17 significant digits, which round-trips every f64 exactly.

use std::fmt;

use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            // bitwise, so NaN equals itself and the test is exact
            (Cell::Num(a), Cell::Num(b)) => a.to_bits() == b.to_bits(),
            (Cell::Int(a), Cell::Int(b)) => a == b,
            (Cell::Bool(a), Cell::Bool(b)) => a == b,
            (Cell::Text(a), Cell::Text(b)) => a == b,
            _ => false,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

/// 17 significant digits in scientific notation; non-finite values as NaN, inf, -inf.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(x) => f.write_str(&format_f64(*x)),
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl Cell {
    /// Inverse of `Display`: integers are bare digit strings, floats always
    /// carry an exponent or are one of the non-finite spellings.
    pub fn parse(s: &str) -> Cell {
        match s {
            "true" => return Cell::Bool(true),
            "false" => return Cell::Bool(false),
            "NaN" => return Cell::Num(f64::NAN),
            "inf" => return Cell::Num(f64::INFINITY),
            "-inf" => return Cell::Num(f64::NEG_INFINITY),
            _ => {}
        }
        let digits = s.strip_prefix('-').unwrap_or(s);
        if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
            if let Ok(i) = s.parse() {
                return Cell::Int(i);
            }
        }
        if s.contains(['e', 'E']) {
            if let Ok(x) = s.parse() {
                return Cell::Num(x);
            }
        }
        Cell::Text(s.to_string())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Cell::Bool(b) => Some(*b),
            _ => None,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => {
                // arbitrary-precision numbers keep the 17-digit text as written
                serde_json::from_str(&format_f64(*x)).expect("formatted float is valid JSON")
            }
            Cell::Num(x) => Value::String(format_f64(*x)),
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }

    fn from_json(v: &Value) -> Result<Cell, CliError> {
        match v {
            Value::Number(n) => Ok(Cell::parse(&n.to_string())),
            Value::Bool(b) => Ok(Cell::Bool(*b)),
            Value::String(s) => Ok(match s.as_str() {
                "NaN" | "inf" | "-inf" => Cell::parse(s),
                _ => Cell::Text(s.clone()),
            }),
            other => Err(CliError::Parse(format!("unexpected JSON cell {other}"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, Cell)>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl fmt::Display) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn summarize(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push((key.to_string(), value.into()));
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}={v}\n"));
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string())).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells"));
        for (k, v) in &self.summary {
            out.push_str(&format!("# summary {k}={v}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, CliError> {
        let mut table = Table::default();
        for line in text.lines().filter_map(|l| l.strip_prefix("# ")) {
            if let Some(rest) = line.strip_prefix("summary ") {
                let (k, v) = split_pair(rest)?;
                table.summary.push((k, Cell::parse(&v)));
            } else {
                table.meta.push(split_pair(line)?);
            }
        }
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        table.columns = r
            .headers()
            .map_err(|e| CliError::Parse(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        for rec in r.records() {
            let rec = rec.map_err(|e| CliError::Parse(e.to_string()))?;
            table.rows.push(rec.iter().map(Cell::parse).collect());
        }
        Ok(table)
    }

    pub fn to_json(&self) -> String {
        let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Object(self.columns.iter().cloned().zip(row.iter().map(Cell::to_json)).collect()))
            .collect();
        let summary: Map<String, Value> = self.summary.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
        let mut top = Map::new();
        top.insert("meta".into(), Value::Object(meta));
        top.insert(
            "columns".into(),
            Value::Array(self.columns.iter().cloned().map(Value::String).collect()),
        );
        top.insert("rows".into(), Value::Array(rows));
        top.insert("summary".into(), Value::Object(summary));
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("JSON values serialize");
        s.push('\n');
        s
    }

    /// Inverse of `to_json`. Object maps are key-sorted, so metadata and summary
    /// come back in key order.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let v: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        let obj = v.as_object().ok_or_else(|| CliError::Parse("top level is not an object".into()))?;
        let get = |k: &str| obj.get(k).ok_or_else(|| CliError::Parse(format!("missing `{k}`")));
        let columns: Vec<String> = get("columns")?
            .as_array()
            .ok_or_else(|| CliError::Parse("`columns` is not an array".into()))?
            .iter()
            .map(|c| c.as_str().map(str::to_string).ok_or_else(|| CliError::Parse("non-string column".into())))
            .collect::<Result<_, _>>()?;
        let meta = get("meta")?
            .as_object()
            .ok_or_else(|| CliError::Parse("`meta` is not an object".into()))?
            .iter()
            .map(|(k, v)| Ok((k.clone(), v.as_str().ok_or_else(|| CliError::Parse("non-string meta".into()))?.to_string())))
            .collect::<Result<_, CliError>>()?;
        let mut rows = Vec::new();
        for row in get("rows")?.as_array().ok_or_else(|| CliError::Parse("`rows` is not an array".into()))? {
            let row = row.as_object().ok_or_else(|| CliError::Parse("row is not an object".into()))?;
            let cells = columns
                .iter()
                .map(|c| Cell::from_json(row.get(c).ok_or_else(|| CliError::Parse(format!("row lacks `{c}`")))?))
                .collect::<Result<_, _>>()?;
            rows.push(cells);
        }
        let summary = get("summary")?
            .as_object()
            .ok_or_else(|| CliError::Parse("`summary` is not an object".into()))?
            .iter()
            .map(|(k, v)| Ok((k.clone(), Cell::from_json(v)?)))
            .collect::<Result<_, CliError>>()?;
        Ok(Table {
            meta,
            columns,
            rows,
            summary,
        })
    }

    /// Same table with metadata and summary sorted by key, as JSON returns them.
    pub fn key_sorted(&self) -> Table {
        let mut t = self.clone();
        t.meta.sort_by(|a, b| a.0.cmp(&b.0));
        t.summary.sort_by(|a, b| a.0.cmp(&b.0));
        t
    }
}

fn split_pair(line: &str) -> Result<(String, String), CliError> {
    line.split_once('=')
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .ok_or_else(|| CliError::Parse(format!("metadata line without `=`: {line}")))
}
