use std::fmt::Write as _;

use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => Value::from(*v),
            Cell::Num(v) => Value::from(format_f64(*v)),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:?}")
    }
}

/// Resolved configuration, echoed at the top of every output.
#[derive(Debug, Clone, Default)]
pub struct Config(pub Vec<(String, Cell)>);

impl Config {
    pub fn push(&mut self, key: &str, value: impl Into<Cell>) -> &mut Self {
        self.0.push((key.to_string(), value.into()));
        self
    }

    pub fn list(&mut self, key: &str, values: &[f64]) -> &mut Self {
        let joined = values.iter().map(|v| format_f64(*v)).collect::<Vec<_>>().join(";");
        self.push(key, joined)
    }

    pub fn json(&self) -> Value {
        Value::Object(self.0.iter().map(|(k, v)| (k.clone(), v.json())).collect::<Map<_, _>>())
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub config: Config,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<(String, Cell)>,
}

impl Table {
    pub fn new(config: Config, columns: Vec<&'static str>) -> Self {
        Self { config, columns, rows: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Into<Cell>) {
        self.notes.push((key.to_string(), value.into()));
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.config.0.iter().chain(&self.notes) {
            let _ = writeln!(out, "# {k}={}", v.csv());
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect()))
            .collect();
        let mut obj = Map::new();
        obj.insert("config".into(), self.config.json());
        if !self.notes.is_empty() {
            obj.insert("summary".into(), Config(self.notes.clone()).json());
        }
        obj.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string(&Value::Object(obj)).expect("json encoding");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 18.124_038_404_635_96, 1e-300, 6.02214076e23, -2.5] {
            assert_eq!(format_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_f64(2.784136542430858e-10), "2.784136542430858e-10");
        assert_eq!(format_f64(f64::INFINITY), "inf");
        assert_eq!("inf".parse::<f64>().unwrap(), f64::INFINITY);
    }

    #[test]
    fn csv_layout() {
        let mut c = Config::default();
        c.push("command", "bound").push("kappa", 6.6);
        let mut t = Table::new(c, vec!["x", "label"]);
        t.push(vec![1.0.into(), "a,b".into()]);
        assert_eq!(t.to_csv(), "# command=bound\n# kappa=6.6\nx,label\n1.0,\"a,b\"\n");
        assert!(t.to_json().starts_with("{\"config\":{"));
    }
}
