//! Column tables for sweep output: CSV with `#` metadata lines, or JSON.
//!
//! Floats are written with 17 significant digits so values round-trip
//! exactly and identical inputs give identical bytes.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => (if *b { "1" } else { "0" }).to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(x) => json!(x.to_string()),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
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

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
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

/// `{:.16e}`: 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub name: String,
    /// Ordered key/value metadata.
    pub meta: Vec<(String, String)>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl SweepTable {
    pub fn new(name: &str, columns: &[(&str, &str)]) -> Self {
        SweepTable {
            name: name.to_string(),
            meta: Vec::new(),
            columns: columns
                .iter()
                .map(|(n, u)| Column {
                    name: n.to_string(),
                    unit: u.to_string(),
                })
                .collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Table(format!(
                "{}: row has {} cells, expected {}",
                self.name,
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# table: {}", self.name)?;
        writeln!(out, "# schema_version: {SCHEMA_VERSION}")?;
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {v}")?;
        }
        let units: Vec<String> = self.columns.iter().map(|c| format!("{}[{}]", c.name, c.unit)).collect();
        writeln!(out, "# units: {}", units.join(", "))?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))
            .map_err(|e| Error::Table(e.to_string()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(|e| Error::Table(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let columns: Vec<Value> = self.columns.iter().map(|c| json!({"name": c.name, "unit": c.unit})).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> = self.columns.iter().zip(r).map(|(c, v)| (c.name.clone(), v.json())).collect();
                Value::Object(m)
            })
            .collect();
        json!({
            "schema_version": SCHEMA_VERSION,
            "table": self.name,
            "metadata": meta,
            "columns": columns,
            "rows": rows,
        })
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, &self.to_json()).map_err(|e| Error::Table(e.to_string()))?;
        writeln!(out)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SweepTable {
        let mut t = SweepTable::new("demo", &[("x", "a.u."), ("label", "-"), ("ok", "-")]);
        t.meta("theta_deg", 45);
        t.push(vec![0.1.into(), "A".into(), true.into()]).unwrap();
        t.push(vec![(1.0 / 3.0).into(), "B".into(), false.into()]).unwrap();
        t
    }

    #[test]
    fn csv_round_trips_floats() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# table: demo\n"));
        let body: String = text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
        assert_eq!(rows[1][0].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(&rows[0][1], "A");
    }

    #[test]
    fn rejects_ragged_rows() {
        let mut t = sample();
        assert!(t.push(vec![1.0.into()]).is_err());
    }

    #[test]
    fn json_has_schema_and_units() {
        let v = sample().to_json();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["columns"][0]["unit"], "a.u.");
        assert_eq!(v["rows"][1]["label"], "B");
    }
}
