//! Plot-ready tables: CSV with 17 significant digits and LF endings, or a
//! JSON object with a `meta` echo and `rows`.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    /// Bare token; must not contain commas or line breaks.
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> f64 {
        match self {
            Cell::Int(i) => *i as f64,
            Cell::Float(x) => *x,
            Cell::Text(_) => f64::NAN,
        }
    }

    fn write_csv(&self, out: &mut String) {
        match self {
            Cell::Int(i) => write!(out, "{i}").unwrap(),
            // 16 digits after the point: 17 significant, enough to round-trip.
            Cell::Float(x) => write!(out, "{x:.16e}").unwrap(),
            Cell::Text(t) => out.push_str(t),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<&str> for Cell {
    fn from(t: &str) -> Self {
        Cell::Text(t.to_string())
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

pub fn rta_columns() -> Vec<String> {
    ["gamma", "k", "R", "T", "A", "t_obs", "norm_final", "absorbed_integral"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

/// `index,re_lambda,im_lambda` plus `occ_1..occ_L` when `sites` is given.
pub fn spectrum_columns(sites: Option<usize>) -> Vec<String> {
    let mut cols: Vec<String> = ["index", "re_lambda", "im_lambda"].iter().map(|s| s.to_string()).collect();
    if let Some(l) = sites {
        cols.extend((1..=l).map(|j| format!("occ_{j}")));
    }
    cols
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::DimensionMismatch { expected: self.columns.len(), got: row.len() });
        }
        if let Some(Cell::Text(t)) = row.iter().find(|c| matches!(c, Cell::Text(t) if t.contains([',', '\n', '\r']))) {
            return Err(Error::InvalidParameter(format!("text cell {t:?} contains a separator")));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, c) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                c.write_csv(&mut out);
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::InvalidParameter("empty CSV".into()))?;
        let mut table = Table::new(header.split(','));
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(parse_cell)
                .collect();
            table.push(row)?;
        }
        Ok(table)
    }

    /// `{"meta": ..., "rows": [{column: value, ...}, ...]}`.
    pub fn to_json(&self, meta: &Value) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj = self.columns.iter().zip(row).map(|(c, v)| (c.clone(), json!(v))).collect();
                Value::Object(obj)
            })
            .collect();
        json!({ "meta": meta, "rows": rows })
    }

    /// Writes the table; CSV output gets the metadata in `<path>.meta.json`.
    pub fn write(&self, path: &Path, format: Format, meta: &Value) -> Result<()> {
        match format {
            Format::Csv => {
                write_file(path, self.to_csv().as_bytes())?;
                let side = sidecar_path(path);
                write_file(&side, pretty(meta).as_bytes())
            }
            Format::Json => write_file(path, pretty(&self.to_json(meta)).as_bytes()),
        }
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Self::from_csv(&text)
    }
}

fn parse_cell(f: &str) -> Cell {
    if let Ok(i) = f.parse() {
        Cell::Int(i)
    } else if let Ok(x) = f.parse() {
        Cell::Float(x)
    } else {
        Cell::Text(f.to_string())
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialise");
    s.push('\n');
    s
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    name.into()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source }
}
