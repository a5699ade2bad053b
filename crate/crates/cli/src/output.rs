//! Deterministic file output: tables as CSV (with a config-echo header) or
//! JSON, plus JSON summaries. No timestamps or machine state go into any
//! file, so reruns from the echoed config are byte-identical.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use spinvalve_core::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::validation(format!("unknown format '{other}' (csv|json)"))),
        }
    }
}

/// One table cell.
#[derive(Debug, Clone)]
pub enum Cell {
    /// Scientific notation with 12 digits; the working numeric format.
    Float(f64),
    /// Shortest round-trip form; for grid coordinates and parameters.
    Exact(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn write_csv(&self, line: &mut String) {
        use std::fmt::Write as _;
        match self {
            Cell::Float(v) if v.is_finite() => {
                let _ = write!(line, "{v:.12e}");
            }
            Cell::Float(v) => {
                let _ = write!(line, "{v}");
            }
            Cell::Exact(v) => {
                let _ = write!(line, "{v}");
            }
            Cell::Int(v) => {
                let _ = write!(line, "{v}");
            }
            Cell::Bool(v) => {
                let _ = write!(line, "{}", if *v { 1 } else { 0 });
            }
            Cell::Text(s) => line.push_str(s),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Float(v) | Cell::Exact(v) => {
                if v.is_finite() {
                    json!(v)
                } else {
                    json!(v.to_string())
                }
            }
            Cell::Int(v) => json!(v),
            Cell::Bool(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

/// An in-memory result table, writable in either format.
pub struct Table {
    pub command: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str, columns: &[&'static str]) -> Self {
        Table {
            command: command.to_string(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }
}

pub struct OutputDir {
    dir: PathBuf,
    echo: String,
    format: Format,
}

impl OutputDir {
    pub fn create(dir: &Path, echo: String, format: Format) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| {
            Error::validation(format!("cannot create output dir {}: {e}", dir.display()))
        })?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            echo,
            format,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Write a table under `stem.csv` or `stem.json` per the selected format.
    pub fn table(&self, stem: &str, table: &Table) -> Result<PathBuf> {
        match self.format {
            Format::Csv => self.write_csv(stem, table),
            Format::Json => self.write_table_json(stem, table),
        }
    }

    fn open(&self, name: &str) -> Result<(BufWriter<File>, PathBuf)> {
        let path = self.path(name);
        let file = File::create(&path)
            .map_err(|e| Error::validation(format!("cannot write {}: {e}", path.display())))?;
        Ok((BufWriter::new(file), path))
    }

    fn write_csv(&self, stem: &str, table: &Table) -> Result<PathBuf> {
        let (mut w, path) = self.open(&format!("{stem}.csv"))?;
        let io = (|| -> std::io::Result<()> {
            writeln!(w, "# spinvalve {}", table.command)?;
            writeln!(w, "# config = {}", self.echo)?;
            writeln!(w, "{}", table.columns.join(","))?;
            let mut line = String::new();
            for row in &table.rows {
                line.clear();
                for (k, cell) in row.iter().enumerate() {
                    if k > 0 {
                        line.push(',');
                    }
                    cell.write_csv(&mut line);
                }
                writeln!(w, "{line}")?;
            }
            w.flush()
        })();
        io.map_err(|e| Error::validation(format!("write {}: {e}", path.display())))?;
        Ok(path)
    }

    fn write_table_json(&self, stem: &str, table: &Table) -> Result<PathBuf> {
        let config: Value = serde_json::from_str(&self.echo).expect("echo is valid JSON");
        let rows: Vec<Value> = table
            .rows
            .iter()
            .map(|row| {
                let mut object = Map::new();
                for (name, cell) in table.columns.iter().zip(row) {
                    object.insert(name.to_string(), cell.to_json());
                }
                Value::Object(object)
            })
            .collect();
        let document = json!({
            "command": table.command,
            "config": config,
            "rows": rows,
        });
        self.json(&format!("{stem}.json"), &document)
    }

    pub fn json<T: serde::Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let (mut w, path) = self.open(name)?;
        serde_json::to_writer_pretty(&mut w, value)
            .map_err(|e| Error::validation(format!("serialize {}: {e}", path.display())))?;
        w.write_all(b"\n")
            .and_then(|_| w.flush())
            .map_err(|e| Error::validation(format!("write {}: {e}", path.display())))?;
        Ok(path)
    }

    pub fn echo(&self) -> &str {
        &self.echo
    }

    pub fn format(&self) -> Format {
        self.format
    }
}
