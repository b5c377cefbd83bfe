//! Plain-text output tables: a `#`-prefixed metadata block, one header line,
//! then comma-separated rows. Floats use the shortest round-trip form.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::dgsolver::{DgSolver, SolutionField};
use crate::error::{Error, Result};
use crate::state::{Species, COMPONENT_NAMES};

/// A delimited table with metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

fn write_row(out: &mut String, row: &[f64]) {
    for (i, v) in row.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v:e}");
    }
    out.push('\n');
}

fn meta_block(meta: &[(String, String)]) -> String {
    meta.iter().map(|(k, v)| format!("# {k} = {v}\n")).collect()
}

impl Table {
    pub fn to_text(&self) -> String {
        let mut s = meta_block(&self.meta);
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for r in &self.rows {
            write_row(&mut s, r);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut meta = Vec::new();
        let mut lines = text.lines().enumerate();
        let columns = loop {
            let (i, line) = lines.next().ok_or_else(|| Error::Parse("missing header line".into()))?;
            if let Some(m) = line.strip_prefix('#') {
                let (k, v) = m
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("line {}: malformed metadata `{line}`", i + 1)))?;
                meta.push((k.trim().to_string(), v.trim().to_string()));
            } else {
                break line.split(',').map(str::to_string).collect::<Vec<_>>();
            }
        };
        let mut rows = Vec::new();
        for (i, line) in lines {
            let row = line
                .split(',')
                .map(|v| v.parse::<f64>().map_err(|_| Error::Parse(format!("line {}: bad number `{v}`", i + 1))))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != columns.len() {
                return Err(Error::Parse(format!("line {}: {} values for {} columns", i + 1, row.len(), columns.len())));
            }
            rows.push(row);
        }
        Ok(Table { meta, columns, rows })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Snapshot columns: coordinates, the 18 components, then `rho`, `p` and the
/// Lorentz factor of each species.
pub fn snapshot_columns(dim: usize) -> Vec<String> {
    let mut c: Vec<String> = if dim == 2 { vec!["x".into(), "y".into()] } else { vec!["x".into()] };
    c.extend(COMPONENT_NAMES.iter().map(|s| s.to_string()));
    for s in ["i", "e"] {
        c.extend([format!("rho_{s}"), format!("p_{s}"), format!("lorentz_{s}")]);
    }
    c
}

pub fn snapshot(
    solver: &DgSolver,
    field: &SolutionField,
    mut meta: Vec<(String, String)>,
    t: f64,
    step: usize,
) -> Result<Table> {
    let prims = field.primitives(&solver.params)?;
    meta.extend([
        ("t".to_string(), format!("{t:e}")),
        ("step".to_string(), step.to_string()),
        ("k".to_string(), solver.k().to_string()),
        ("nx".to_string(), field.nx.to_string()),
        ("ny".to_string(), field.ny.to_string()),
    ]);
    let rows = field
        .data
        .iter()
        .zip(solver.coordinates())
        .zip(&prims)
        .map(|((u, &(x, y)), w)| {
            let mut r = Vec::with_capacity(26);
            r.push(x);
            if field.dim == 2 {
                r.push(y);
            }
            r.extend_from_slice(u);
            for s in Species::BOTH {
                let sp = w.species(s);
                r.extend([sp.rho, sp.p, sp.lorentz_unchecked()]);
            }
            r
        })
        .collect();
    Ok(Table { meta, columns: snapshot_columns(field.dim), rows })
}

/// Streaming time-series writer; rows are flushed as they arrive.
pub struct SeriesWriter {
    out: BufWriter<File>,
    pub path: PathBuf,
    width: usize,
}

impl SeriesWriter {
    pub fn create(path: &Path, meta: &[(String, String)], columns: &[String]) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(meta_block(meta).as_bytes())?;
        writeln!(out, "{}", columns.join(","))?;
        Ok(SeriesWriter { out, path: path.to_path_buf(), width: columns.len() })
    }

    pub fn push(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.width {
            return Err(Error::Shape { expected: self.width, got: row.len() });
        }
        let mut s = String::new();
        write_row(&mut s, row);
        self.out.write_all(s.as_bytes())?;
        self.out.flush()?;
        Ok(())
    }
}
