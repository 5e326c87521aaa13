use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ID_COLUMNS: [&str; 3] = ["source_id", "label", "order"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub source_id: String,
    pub label: String,
    pub order: usize,
    pub values: Vec<f64>,
}

/// Feature matrix: one row per record and embedding order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub rows: Vec<FeatureRow>,
}

/// A record left out of the feature matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub source_id: String,
    pub label: String,
    pub order: usize,
    pub reason: String,
}

fn csv_field(s: &str) -> Result<&str> {
    if s.contains([',', '\n', '\r', '"']) {
        return Err(Error::InvalidInput(format!(
            "identifier {s:?} cannot be written to CSV"
        )));
    }
    Ok(s)
}

impl FeatureTable {
    pub fn orders(&self) -> Vec<usize> {
        let mut o: Vec<usize> = self.rows.iter().map(|r| r.order).collect();
        o.sort_unstable();
        o.dedup();
        o
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Keeps only the named feature columns, in the given order.
    pub fn select(&self, names: &[String]) -> Result<FeatureTable> {
        let idx = names
            .iter()
            .map(|n| {
                self.column(n).ok_or_else(|| {
                    Error::InvalidConfig(format!(
                        "feature `{n}` is not in the table (available: {})",
                        self.names.join(", ")
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FeatureTable {
            names: names.to_vec(),
            rows: self
                .rows
                .iter()
                .map(|r| FeatureRow {
                    values: idx.iter().map(|&i| r.values[i]).collect(),
                    ..r.clone()
                })
                .collect(),
        })
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = ID_COLUMNS.join(",");
        for n in &self.names {
            write!(out, ",{}", csv_field(n)?).unwrap();
        }
        out.push('\n');
        for r in &self.rows {
            write!(out, "{},{},{}", csv_field(&r.source_id)?, csv_field(&r.label)?, r.order).unwrap();
            for v in &r.values {
                write!(out, ",{v:.16e}").unwrap();
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn parse_csv(text: &str, path: &Path) -> Result<FeatureTable> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| parse_err(0, "empty feature file".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 4 || cols[..3] != ID_COLUMNS {
            return Err(parse_err(
                1,
                format!(
                    "header must start with {} followed by feature names",
                    ID_COLUMNS.join(",")
                ),
            ));
        }
        let names: Vec<String> = cols[3..].iter().map(|s| s.to_string()).collect();
        let mut rows = Vec::new();
        for (i, line) in lines {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != cols.len() {
                return Err(parse_err(
                    i + 1,
                    format!("expected {} fields, found {}", cols.len(), f.len()),
                ));
            }
            let order = f[2]
                .parse()
                .map_err(|_| parse_err(i + 1, format!("invalid order {:?}", f[2])))?;
            let values = f[3..]
                .iter()
                .map(|v| {
                    v.parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| parse_err(i + 1, format!("invalid feature value {v:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(FeatureRow {
                source_id: f[0].to_string(),
                label: f[1].to_string(),
                order,
                values,
            });
        }
        Ok(FeatureTable { names, rows })
    }

    pub fn read(path: &Path) -> Result<FeatureTable> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text, path)
    }
}

pub fn exclusions_csv(items: &[Exclusion]) -> String {
    let mut out = String::from("source_id,label,order,reason\n");
    for e in items {
        // reasons are free text; keep the file one record per line
        let reason = e.reason.replace([',', '\n', '\r'], ";");
        writeln!(out, "{},{},{},{}", e.source_id, e.label, e.order, reason).unwrap();
    }
    out
}
