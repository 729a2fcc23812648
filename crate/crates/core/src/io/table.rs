use std::path::Path;

use crate::error::{Error, Result};

/// A named-column numeric table, the shape of every curve file.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::invalid("csv", e.to_string());
        w.write_record(&self.columns).map_err(err)?;
        for r in &self.rows {
            w.serialize(r).map_err(err)?;
        }
        w.into_inner().map_err(|e| Error::invalid("csv", e.to_string()))
    }
}

pub fn read_table(path: impl AsRef<Path>) -> Result<Table> {
    let path = path.as_ref();
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Parse { row: 0, reason: format!("{other:?}") },
        })?;
    let columns: Vec<String> = r
        .headers()
        .map_err(|e| Error::Parse { row: 1, reason: e.to_string() })?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (i, rec) in r.deserialize::<Vec<f64>>().enumerate() {
        let row = rec.map_err(|e| Error::Parse {
            row: i + 2,
            reason: format!("{}: {e}", path.display()),
        })?;
        if row.len() != columns.len() {
            return Err(Error::Parse {
                row: i + 2,
                reason: format!("{}: expected {} columns", path.display(), columns.len()),
            });
        }
        rows.push(row);
    }
    Ok(Table { columns, rows })
}
