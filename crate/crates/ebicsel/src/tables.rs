//! Tab-separated result tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join("\t"));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join("\t"));
        }
        out
    }

    pub fn write(&self, path: &Path) -> AppResult<()> {
        fs::write(path, self.to_tsv()).map_err(|e| AppError::io(path, e))
    }

    /// Cell at `row` under column `name`.
    pub fn cell(&self, row: usize, name: &str) -> Option<&str> {
        let col = self.header.iter().position(|h| h == name)?;
        self.rows.get(row).map(|r| r[col].as_str())
    }
}

/// Shortest round-trip representation, in exponent form for very small or
/// very large magnitudes; `NA` for NaN.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v.is_nan() {
        "NA".into()
    } else if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), num)
}

/// 1-based feature ids joined by commas.
pub fn feature_list(features: &[usize]) -> String {
    features
        .iter()
        .map(|j| (j + 1).to_string())
        .collect::<Vec<_>>()
        .join(",")
}
