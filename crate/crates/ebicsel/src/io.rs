//! CSV input (header row, response column `y` first) and CSV export.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ebicsel_core::glm_fit::Dataset;

use crate::error::{AppError, AppResult};

/// Reads a dataset from a CSV file.
pub fn read_dataset(path: &Path) -> AppResult<Dataset> {
    let file = File::open(path).map_err(|e| AppError::io(path, e))?;
    parse_dataset(BufReader::new(file))
}

/// Parses CSV text whose first column is the response `y` and whose other
/// columns are covariates. Missing or non-numeric cells are rejected with
/// the offending row (1-based, header excluded) and column named.
pub fn parse_dataset<R: Read>(reader: R) -> AppResult<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| AppError::Data(format!("cannot read header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    match header.first() {
        Some(h) if h == "y" => {}
        Some(h) => {
            return Err(AppError::Data(format!(
                "first column must be `y`, found `{h}`"
            )))
        }
        None => return Err(AppError::Data("empty header".into())),
    }
    let width = header.len();
    if width < 2 {
        return Err(AppError::Data("no covariate columns".into()));
    }
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); width];
    let mut record = csv::StringRecord::new();
    let mut row = 0usize;
    loop {
        let more = rdr.read_record(&mut record).map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { .. } => {
                AppError::Data(format!("row {}: wrong number of fields", row + 1))
            }
            _ => AppError::Data(format!("row {}: {e}", row + 1)),
        })?;
        if !more {
            break;
        }
        row += 1;
        for (j, cell) in record.iter().enumerate() {
            columns[j].push(parse_cell(cell, row, &header[j])?);
        }
    }
    let n = row;
    let mut iter = columns.into_iter();
    let y = iter.next().unwrap_or_default();
    let mut x = Vec::with_capacity(n * (width - 1));
    for col in iter {
        x.extend(col);
    }
    let data = Dataset::from_columns(y, x, width - 1)?;
    Ok(data.with_names(header[1..].to_vec())?)
}

fn parse_cell(cell: &str, row: usize, column: &str) -> AppResult<f64> {
    if cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan") {
        return Err(AppError::Data(format!(
            "row {row}, column `{column}`: missing value"
        )));
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(AppError::Data(format!(
            "row {row}, column `{column}`: non-finite value `{cell}`"
        ))),
        Err(_) => Err(AppError::Data(format!(
            "row {row}, column `{column}`: cannot parse `{cell}`"
        ))),
    }
}

/// Default column names `x1 … xp` when a dataset carries none.
pub fn feature_names(data: &Dataset) -> Vec<String> {
    match data.names() {
        Some(names) => names.to_vec(),
        None => (1..=data.p()).map(|j| format!("x{j}")).collect(),
    }
}

/// Writes a dataset in the format [`read_dataset`] accepts. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn write_dataset(path: &Path, data: &Dataset) -> AppResult<()> {
    let file = File::create(path).map_err(|e| AppError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut line = String::from("y");
    for name in feature_names(data) {
        line.push(',');
        line.push_str(&name);
    }
    line.push('\n');
    w.write_all(line.as_bytes())
        .map_err(|e| AppError::io(path, e))?;
    line.clear();
    for i in 0..data.n() {
        line.push_str(&data.y()[i].to_string());
        for j in 0..data.p() {
            line.push(',');
            line.push_str(&data.get(i, j).to_string());
        }
        line.push('\n');
        w.write_all(line.as_bytes())
            .map_err(|e| AppError::io(path, e))?;
        line.clear();
    }
    w.flush().map_err(|e| AppError::io(path, e))
}
