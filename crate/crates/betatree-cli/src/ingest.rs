//! CSV ingestion: numeric matrix with optional header and column selection.

use std::path::Path;

use betatree::PointMatrix;

use crate::error::CliError;

pub struct IngestOptions {
    pub delimiter: u8,
    pub header: bool,
    /// Column names (with --header) or 0-based indices; `None` keeps all.
    pub columns: Option<Vec<String>>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { delimiter: b',', header: false, columns: None }
    }
}

/// Read the selected columns into an n x d matrix; every selected cell must
/// parse as a finite number. Returns the matrix with the column labels.
pub fn ingest_csv(
    path: &Path,
    opts: &IngestOptions,
) -> Result<(PointMatrix, Vec<String>), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(opts.header)
        .flexible(false)
        .from_path(path)?;

    let header_names: Vec<String> = if opts.header {
        reader.headers()?.iter().map(|s| s.trim().to_string()).collect()
    } else {
        Vec::new()
    };

    let mut selected: Option<Vec<usize>> = None;
    let mut labels: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();

    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if selected.is_none() {
            let width = record.len();
            let idx = resolve_columns(opts, &header_names, width)?;
            labels = idx
                .iter()
                .map(|&i| {
                    header_names
                        .get(i)
                        .cloned()
                        .unwrap_or_else(|| format!("c{i}"))
                })
                .collect();
            selected = Some(idx);
        }
        let idx = selected.as_ref().unwrap();
        let mut row = Vec::with_capacity(idx.len());
        for (&i, label) in idx.iter().zip(&labels) {
            let raw = record.get(i).ok_or_else(|| CliError::Parse {
                line,
                column: label.clone(),
                value: "<missing>".into(),
            })?;
            let value: f64 = raw.trim().parse().map_err(|_| CliError::Parse {
                line,
                column: label.clone(),
                value: raw.to_string(),
            })?;
            if !value.is_finite() {
                return Err(CliError::Parse {
                    line,
                    column: label.clone(),
                    value: raw.to_string(),
                });
            }
            row.push(value);
        }
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(CliError::EmptySelection("the file holds no data rows".into()));
    }
    let matrix = PointMatrix::from_rows(&rows)?;
    Ok((matrix, labels))
}

fn resolve_columns(
    opts: &IngestOptions,
    header_names: &[String],
    width: usize,
) -> Result<Vec<usize>, CliError> {
    let Some(wanted) = &opts.columns else {
        if width == 0 {
            return Err(CliError::EmptySelection("rows have no fields".into()));
        }
        return Ok((0..width).collect());
    };
    if wanted.is_empty() {
        return Err(CliError::EmptySelection("--columns is empty".into()));
    }
    let mut idx = Vec::with_capacity(wanted.len());
    for name in wanted {
        let by_name = header_names.iter().position(|h| h == name);
        let i = match by_name {
            Some(i) => i,
            None => name.parse::<usize>().map_err(|_| {
                CliError::EmptySelection(format!(
                    "column '{name}' is neither a header name nor an index"
                ))
            })?,
        };
        if i >= width {
            return Err(CliError::EmptySelection(format!(
                "column {i} out of range; rows have {width} fields"
            )));
        }
        idx.push(i);
    }
    Ok(idx)
}

/// Write a matrix as CSV with an x1..xd header.
pub fn write_csv(path: &Path, data: &PointMatrix) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)?;
    let header: Vec<String> = (1..=data.dim()).map(|i| format!("x{i}")).collect();
    writer.write_record(&header)?;
    for row in data.rows() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        writer.write_record(&fields)?;
    }
    writer.flush()?;
    Ok(())
}
