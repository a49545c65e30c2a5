//! Delimiter-separated returns files.

use std::path::Path;

use crate::error::{CliError, CliResult};

/// Rows needed to estimate cumulants through ζ₄.
pub const MIN_ROWS: usize = 8;

/// Per-period returns, one column per asset.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsTable {
    pub names: Vec<String>,
    /// `columns[j]` holds every row of asset j.
    pub columns: Vec<Vec<f64>>,
    pub period: String,
}

impl ReturnsTable {
    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }
}

/// Tab if the header line contains one, otherwise comma.
pub fn detect_delimiter(text: &str) -> u8 {
    let header = text.lines().next().unwrap_or("");
    if header.contains('\t') {
        b'\t'
    } else {
        b','
    }
}

pub fn read_table(path: &Path, delimiter: Option<u8>, period: &str) -> CliResult<ReturnsTable> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_table(&text, delimiter, period)
}

pub fn parse_table(text: &str, delimiter: Option<u8>, period: &str) -> CliResult<ReturnsTable> {
    let delimiter = delimiter.unwrap_or_else(|| detect_delimiter(text));
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());

    let names: Vec<String> = rdr
        .headers()
        .map_err(|e| CliError::Input(format!("header: {e}")))?
        .iter()
        .map(str::to_owned)
        .collect();
    if names.is_empty() || names.iter().all(String::is_empty) {
        return Err(CliError::Input("header row is empty".into()));
    }
    for (j, name) in names.iter().enumerate() {
        if name.is_empty() {
            return Err(CliError::Input(format!("column {} has an empty asset name", j + 1)));
        }
        if names[..j].contains(name) {
            return Err(CliError::Input(format!("duplicate asset name '{name}' in column {}", j + 1)));
        }
    }

    let mut columns = vec![Vec::new(); names.len()];
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| CliError::Input(format!("row {row}: {e}")))?;
        if record.len() != names.len() {
            return Err(CliError::Input(format!(
                "row {row} has {} cells, expected {}",
                record.len(),
                names.len()
            )));
        }
        for (j, cell) in record.iter().enumerate() {
            let name = &names[j];
            if cell.is_empty() {
                return Err(CliError::Input(format!("missing value at row {row}, column '{name}'")));
            }
            let v: f64 = cell.parse().map_err(|_| {
                CliError::Input(format!("non-numeric value '{cell}' at row {row}, column '{name}'"))
            })?;
            if !v.is_finite() {
                return Err(CliError::Input(format!("non-finite value '{cell}' at row {row}, column '{name}'")));
            }
            columns[j].push(v);
        }
    }
    let rows = columns[0].len();
    if rows < MIN_ROWS {
        return Err(CliError::Input(format!("{rows} data rows, need at least {MIN_ROWS}")));
    }
    Ok(ReturnsTable {
        names,
        columns,
        period: period.to_owned(),
    })
}
