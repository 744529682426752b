use std::path::Path;

use super::{DataError, FeatureSchema};

/// Rectangular table of raw string cells with a header row.
///
/// Cells are stored flat, row-major; `width` is the header width and every
/// row has exactly that many cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTable {
    header: Vec<String>,
    width: usize,
    cells: Vec<String>,
}

impl RawTable {
    pub fn new(header: Vec<String>) -> Self {
        let width = header.len();
        RawTable {
            header,
            width,
            cells: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) -> Result<(), DataError> {
        if row.len() != self.width {
            return Err(DataError::RaggedRow {
                row: self.n_rows(),
                expected: self.width,
                got: row.len(),
            });
        }
        self.cells.extend(row);
        Ok(())
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn n_rows(&self) -> usize {
        if self.width == 0 {
            0
        } else {
            self.cells.len() / self.width
        }
    }

    pub fn n_cols(&self) -> usize {
        self.width
    }

    pub fn row(&self, i: usize) -> &[String] {
        &self.cells[i * self.width..(i + 1) * self.width]
    }

    pub fn cell(&self, row: usize, col: usize) -> &str {
        &self.cells[row * self.width + col]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Load a comma-separated, UTF-8, header-first file whose header must match
/// the schema's column names in order. Ragged rows are reported with their
/// 0-based data row index.
pub fn load_csv(path: &Path, schema: &FeatureSchema) -> Result<RawTable, DataError> {
    schema.validate()?;
    let file = std::fs::File::open(path).map_err(|e| DataError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(std::io::BufReader::new(file));

    let header: Vec<String> = reader
        .headers()
        .map_err(|e| DataError::Csv {
            row: 0,
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();
    let expected: Vec<&str> = schema.columns.iter().map(|c| c.name.as_str()).collect();
    if header.len() != expected.len() || header.iter().zip(&expected).any(|(h, e)| h != e) {
        let missing = expected
            .iter()
            .find(|e| !header.iter().any(|h| h == *e))
            .map(|s| s.to_string())
            .unwrap_or_else(|| format!("header {header:?} does not match schema order"));
        return Err(DataError::MissingColumn(missing));
    }

    let mut table = RawTable::new(header);
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| DataError::Csv {
            row: i,
            message: e.to_string(),
        })?;
        if record.len() != table.n_cols() {
            return Err(DataError::RaggedRow {
                row: i,
                expected: table.n_cols(),
                got: record.len(),
            });
        }
        table.push_row(record.iter().map(str::to_string).collect())?;
    }
    Ok(table)
}
