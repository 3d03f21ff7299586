//! Discrete datasets: value-indexed cells with per-variable arities and
//! state labels, plus the CSV interchange format.

use std::collections::HashMap;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::ParseError;

#[derive(Debug, Error)]
pub enum DataError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("missing value at row {row}, column `{column}`")]
    MissingValue { row: usize, column: String },
    #[error("variable `{label}` needs arity >= 2, got {arity}")]
    ArityTooSmall { label: String, arity: usize },
    #[error("variable `{label}`: value index {value} exceeds declared arity {arity}")]
    ValueOutOfRange { label: String, value: usize, arity: usize },
    #[error("dataset has no variables")]
    NoVariables,
}

/// Complete-data discrete table. Cell values index into each variable's
/// state list; `states[v].len()` is the arity of `v` and is always >= 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    labels: Vec<String>,
    states: Vec<Vec<String>>,
    cells: Vec<usize>,
    rows: usize,
}

impl Dataset {
    pub fn new(
        labels: Vec<String>,
        states: Vec<Vec<String>>,
        rows: Vec<Vec<usize>>,
    ) -> Result<Self, DataError> {
        if labels.is_empty() {
            return Err(DataError::NoVariables);
        }
        assert_eq!(labels.len(), states.len());
        for (label, sts) in labels.iter().zip(&states) {
            if sts.len() < 2 {
                return Err(DataError::ArityTooSmall { label: label.clone(), arity: sts.len() });
            }
        }
        let n = labels.len();
        let mut cells = Vec::with_capacity(rows.len() * n);
        for row in &rows {
            assert_eq!(row.len(), n, "ragged row");
            for (v, &value) in row.iter().enumerate() {
                if value >= states[v].len() {
                    return Err(DataError::ValueOutOfRange {
                        label: labels[v].clone(),
                        value,
                        arity: states[v].len(),
                    });
                }
                cells.push(value);
            }
        }
        Ok(Dataset { labels, states, cells, rows: rows.len() })
    }

    /// Integer-valued rows with synthesized state labels `"0".."k-1"`.
    pub fn from_integer_rows(
        labels: Vec<String>,
        arities: Vec<usize>,
        rows: Vec<Vec<usize>>,
    ) -> Result<Self, DataError> {
        let states = arities
            .iter()
            .map(|&k| (0..k).map(|s| s.to_string()).collect())
            .collect();
        Dataset::new(labels, states, rows)
    }

    pub fn n_vars(&self) -> usize {
        self.labels.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn arity(&self, v: usize) -> usize {
        self.states[v].len()
    }

    pub fn states(&self, v: usize) -> &[String] {
        &self.states[v]
    }

    #[inline]
    pub fn value(&self, row: usize, v: usize) -> usize {
        self.cells[row * self.labels.len() + v]
    }

    /// Loads the CSV interchange format: a header of variable labels, then
    /// one row per record. By default cells are state labels, indexed in
    /// first-appearance order; with `integer_states` they are parsed as
    /// non-negative integers. Arity is inferred as the largest index + 1
    /// unless declared via `declared_arities`. Missing (empty) cells are
    /// rejected.
    pub fn read_csv<R: io::Read>(reader: R, opts: &CsvOptions) -> Result<Self, DataError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let labels: Vec<String> =
            rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        if labels.is_empty() || labels.iter().all(|l| l.is_empty()) {
            return Err(DataError::NoVariables);
        }
        let n = labels.len();

        let mut value_maps: Vec<HashMap<String, usize>> = vec![HashMap::new(); n];
        let mut states: Vec<Vec<String>> = vec![Vec::new(); n];
        let mut rows: Vec<Vec<usize>> = Vec::new();
        for (ridx, record) in rdr.records().enumerate() {
            let record = record?;
            let mut row = Vec::with_capacity(n);
            for v in 0..n {
                let cell = record.get(v).unwrap_or("").trim();
                if cell.is_empty() {
                    return Err(DataError::MissingValue {
                        row: ridx + 1,
                        column: labels[v].clone(),
                    });
                }
                let value = if opts.integer_states {
                    cell.parse::<usize>().map_err(|_| {
                        ParseError::new(
                            ridx + 2,
                            format!("`{cell}` is not a non-negative integer (column `{}`)", labels[v]),
                        )
                    })?
                } else {
                    let next = value_maps[v].len();
                    *value_maps[v].entry(cell.to_string()).or_insert(next)
                };
                while states[v].len() <= value {
                    let filler = if opts.integer_states {
                        states[v].len().to_string()
                    } else {
                        cell.to_string()
                    };
                    states[v].push(filler);
                }
                row.push(value);
            }
            rows.push(row);
        }

        // Widen to any declared arities, then validate.
        for v in 0..n {
            if let Some(&declared) = opts.declared_arities.get(&labels[v]) {
                let seen = states[v].len();
                if declared < seen {
                    return Err(DataError::ValueOutOfRange {
                        label: labels[v].clone(),
                        value: seen - 1,
                        arity: declared,
                    });
                }
                while states[v].len() < declared {
                    let filler = states[v].len().to_string();
                    states[v].push(filler);
                }
            }
        }
        Dataset::new(labels, states, rows)
    }

    pub fn read_csv_path(path: &Path, opts: &CsvOptions) -> Result<Self, DataError> {
        Self::read_csv(std::fs::File::open(path)?, opts)
    }

    /// Writes the CSV form with state labels as cells.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<(), DataError> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(&self.labels)?;
        for row in 0..self.rows {
            let record: Vec<&str> =
                (0..self.n_vars()).map(|v| self.states[v][self.value(row, v)].as_str()).collect();
            wtr.write_record(&record)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn write_csv_path(&self, path: &Path) -> Result<(), DataError> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    pub integer_states: bool,
    pub declared_arities: HashMap<String, usize>,
}

/// Sidecar arity declarations: one `label:arity` entry per line, `#`
/// comments and blanks ignored.
pub fn parse_arity_sidecar(text: &str) -> Result<HashMap<String, usize>, ParseError> {
    let mut out = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (label, arity) = line
            .split_once(':')
            .ok_or_else(|| ParseError::new(idx + 1, "expected `label:arity`"))?;
        let arity: usize = arity
            .trim()
            .parse()
            .map_err(|_| ParseError::new(idx + 1, "arity must be a positive integer"))?;
        out.insert(label.trim().to_string(), arity);
    }
    Ok(out)
}
