//! LIBSVM / svmlight text format: `label idx:val idx:val ...` with 1-based,
//! strictly ascending feature indices.

use std::io::{BufRead, Write};

use super::sparse::SparseColumnMatrix;
use crate::error::{Error, Result};

/// Parsed samples. `matrix` is features x samples, one column per line.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub matrix: SparseColumnMatrix,
    pub labels: Vec<f64>,
}

impl LabeledDataset {
    pub fn n_features(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Parses LIBSVM text. The feature count is the largest index seen unless
/// `n_features` overrides it (files may omit trailing zero features).
pub fn parse_libsvm<R: BufRead>(reader: R, n_features: Option<usize>) -> Result<LabeledDataset> {
    let mut labels = Vec::new();
    let mut columns: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut max_index = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let mut tokens = content.split_whitespace();
        let Some(label_tok) = tokens.next() else { continue };
        let label: f64 = label_tok
            .parse()
            .map_err(|_| parse_err(lineno, format!("non-numeric label '{label_tok}'")))?;
        if !label.is_finite() {
            return Err(parse_err(lineno, "non-finite label"));
        }
        let mut entries = Vec::new();
        let mut prev = 0usize;
        for tok in tokens {
            let (idx_s, val_s) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(lineno, format!("malformed entry '{tok}'")))?;
            let idx: usize = idx_s
                .parse()
                .map_err(|_| parse_err(lineno, format!("non-numeric index '{idx_s}'")))?;
            if idx < 1 {
                return Err(parse_err(lineno, "index below 1"));
            }
            if idx <= prev {
                return Err(parse_err(lineno, "non-ascending index"));
            }
            prev = idx;
            let val: f64 = val_s
                .parse()
                .map_err(|_| parse_err(lineno, format!("non-numeric value '{val_s}'")))?;
            if !val.is_finite() {
                return Err(parse_err(lineno, "non-finite value"));
            }
            entries.push((idx - 1, val));
        }
        max_index = max_index.max(prev);
        labels.push(label);
        columns.push(entries);
    }
    let nrows = match n_features {
        Some(n) if n < max_index => {
            return Err(Error::InvalidParameter(format!(
                "feature override {n} is smaller than largest index {max_index}"
            )))
        }
        Some(n) => n,
        None => max_index,
    };
    let matrix = SparseColumnMatrix::from_columns(nrows, &columns)?;
    Ok(LabeledDataset { matrix, labels })
}

/// Writes the dataset back in LIBSVM text form (shortest round-trip floats).
pub fn write_libsvm<W: Write>(data: &LabeledDataset, mut out: W) -> std::io::Result<()> {
    for (j, label) in data.labels.iter().enumerate() {
        write!(out, "{label}")?;
        let (rows, vals) = data.matrix.column(j);
        for (r, v) in rows.iter().zip(vals) {
            write!(out, " {}:{}", r + 1, v)?;
        }
        writeln!(out)?;
    }
    Ok(())
}
