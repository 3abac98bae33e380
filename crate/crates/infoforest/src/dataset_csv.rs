//! Dataset CSV: one row per sample, `k` real feature columns then a `0`/`1`
//! label column. Lines beginning with `#` are ignored.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use infoforest_core::{Dataset, Forest, Prediction};

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("{0}")]
    Invalid(#[from] infoforest_core::Error),
    #[error("expected {expected} feature columns (optionally followed by a label), found {found} columns")]
    DimensionMismatch { expected: usize, found: usize },
}

impl CsvError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        CsvError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// Numeric rows of a CSV document, all of equal width.
fn parse_rows(bytes: &[u8]) -> Result<Vec<Vec<f64>>, CsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CsvError::Malformed {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        let row = record
            .iter()
            .map(|field| {
                let v: f64 = field.parse().map_err(|_| CsvError::Malformed {
                    line,
                    message: format!("`{field}` is not a number"),
                })?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(CsvError::Malformed {
                        line,
                        message: format!("non-finite value `{field}`"),
                    })
                }
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(CsvError::Malformed {
                    line,
                    message: format!("expected {} columns, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CsvError::Malformed {
            line: 0,
            message: "no data rows".into(),
        });
    }
    Ok(rows)
}

fn parse_label(v: f64, line: usize) -> Result<u8, CsvError> {
    match v {
        0.0 => Ok(0),
        1.0 => Ok(1),
        _ => Err(CsvError::Malformed {
            line: line as u64,
            message: format!("label {v} is not 0 or 1"),
        }),
    }
}

fn split_labels(rows: Vec<Vec<f64>>) -> Result<Dataset, CsvError> {
    let width = rows[0].len();
    if width < 2 {
        return Err(CsvError::Malformed {
            line: 1,
            message: "need at least one feature and a label".into(),
        });
    }
    let mut features = Vec::with_capacity(rows.len() * (width - 1));
    let mut labels = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        features.extend_from_slice(&row[..width - 1]);
        labels.push(parse_label(row[width - 1], i + 1)?);
    }
    Ok(Dataset::new(features, width - 1, labels)?)
}

pub fn parse_dataset(bytes: &[u8]) -> Result<Dataset, CsvError> {
    split_labels(parse_rows(bytes)?)
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, CsvError> {
    let mut buf = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut buf))
        .map_err(|e| CsvError::io(path, e))?;
    Ok(buf)
}

pub fn read_dataset(path: &Path) -> Result<Dataset, CsvError> {
    parse_dataset(&read_bytes(path)?)
}

/// Rows to score, with labels when the file has one column beyond `dim`.
pub struct Inputs {
    pub rows: Vec<Vec<f64>>,
    pub labels: Option<Vec<u8>>,
}

pub fn parse_inputs(bytes: &[u8], dim: usize) -> Result<Inputs, CsvError> {
    let mut rows = parse_rows(bytes)?;
    let width = rows[0].len();
    if width == dim {
        Ok(Inputs { rows, labels: None })
    } else if width == dim + 1 {
        let labels = rows
            .iter_mut()
            .enumerate()
            .map(|(i, row)| parse_label(row.pop().expect("nonempty row"), i + 1))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Inputs {
            rows,
            labels: Some(labels),
        })
    } else {
        Err(CsvError::DimensionMismatch {
            expected: dim,
            found: width,
        })
    }
}

pub fn write_dataset<W: Write>(dataset: &Dataset, out: W) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    let header: Vec<String> = (0..dataset.dim()).map(|j| format!("x{j}")).collect();
    writeln!(out, "# {},label", header.join(","))?;
    for (row, label) in dataset.rows().zip(dataset.labels()) {
        for v in row {
            write!(out, "{v},")?;
        }
        writeln!(out, "{label}")?;
    }
    out.flush()
}

pub fn write_dataset_file(dataset: &Dataset, path: &Path) -> Result<(), CsvError> {
    let file = File::create(path).map_err(|e| CsvError::io(path, e))?;
    write_dataset(dataset, file).map_err(|e| CsvError::io(path, e))
}

pub fn predict_rows(
    forest: &Forest,
    rows: &[Vec<f64>],
) -> Result<Vec<Prediction>, infoforest_core::Error> {
    rows.iter().map(|r| forest.predict(r)).collect()
}

pub fn write_predictions<W: Write>(predictions: &[Prediction], out: W) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "predicted_label,vote_fraction,mean_posterior")?;
    for p in predictions {
        writeln!(out, "{},{},{}", p.label, p.vote_fraction, p.mean_posterior)?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_header_and_comments() {
        let ds = parse_dataset(b"# x0,x1,label\n1.5,2,1\n-3e-2, 4 ,0\n").unwrap();
        assert_eq!(ds.dim(), 2);
        assert_eq!(ds.labels(), &[1, 0]);
        assert_eq!(ds.row(1), &[-0.03, 4.0]);
    }

    #[test]
    fn rejects_bad_labels_and_values() {
        assert!(matches!(
            parse_dataset(b"1,2\n3,2\n"),
            Err(CsvError::Malformed { .. })
        ));
        assert!(matches!(
            parse_dataset(b"1,abc,0\n"),
            Err(CsvError::Malformed { .. })
        ));
        assert!(matches!(
            parse_dataset(b"NaN,1,0\n"),
            Err(CsvError::Malformed { .. })
        ));
        assert!(matches!(
            parse_dataset(b"1,2,0\n1,0\n"),
            Err(CsvError::Malformed { .. })
        ));
        assert!(matches!(
            parse_dataset(b"# only a header\n"),
            Err(CsvError::Malformed { .. })
        ));
    }

    #[test]
    fn inputs_detect_label_column() {
        let i = parse_inputs(b"1,2\n3,4\n", 2).unwrap();
        assert!(i.labels.is_none());
        let i = parse_inputs(b"1,2,1\n3,4,0\n", 2).unwrap();
        assert_eq!(i.labels.as_deref(), Some(&[1u8, 0][..]));
        assert_eq!(i.rows[1], vec![3.0, 4.0]);
        assert!(matches!(
            parse_inputs(b"1,2,3,0\n", 2),
            Err(CsvError::DimensionMismatch {
                expected: 2,
                found: 4
            })
        ));
    }

    #[test]
    fn write_then_read_is_exact() {
        let ds = Dataset::new(vec![0.1, 1.0 / 3.0, -2.5e-300, 7.0], 2, vec![0, 1]).unwrap();
        let mut buf = Vec::new();
        write_dataset(&ds, &mut buf).unwrap();
        assert_eq!(parse_dataset(&buf).unwrap(), ds);
    }
}
