use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::{Error, Result};

/// Which column of a table holds the class label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
}

impl Default for LabelColumn {
    fn default() -> Self {
        LabelColumn::Name("label".to_string())
    }
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

enum Column {
    Numeric(Vec<f64>),
    /// Levels sorted lexicographically; each value is a level index.
    Categorical { levels: Vec<String>, codes: Vec<usize> },
}

/// Loads a comma- or tab-delimited table with a header row.
///
/// Columns named in `categorical` are one-hot expanded into one column per
/// level (named `column=level`, levels in lexicographic order). Labels are
/// mapped to integers by lexicographic order of the raw label strings.
pub fn load_table(
    path: impl AsRef<Path>,
    label_column: &LabelColumn,
    categorical: &[String],
) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_table(&text, label_column, categorical)
}

/// Renders `data` as a comma-delimited table: one column per feature, then
/// a `label` column holding the class names. Readable by [`load_table`].
pub fn table_csv(data: &Dataset) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let table_err = |e: csv::Error| Error::Table(e.to_string());
    let mut header = data.feature_names.clone();
    header.push("label".to_string());
    w.write_record(&header).map_err(table_err)?;
    for (row, &label) in data.features.rows().into_iter().zip(&data.labels) {
        let mut record: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        record.push(data.class_names[label].clone());
        w.write_record(&record).map_err(table_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Table(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub(crate) fn parse_table(
    text: &str,
    label_column: &LabelColumn,
    categorical: &[String],
) -> Result<Dataset> {
    let header_line = text
        .lines()
        .next()
        .ok_or_else(|| Error::Table("empty file".into()))?;
    let delimiter = if header_line.contains('\t') { b'\t' } else { b',' };

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Table(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();

    let label_idx = match label_column {
        LabelColumn::Index(i) if *i < headers.len() => *i,
        LabelColumn::Index(i) => {
            return Err(Error::Table(format!(
                "label column index {i} out of range ({} columns)",
                headers.len()
            )))
        }
        LabelColumn::Name(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Table(format!("label column `{name}` not found")))?,
    };
    if categorical.iter().any(|c| c == &headers[label_idx]) {
        return Err(Error::invalid(format!(
            "label column `{}` is also listed as a categorical feature",
            headers[label_idx]
        )));
    }
    for c in categorical {
        if !headers.contains(c) {
            return Err(Error::Table(format!("categorical column `{c}` not found")));
        }
    }

    let mut raw: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Table(e.to_string()))?;
        if record.len() != headers.len() {
            return Err(Error::Table(format!(
                "row {} has {} fields, header has {}",
                row + 1,
                record.len(),
                headers.len()
            )));
        }
        for (j, field) in record.iter().enumerate() {
            if field.is_empty() || field == "?" || field.eq_ignore_ascii_case("na") {
                return Err(Error::Cell {
                    row: row + 1,
                    column: headers[j].clone(),
                    value: field.to_string(),
                });
            }
            raw[j].push(field.to_string());
        }
    }
    let n = raw[label_idx].len();
    if n == 0 {
        return Err(Error::Table("table has no data rows".into()));
    }

    let class_names: Vec<String> = raw[label_idx]
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if class_names.len() < 2 {
        return Err(Error::invalid(format!(
            "label column `{}` is constant",
            headers[label_idx]
        )));
    }
    let class_index: BTreeMap<&str, usize> = class_names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let labels: Vec<usize> = raw[label_idx]
        .iter()
        .map(|s| class_index[s.as_str()])
        .collect();

    let mut columns: Vec<(String, Column)> = Vec::new();
    for (j, values) in raw.iter().enumerate() {
        if j == label_idx {
            continue;
        }
        let name = &headers[j];
        if categorical.contains(name) {
            let levels: Vec<String> = values
                .iter()
                .cloned()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let codes = values
                .iter()
                .map(|v| levels.binary_search(v).expect("level present"))
                .collect();
            columns.push((name.clone(), Column::Categorical { levels, codes }));
        } else {
            let parsed = values
                .iter()
                .enumerate()
                .map(|(row, v)| {
                    v.parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| Error::Cell {
                            row: row + 1,
                            column: name.clone(),
                            value: v.clone(),
                        })
                })
                .collect::<Result<Vec<f64>>>()?;
            columns.push((name.clone(), Column::Numeric(parsed)));
        }
    }

    let d: usize = columns
        .iter()
        .map(|(_, c)| match c {
            Column::Numeric(_) => 1,
            Column::Categorical { levels, .. } => levels.len(),
        })
        .sum();
    if d == 0 {
        return Err(Error::Table("table has no feature columns".into()));
    }
    let mut features = Array2::zeros((n, d));
    let mut feature_names = Vec::with_capacity(d);
    let mut j = 0;
    for (name, column) in columns {
        match column {
            Column::Numeric(values) => {
                for (i, v) in values.into_iter().enumerate() {
                    features[[i, j]] = v;
                }
                feature_names.push(name);
                j += 1;
            }
            Column::Categorical { levels, codes } => {
                for (i, code) in codes.into_iter().enumerate() {
                    features[[i, j + code]] = 1.0;
                }
                feature_names.extend(levels.iter().map(|l| format!("{name}={l}")));
                j += levels.len();
            }
        }
    }

    let n_classes = class_names.len();
    Dataset::new(features, labels, n_classes, feature_names, class_names)
}
