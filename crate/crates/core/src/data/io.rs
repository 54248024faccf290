use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use super::Dataset;
use crate::error::{Error, Result};

/// Which CSV column holds the labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum LabelColumn {
    #[default]
    Last,
    Index(usize),
    Name(String),
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a headered CSV file. All non-label columns must be numeric.
pub fn load_csv(path: impl AsRef<Path>, label_column: &LabelColumn) -> Result<Dataset> {
    let path = path.as_ref();
    read_csv(open(path)?, path, label_column)
}

/// Parses CSV from any reader; `origin` names the source in error messages.
pub fn read_csv(reader: impl Read, origin: &Path, label_column: &LabelColumn) -> Result<Dataset> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| csv_error(origin, e))?
        .iter()
        .map(str::to_owned)
        .collect::<Vec<_>>();
    let label_idx = match label_column {
        LabelColumn::Last => headers.len().checked_sub(1),
        LabelColumn::Index(i) => (*i < headers.len()).then_some(*i),
        LabelColumn::Name(name) => headers.iter().position(|h| h == name),
    }
    .ok_or_else(|| parse_err(1, format!("label column {label_column:?} not found in header")))?;
    if headers.len() < 2 {
        return Err(parse_err(1, "need a label column and at least one feature".into()));
    }

    let mut rows = Vec::new();
    let mut raw_labels = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(origin, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let mut row = Vec::with_capacity(headers.len() - 1);
        for (c, cell) in record.iter().enumerate() {
            if c == label_idx {
                raw_labels.push((line, cell.to_owned()));
                continue;
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(line, format!("non-numeric value {cell:?} in column {:?}", headers[c])))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("non-finite value {cell:?} in column {:?}", headers[c])));
            }
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(1, "no data rows".into()));
    }
    let labels = encode_labels(&raw_labels).map_err(|(line, msg)| parse_err(line, msg))?;
    let names = headers
        .into_iter()
        .enumerate()
        .filter(|&(c, _)| c != label_idx)
        .map(|(_, h)| h)
        .collect();
    Dataset::from_rows(&rows, labels, None, Some(names))
}

fn csv_error(origin: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    let message = match e.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => format!("row has {len} columns, expected {expected_len}"),
        _ => e.to_string(),
    };
    Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    }
}

/// Integer-valued labels are kept as numbers; otherwise distinct label
/// strings are numbered in sorted order.
fn encode_labels(raw: &[(usize, String)]) -> std::result::Result<Vec<i64>, (usize, String)> {
    let numeric: Option<Vec<i64>> = raw.iter().map(|(_, s)| parse_integral(s)).collect();
    if let Some(labels) = numeric {
        return Ok(labels);
    }
    if let Some((line, s)) = raw.iter().find(|(_, s)| s.is_empty()) {
        return Err((*line, format!("empty label {s:?}")));
    }
    let mut names: Vec<&str> = raw.iter().map(|(_, s)| s.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    Ok(raw
        .iter()
        .map(|(_, s)| names.binary_search(&s.as_str()).unwrap() as i64)
        .collect())
}

fn parse_integral(s: &str) -> Option<i64> {
    if let Ok(v) = s.parse::<i64>() {
        return Some(v);
    }
    let f: f64 = s.parse().ok()?;
    (f.is_finite() && f.fract() == 0.0 && f.abs() < 9.0e15).then_some(f as i64)
}

/// Loads an svmlight / LETOR file.
pub fn load_svmlight(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    read_svmlight(BufReader::new(open(path)?), path)
}

pub fn read_svmlight(reader: impl BufRead, origin: &Path) -> Result<Dataset> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut labels = Vec::new();
    let mut qids: Vec<Option<u64>> = Vec::new();
    let mut sparse_rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut max_fid = 0usize;
    let mut first_line_with_qid: Option<(usize, bool)> = None;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|source| Error::Io {
            path: PathBuf::from(origin),
            source,
        })?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().unwrap();
        let label = parse_integral(label_tok)
            .ok_or_else(|| parse_err(lineno, format!("label {label_tok:?} is not an integer")))?;

        let mut qid = None;
        let mut row = Vec::new();
        let mut last_fid = 0usize;
        for (pos, tok) in tokens.enumerate() {
            let (key, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(lineno, format!("malformed token {tok:?}")))?;
            if key == "qid" {
                if pos != 0 {
                    return Err(parse_err(lineno, "qid must directly follow the label".into()));
                }
                qid = Some(
                    val.parse::<u64>()
                        .map_err(|_| parse_err(lineno, format!("qid {val:?} is not an integer")))?,
                );
                continue;
            }
            let fid: usize = key
                .parse()
                .map_err(|_| parse_err(lineno, format!("feature id {key:?} is not an integer")))?;
            if fid == 0 {
                return Err(parse_err(lineno, "feature ids are 1-based".into()));
            }
            if fid == last_fid {
                return Err(parse_err(lineno, format!("duplicate feature id {fid}")));
            }
            if fid < last_fid {
                return Err(parse_err(
                    lineno,
                    format!("feature id {fid} follows {last_fid}; ids must increase"),
                ));
            }
            let v: f64 = val
                .parse()
                .map_err(|_| parse_err(lineno, format!("non-numeric value {val:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(lineno, format!("non-finite value {val:?}")));
            }
            last_fid = fid;
            max_fid = max_fid.max(fid);
            row.push((fid - 1, v));
        }

        match first_line_with_qid {
            None => first_line_with_qid = Some((lineno, qid.is_some())),
            Some((first, has)) if has != qid.is_some() => {
                return Err(parse_err(
                    lineno,
                    format!("qid presence differs from line {first}"),
                ));
            }
            _ => {}
        }
        labels.push(label);
        qids.push(qid);
        sparse_rows.push(row);
    }

    if labels.is_empty() {
        return Err(parse_err(0, "no samples".into()));
    }
    if max_fid == 0 {
        return Err(parse_err(0, "no features".into()));
    }
    let n = labels.len();
    let mut columns = vec![vec![0.0; n]; max_fid];
    for (i, row) in sparse_rows.into_iter().enumerate() {
        for (j, v) in row {
            columns[j][i] = v;
        }
    }
    let query_ids = if qids[0].is_some() {
        Some(qids.into_iter().map(Option::unwrap).collect())
    } else {
        None
    };
    Dataset::from_columns(columns, labels, query_ids, None)
}

/// Writes `ds` in svmlight format. Zero entries are omitted except the last
/// feature, which is always written so the feature count survives a reload.
pub fn write_svmlight(ds: &Dataset, mut out: impl Write) -> std::io::Result<()> {
    let f = ds.n_features();
    let mut line = String::new();
    for i in 0..ds.n_samples() {
        line.clear();
        write!(line, "{}", ds.labels()[i]).unwrap();
        if let Some(q) = ds.query_ids() {
            write!(line, " qid:{}", q[i]).unwrap();
        }
        for j in 0..f {
            let v = ds.value(i, j);
            if v != 0.0 || j + 1 == f {
                write!(line, " {}:{}", j + 1, v).unwrap();
            }
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}
