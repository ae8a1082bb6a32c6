//! CSV datasets, matrix serialization, and the bundled fixtures.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::metric::NamedMatrix;
use crate::model::{CategoricalVariable, Dataset, NA_LABEL};

const INTERNSHIP_CSV: &str = include_str!("../fixtures/internship.csv");
const INDISCERNIBLES_CSV: &str = include_str!("../fixtures/indiscernibles.csv");

/// What to do with empty cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NaPolicy {
    /// Empty cells become the ordinary category [`NA_LABEL`].
    #[default]
    KeepAsCategory,
    /// Rows with any empty cell are dropped; the rest stay uniformly weighted.
    DropRow,
}

impl FromStr for NaPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "keep" | "keep-as-category" => Ok(Self::KeepAsCategory),
            "drop" | "drop-row" => Ok(Self::DropRow),
            other => Err(Error::InvalidArgument(format!(
                "unknown NA policy `{other}` (expected keep or drop)"
            ))),
        }
    }
}

/// CSV dialect. A header row is always required.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvSpec {
    pub delimiter: u8,
    pub na_policy: NaPolicy,
}

impl Default for CsvSpec {
    fn default() -> Self {
        Self {
            delimiter: b',',
            na_policy: NaPolicy::KeepAsCategory,
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    let message = e.to_string();
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        csv::ErrorKind::Utf8 { err, .. } => Error::Parse {
            line,
            message: format!("invalid UTF-8: {err}"),
        },
        _ => Error::Parse { line, message },
    }
}

/// Reads a dataset with one categorical column per header field.
pub fn load_csv<R: Read>(reader: R, spec: &CsvSpec) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(|h| h.nfc().collect())
        .collect();
    if header.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if let Some(i) = header.iter().position(|h| h.is_empty()) {
        return Err(Error::Parse {
            line: 1,
            message: format!("column {} has an empty name", i + 1),
        });
    }
    for (i, h) in header.iter().enumerate() {
        if header[..i].contains(h) {
            return Err(Error::NameCollision(h.clone()));
        }
    }

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(Error::Parse {
                line,
                message: format!(
                    "row has {} fields, header has {}",
                    record.len(),
                    header.len()
                ),
            });
        }
        let has_na = record.iter().any(str::is_empty);
        if has_na && spec.na_policy == NaPolicy::DropRow {
            continue;
        }
        for (col, field) in cells.iter_mut().zip(record.iter()) {
            col.push(if field.is_empty() {
                NA_LABEL.to_string()
            } else {
                field.to_string()
            });
        }
    }
    if cells[0].is_empty() {
        return Err(Error::EmptyDataset);
    }
    Dataset::from_columns(header.into_iter().zip(cells))
}

pub fn load_csv_path(path: impl AsRef<Path>, spec: &CsvSpec) -> Result<Dataset> {
    load_csv(File::open(path)?, spec)
}

pub fn load_csv_str(text: &str, spec: &CsvSpec) -> Result<Dataset> {
    load_csv(text.as_bytes(), spec)
}

/// Writes the dataset as CSV. Only uniformly weighted datasets are
/// representable.
pub fn write_csv<W: Write>(d: &Dataset, writer: W, delimiter: u8) -> Result<()> {
    if !d.weights().is_uniform() {
        return Err(Error::InvalidWeights(
            "CSV can only represent uniformly weighted rows".into(),
        ));
    }
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(writer);
    let cols: Vec<&CategoricalVariable> = d.columns().collect();
    w.write_record(cols.iter().map(|c| c.name()))
        .map_err(csv_error)?;
    for row in 0..d.row_count() {
        w.write_record(cols.iter().map(|c| c.label(row)))
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(d: &Dataset, delimiter: u8) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(d, &mut buf, delimiter)?;
    String::from_utf8(buf).map_err(|e| Error::Structural(e.to_string()))
}

/// The 20-student personality-traits table.
pub fn internship() -> Dataset {
    load_csv_str(INTERNSHIP_CSV, &CsvSpec::default()).expect("bundled fixture parses")
}

/// The two-column table whose columns are indiscernible.
pub fn indiscernibles() -> Dataset {
    load_csv_str(INDISCERNIBLES_CSV, &CsvSpec::default()).expect("bundled fixture parses")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixFormat {
    #[default]
    Tsv,
    Json,
}

impl FromStr for MatrixFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsv" => Ok(Self::Tsv),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidArgument(format!(
                "unknown matrix format `{other}` (expected tsv or json)"
            ))),
        }
    }
}

/// `v` with 17 significant digits in positional notation.
pub fn full_precision(v: f64) -> String {
    if !v.is_finite() || v == 0.0 {
        return format!("{v}");
    }
    let sci = format!("{v:.16e}");
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    let decimals = (16 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

fn escape_tsv(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape_tsv(s: &str, line: u64) -> Result<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "bad escape `\\{}`",
                        other.map(String::from).unwrap_or_default()
                    ),
                })
            }
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct MatrixRef<'a> {
    names: &'a [String],
    values: &'a [Vec<f64>],
}

#[derive(Deserialize)]
struct MatrixOwned {
    names: Vec<String>,
    values: Vec<Vec<f64>>,
}

/// Serializes a named square matrix.
///
/// TSV: a header row of names (leading empty cell), then one row per name
/// starting with the name. Tabs, newlines and backslashes in names are
/// backslash-escaped. JSON: `{"names": [...], "values": [[...], ...]}`.
pub fn save_matrix<M: NamedMatrix>(m: &M, format: MatrixFormat) -> String {
    match format {
        MatrixFormat::Tsv => {
            let mut out = String::new();
            for n in m.names() {
                out.push('\t');
                out.push_str(&escape_tsv(n));
            }
            out.push('\n');
            for (n, row) in m.names().iter().zip(m.values()) {
                out.push_str(&escape_tsv(n));
                for v in row {
                    out.push('\t');
                    out.push_str(&full_precision(*v));
                }
                out.push('\n');
            }
            out
        }
        MatrixFormat::Json => {
            let r = MatrixRef {
                names: m.names(),
                values: m.values(),
            };
            let mut s = serde_json::to_string_pretty(&r).expect("matrix serializes");
            s.push('\n');
            s
        }
    }
}

/// Parses the output of [`save_matrix`].
pub fn parse_matrix<M: NamedMatrix>(text: &str, format: MatrixFormat) -> Result<M> {
    match format {
        MatrixFormat::Json => {
            let m: MatrixOwned = serde_json::from_str(text)?;
            M::from_parts(m.names, m.values)
        }
        MatrixFormat::Tsv => {
            let mut lines = text.lines().enumerate().map(|(i, l)| (i as u64 + 1, l));
            let (_, head) = lines.next().ok_or(Error::Parse {
                line: 1,
                message: "missing header row".into(),
            })?;
            let head = head.strip_prefix('\t').ok_or(Error::Parse {
                line: 1,
                message: "header must start with an empty cell".into(),
            })?;
            let names = if head.is_empty() && text.lines().count() == 1 {
                Vec::new()
            } else {
                head.split('\t')
                    .map(|n| unescape_tsv(n, 1))
                    .collect::<Result<Vec<_>>>()?
            };
            let mut values = Vec::with_capacity(names.len());
            for (line, l) in lines {
                if l.is_empty() {
                    continue;
                }
                let mut fields = l.split('\t');
                let name = unescape_tsv(fields.next().unwrap_or(""), line)?;
                if names.get(values.len()) != Some(&name) {
                    return Err(Error::Parse {
                        line,
                        message: format!("row `{name}` out of order"),
                    });
                }
                let row = fields
                    .map(|f| {
                        f.parse::<f64>().map_err(|e| Error::Parse {
                            line,
                            message: format!("`{f}`: {e}"),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                values.push(row);
            }
            M::from_parts(names, values)
        }
    }
}

/// Reads all of stdin when `path` is `-`, otherwise the named file.
pub fn read_input(path: &str) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    if path == "-" {
        io::stdin().lock().read_to_end(&mut buf)?;
    } else {
        File::open(path)?.read_to_end(&mut buf)?;
    }
    Ok(buf)
}
