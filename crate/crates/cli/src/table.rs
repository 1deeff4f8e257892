//! Versioned CSV tables.
//!
//! Every file starts with `#` comment lines carrying `key: value` metadata
//! (`schema`, `kind`, `units`) followed by one header row of column names.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const SCHEMA: &str = "runup-csv/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Profile,
    Record,
    Trace,
    Field,
}

impl TableKind {
    pub fn name(self) -> &'static str {
        match self {
            TableKind::Profile => "profile",
            TableKind::Record => "record",
            TableKind::Trace => "trace",
            TableKind::Field => "field",
        }
    }

    pub fn required(self) -> &'static [&'static str] {
        match self {
            TableKind::Profile => &["x", "eta0"],
            TableKind::Record => &["t", "x0"],
            TableKind::Trace => &["tau", "Psi", "V"],
            TableKind::Field => &["sigma", "tau", "psi", "phi"],
        }
    }

    pub fn optional(self) -> &'static [&'static str] {
        match self {
            TableKind::Record => &["v0"],
            _ => &[],
        }
    }

    /// SI unit of a column, for kinds that have a dimensional form.
    pub fn si_unit(self, column: &str) -> Option<&'static str> {
        match (self, column) {
            (TableKind::Profile, "x" | "eta0") => Some("m"),
            (TableKind::Record, "t") => Some("s"),
            (TableKind::Record, "x0") => Some("m"),
            (TableKind::Record, "v0") => Some("m/s"),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Dimensionless,
    Si,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub path: PathBuf,
    pub kind: TableKind,
    /// Units declared in the header, if any.
    pub units: Option<Units>,
    pub columns: Vec<String>,
    data: Vec<Vec<f64>>,
    lines: Vec<u64>,
    pub sha256: String,
}

impl Table {
    pub fn rows(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .position(|c| c == name)
            .map(|i| self.data[i].as_slice())
    }

    pub fn require(&self, name: &str) -> &[f64] {
        self.column(name)
            .expect("required columns are checked on read")
    }

    /// Source line of a data row.
    pub fn line(&self, row: usize) -> u64 {
        self.lines[row]
    }

    /// Rejects a column that is not strictly increasing, naming the line.
    pub fn check_increasing(&self, name: &str) -> CliResult<()> {
        let c = self.require(name);
        match c.windows(2).position(|w| w[1] <= w[0]) {
            Some(i) => Err(CliError::schema(
                &self.path,
                self.line(i + 1),
                format!(
                    "column {name:?} must increase strictly ({} after {})",
                    c[i + 1],
                    c[i]
                ),
            )),
            None => Ok(()),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn parse_units(value: &str) -> Option<Units> {
    let v = value.trim().to_ascii_lowercase();
    if v == "dimensionless" {
        Some(Units::Dimensionless)
    } else if v == "si" || v.starts_with("si ") || v.starts_with("si(") {
        Some(Units::Si)
    } else {
        None
    }
}

pub fn read_table(path: &Path, kind: TableKind) -> CliResult<Table> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let sha256 = sha256_hex(&bytes);
    let text = std::str::from_utf8(&bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count() as u64
            + 1;
        CliError::schema(path, line, "not valid UTF-8")
    })?;

    let mut units = None;
    for (i, raw) in text.lines().enumerate() {
        let line = (i + 1) as u64;
        let Some(comment) = raw.trim_start().strip_prefix('#') else {
            continue;
        };
        let Some((key, value)) = comment.split_once(':') else {
            continue;
        };
        let value = value.trim();
        match key.trim().to_ascii_lowercase().as_str() {
            "schema" if value != SCHEMA => {
                return Err(CliError::schema(
                    path,
                    line,
                    format!("unsupported schema {value:?}, expected {SCHEMA:?}"),
                ))
            }
            "kind" if value != kind.name() => {
                return Err(CliError::schema(
                    path,
                    line,
                    format!("file holds a {value:?} table, expected {:?}", kind.name()),
                ))
            }
            "units" => {
                units = Some(parse_units(value).ok_or_else(|| {
                    CliError::schema(
                        path,
                        line,
                        format!("units must be \"dimensionless\" or \"SI\", got {value:?}"),
                    )
                })?)
            }
            _ => {}
        }
    }

    // comment and blank lines are dropped here so the reader's line count
    // maps straight back to the file
    let mut body = String::with_capacity(text.len());
    let mut source_lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        body.push_str(raw);
        body.push('\n');
        source_lines.push(i as u64 + 1);
    }
    let line_of = |l: u64| {
        source_lines
            .get(l.saturating_sub(1) as usize)
            .copied()
            .unwrap_or(0)
    };
    let hline = source_lines.first().copied().unwrap_or(1);
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| csv_error(path, e, &line_of))?
        .iter()
        .map(str::to_owned)
        .collect::<Vec<_>>();
    if headers.iter().all(String::is_empty) {
        return Err(CliError::schema(path, hline, "missing header row"));
    }
    for (i, h) in headers.iter().enumerate() {
        if !kind.required().contains(&h.as_str()) && !kind.optional().contains(&h.as_str()) {
            return Err(CliError::schema(
                path,
                hline,
                format!("unknown column {h:?} in a {} table", kind.name()),
            ));
        }
        if headers[..i].contains(h) {
            return Err(CliError::schema(
                path,
                hline,
                format!("duplicate column {h:?}"),
            ));
        }
    }
    for r in kind.required() {
        if !headers.iter().any(|h| h == r) {
            return Err(CliError::schema(
                path,
                hline,
                format!("missing column {r:?}"),
            ));
        }
    }

    let mut data = vec![Vec::new(); headers.len()];
    let mut lines = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e, &line_of))?;
        let line = line_of(record.position().map_or(0, |p| p.line()));
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                CliError::schema(
                    path,
                    line,
                    format!("column {:?}: {field:?} is not a number", headers[j]),
                )
            })?;
            if !v.is_finite() {
                return Err(CliError::schema(
                    path,
                    line,
                    format!("column {:?}: non-finite value", headers[j]),
                ));
            }
            data[j].push(v);
        }
        lines.push(line);
    }
    if data[0].is_empty() {
        return Err(CliError::schema(path, hline, "no data rows"));
    }
    Ok(Table {
        path: path.to_owned(),
        kind,
        units,
        columns: headers,
        data,
        lines,
        sha256,
    })
}

fn csv_error(path: &Path, e: csv::Error, line_of: &dyn Fn(u64) -> u64) -> CliError {
    let line = line_of(e.position().map_or(0, |p| p.line()));
    let message = match e.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => {
            format!("expected {expected_len} fields, found {len}")
        }
        _ => e.to_string(),
    };
    CliError::schema(path, line, message)
}

/// Writes a table; `columns` pairs names with equally long value columns.
pub fn write_table(
    path: &Path,
    kind: TableKind,
    units: Units,
    columns: &[(&str, &[f64])],
) -> CliResult<()> {
    let io = |e| CliError::io(path, e);
    let mut out = std::io::BufWriter::new(fs::File::create(path).map_err(io)?);
    writeln!(out, "# schema: {SCHEMA}").map_err(io)?;
    writeln!(out, "# kind: {}", kind.name()).map_err(io)?;
    match units {
        Units::Dimensionless => writeln!(out, "# units: dimensionless").map_err(io)?,
        Units::Si => {
            let list = columns
                .iter()
                .map(|(c, _)| format!("{c} [{}]", kind.si_unit(c).unwrap_or("1")))
                .collect::<Vec<_>>()
                .join(", ");
            writeln!(out, "# units: SI ({list})").map_err(io)?
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let wr = |e: csv::Error| CliError::io(path, e.into());
    w.write_record(columns.iter().map(|(c, _)| *c))
        .map_err(wr)?;
    let n = columns.first().map_or(0, |(_, v)| v.len());
    for i in 0..n {
        w.write_record(columns.iter().map(|(_, v)| format!("{:e}", v[i] + 0.0)))
            .map_err(wr)?;
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scratch(name: &str, body: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        (dir, p)
    }

    #[test]
    fn round_trips_values_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.csv");
        let t = [0.0, 0.1, 1.0 / 3.0];
        let x = [1e-300, -2.5, std::f64::consts::PI];
        write_table(&p, TableKind::Record, Units::Si, &[("t", &t), ("x0", &x)]).unwrap();
        let tab = read_table(&p, TableKind::Record).unwrap();
        assert_eq!(tab.units, Some(Units::Si));
        assert_eq!(tab.require("t"), t);
        assert_eq!(tab.require("x0"), x);
        assert!(tab.column("v0").is_none());
    }

    #[test]
    fn bad_cell_reports_its_line() {
        let (_d, p) = scratch("p.csv", "# kind: profile\nx,eta0\n0,0\n1,abc\n");
        match read_table(&p, TableKind::Profile).unwrap_err() {
            CliError::Schema { line, .. } => assert_eq!(line, 4),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn ragged_row_reports_its_line() {
        let (_d, p) = scratch("p.csv", "x,eta0\n0,0\n# note\n1,2,3\n");
        match read_table(&p, TableKind::Profile).unwrap_err() {
            CliError::Schema { line, .. } => assert_eq!(line, 4),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn wrong_kind_and_columns_are_rejected() {
        let (_d, p) = scratch("p.csv", "# kind: record\nt,x0\n0,0\n");
        assert!(read_table(&p, TableKind::Profile).is_err());
        let (_d, p) = scratch("p.csv", "x\n0\n");
        assert!(read_table(&p, TableKind::Profile).is_err());
        let (_d, p) = scratch("p.csv", "x,eta0,z\n0,0,0\n");
        assert!(read_table(&p, TableKind::Profile).is_err());
        let (_d, p) = scratch("p.csv", "x,eta0\n");
        assert!(read_table(&p, TableKind::Profile).is_err());
    }

    #[test]
    fn decreasing_abscissa_names_the_line() {
        let (_d, p) = scratch("p.csv", "x,eta0\n0,0\n2,0\n1,0\n");
        let tab = read_table(&p, TableKind::Profile).unwrap();
        match tab.check_increasing("x").unwrap_err() {
            CliError::Schema { line, .. } => assert_eq!(line, 4),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn digest_is_of_the_raw_bytes() {
        let (_d, p) = scratch("p.csv", "x,eta0\n0,0\n");
        let tab = read_table(&p, TableKind::Profile).unwrap();
        assert_eq!(tab.sha256, sha256_hex(b"x,eta0\n0,0\n"));
        assert_eq!(tab.sha256.len(), 64);
    }
}
