//! Delimited tables with schema sidecars, malformed-row tracking and audit logs.

use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::warn;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Column name and value type as recorded in the schema sidecar.
pub type Schema = &'static [(&'static str, &'static str)];

/// Formats a float so that it parses back to the same value; NaN becomes empty.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_owned()
    } else {
        format!("{v}")
    }
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn schema_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".schema.json");
    path.with_file_name(name)
}

/// Writes a CSV table and its `.schema.json` sidecar.
pub fn write_table(
    path: &Path,
    schema: &[(&str, &str)],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<usize> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(schema.iter().map(|(name, _)| *name))?;
    let mut n = 0;
    for row in rows {
        debug_assert_eq!(row.len(), schema.len(), "row width for {}", path.display());
        w.write_record(&row)?;
        n += 1;
    }
    w.flush()?;
    write_table_sidecar(path, schema)?;
    Ok(n)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Serializes records with serde under the schema header.
pub fn write_records<T: Serialize>(
    path: &Path,
    schema: &[(&str, &str)],
    records: &[T],
) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .with_context(|| format!("writing {}", path.display()))?;
    w.write_record(schema.iter().map(|(name, _)| *name))?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    write_table_sidecar(path, schema)
}

fn write_table_sidecar(path: &Path, schema: &[(&str, &str)]) -> Result<()> {
    let columns: Vec<serde_json::Value> = schema
        .iter()
        .map(|(name, kind)| serde_json::json!({ "name": name, "type": kind }))
        .collect();
    let sidecar = serde_json::json!({ "format": "csv", "delimiter": ",", "header": true, "columns": columns });
    write_text(
        &schema_path(path),
        &(serde_json::to_string_pretty(&sidecar)? + "\n"),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowError {
    pub file: String,
    pub line: u64,
    pub message: String,
}

/// Malformed input rows seen by one stage.
#[derive(Debug, Default)]
pub struct ErrorLog {
    pub rows_read: usize,
    pub errors: Vec<RowError>,
}

impl ErrorLog {
    pub fn record(&mut self, file: &Path, line: u64, message: impl Into<String>) {
        let message = message.into();
        warn!(
            "reason=MALFORMED_ROW file={} line={line} {message}",
            file.display()
        );
        self.errors.push(RowError {
            file: file.display().to_string(),
            line,
            message,
        });
    }

    pub fn rate(&self) -> f64 {
        if self.rows_read == 0 {
            0.0
        } else {
            self.errors.len() as f64 / self.rows_read as f64
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_table(
            path,
            &[
                ("file", "string"),
                ("line", "integer"),
                ("message", "string"),
            ],
            self.errors
                .iter()
                .map(|e| vec![e.file.clone(), e.line.to_string(), e.message.clone()]),
        )?;
        Ok(())
    }

    /// Fails when the malformed share exceeds `max_rate`.
    pub fn check(&self, stage: &str, max_rate: f64) -> Result<()> {
        if self.rate() > max_rate {
            bail!(
                "{stage}: {} of {} input rows malformed ({:.2}%, limit {:.2}%)",
                self.errors.len(),
                self.rows_read,
                100.0 * self.rate(),
                100.0 * max_rate
            );
        }
        Ok(())
    }
}

/// Reads typed rows; rows that fail to parse go to `errors` with their line.
pub fn read_rows<T: DeserializeOwned>(
    path: &Path,
    has_headers: bool,
    errors: &mut ErrorLog,
) -> Result<Vec<(u64, T)>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_headers)
        .flexible(true)
        .from_reader(std::io::BufReader::new(file));
    let headers = if has_headers {
        Some(
            rdr.headers()
                .with_context(|| format!("reading header of {}", path.display()))?
                .clone(),
        )
    } else {
        None
    };
    let mut out = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        let line = rdr.position().line();
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                errors.rows_read += 1;
                let line = record.position().map_or(line, |p| p.line());
                match record.deserialize::<T>(headers.as_ref()) {
                    Ok(v) => out.push((line, v)),
                    Err(e) => errors.record(path, line, e.to_string()),
                }
            }
            Err(e) => {
                errors.rows_read += 1;
                errors.record(path, line, e.to_string());
            }
        }
    }
    Ok(out)
}

/// Reads a table this tool wrote itself; any bad row is fatal.
pub fn read_own<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| {
        format!(
            "opening {} (run the producing command first)",
            path.display()
        )
    })?;
    rdr.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .with_context(|| format!("reading {}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct AuditEntry {
    pub entity_kind: &'static str,
    pub entity_id: String,
    pub reason_code: &'static str,
    pub detail: String,
}

/// Entities dropped by one stage, each with a reason code.
#[derive(Debug, Default)]
pub struct AuditLog {
    pub entries: Vec<AuditEntry>,
}

impl AuditLog {
    pub fn drop(
        &mut self,
        kind: &'static str,
        id: impl Into<String>,
        reason: &'static str,
        detail: impl Into<String>,
    ) {
        let id = id.into();
        let detail = detail.into();
        log::info!("reason={reason} {kind}={id} {detail}");
        self.entries.push(AuditEntry {
            entity_kind: kind,
            entity_id: id,
            reason_code: reason,
            detail,
        });
    }

    pub fn count(&self, reason: &str) -> usize {
        self.entries
            .iter()
            .filter(|e| e.reason_code == reason)
            .count()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_table(
            path,
            &[
                ("entity_kind", "string"),
                ("entity_id", "string"),
                ("reason_code", "string"),
                ("detail", "string"),
            ],
            self.entries.iter().map(|e| {
                vec![
                    e.entity_kind.to_owned(),
                    e.entity_id.clone(),
                    e.reason_code.to_owned(),
                    e.detail.clone(),
                ]
            }),
        )?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-17, 1e300] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(f64::NAN), "");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(opt_num(None), "");
    }

    #[test]
    fn malformed_rows_located() {
        #[derive(serde::Deserialize)]
        struct Row {
            #[allow(dead_code)]
            a: u32,
        }
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        std::fs::write(&p, "a\n1\nx\n3\n").unwrap();
        let mut log = ErrorLog::default();
        let rows: Vec<(u64, Row)> = read_rows(&p, true, &mut log).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(log.rows_read, 3);
        assert_eq!(log.errors[0].line, 3);
        assert!(log.check("t", 0.01).is_err());
        assert!(log.check("t", 0.5).is_ok());
    }
}
