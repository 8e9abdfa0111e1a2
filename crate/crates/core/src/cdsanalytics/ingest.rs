use std::fs::File;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use serde::Deserialize;

use super::Tenor;
use crate::error::{Error, Result};

/// One parsed quote. The region is kept as written; unsupported regions are
/// filtered during preparation.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct RawQuote {
    pub date: NaiveDate,
    pub name: String,
    pub region: String,
    pub tenor: Tenor,
    pub spread_bps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowError {
    /// 1-based line in the input, header included.
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IngestReport {
    pub quotes: Vec<RawQuote>,
    pub errors: Vec<RowError>,
}

impl IngestReport {
    pub fn rows_read(&self) -> usize {
        self.quotes.len() + self.errors.len()
    }
}

/// Reads `date,name,region,tenor,spread_bps` rows. Bad rows are reported
/// with their line number and skipped; only a missing or malformed header
/// fails the whole read.
pub fn read_quotes<R: Read>(reader: R) -> Result<IngestReport> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Data(format!("cannot read header: {e}")))?
        .clone();
    for col in ["date", "name", "region", "tenor", "spread_bps"] {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::Data(format!("missing column {col:?}")));
        }
    }

    let mut report = IngestReport::default();
    let mut record = csv::StringRecord::new();
    loop {
        let line = rdr.position().line() + 1;
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                report.errors.push(RowError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        }
        let line = record.position().map_or(line, |p| p.line());
        match record.deserialize::<RawQuote>(Some(&headers)) {
            Ok(q) if q.name.is_empty() => report.errors.push(RowError {
                line,
                message: "empty name".into(),
            }),
            Ok(q) if !(q.spread_bps.is_finite() && q.spread_bps > 0.0) => report.errors.push(RowError {
                line,
                message: format!("spread_bps must be positive, got {}", q.spread_bps),
            }),
            Ok(q) => report.quotes.push(q),
            Err(e) => report.errors.push(RowError {
                line,
                message: e.to_string(),
            }),
        }
    }
    Ok(report)
}

pub fn read_quotes_path(path: impl AsRef<Path>) -> Result<IngestReport> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    read_quotes(file)
}
