//! Tab-separated tables with a header row.
//!
//! Fields are never quoted: labels and ids cannot contain tabs or newlines
//! once normalized, and quote characters are legal inside titles.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(input)
}

pub fn read_from<T: DeserializeOwned, R: Read>(input: R, path: &Path) -> Result<Vec<T>> {
    let mut rdr = reader(input);
    let mut out = Vec::new();
    for record in rdr.deserialize() {
        let record: T = record.map_err(|e| csv_error(path, e))?;
        out.push(record);
    }
    Ok(out)
}

pub fn read<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_from(file, path)
}

pub fn write_to<T: Serialize, W: Write>(out: W, records: &[T], path: &Path) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .delimiter(b'\t')
        .quote_style(csv::QuoteStyle::Never)
        .from_writer(out);
    for r in records {
        wtr.serialize(r).map_err(|e| csv_error(path, e))?;
    }
    wtr.flush().map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        csv::ErrorKind::Deserialize { err, .. } => {
            let msg = match err.field() {
                Some(i) => format!("field {}: {}", i + 1, err.kind()),
                None => err.kind().to_string(),
            };
            Error::parse(path, line, msg)
        }
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::parse(
            path,
            line,
            format!("expected {expected_len} fields, found {len}"),
        ),
        kind => Error::parse(path, line, format!("{kind:?}")),
    }
}
