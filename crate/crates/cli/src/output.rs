use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Format;
use crate::{CliError, Outcome, Rows};

#[derive(Serialize)]
struct Document<'a> {
    command: &'static str,
    rows: &'a Rows,
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| csv_error(e.into_error().into()))
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<csv>"),
        source: std::io::Error::other(e),
    }
}

/// Serializes the rows; identical rows give identical bytes.
pub fn render(outcome: &Outcome, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => match &outcome.rows {
            Rows::FreeEnergy(r) => csv_bytes(r),
            Rows::Entropy(r) => csv_bytes(r),
            Rows::Compare(r) => csv_bytes(r),
            Rows::Modes(r) => csv_bytes(r),
            Rows::Regime(r) => csv_bytes(r),
        },
        Format::Json => {
            let doc = Document {
                command: outcome.command.name(),
                rows: &outcome.rows,
            };
            let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Io {
                path: PathBuf::from("<json>"),
                source: e.into(),
            })?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
