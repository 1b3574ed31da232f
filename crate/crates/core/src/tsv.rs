//! Line-oriented TSV reading shared by the resource loaders.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Yields `(line_number, fields)` for every data row, skipping blank lines
/// and `#` comments. Line numbers are 1-based. Rows with trailing
/// whitespace (including a CR from CRLF endings) are rejected.
pub(crate) fn rows<'a>(
    source_name: &'a str,
    text: &'a str,
) -> impl Iterator<Item = Result<(usize, Vec<&'a str>)>> + 'a {
    text.split('\n').enumerate().filter_map(move |(i, line)| {
        if line.trim().is_empty() || line.starts_with('#') {
            return None;
        }
        if line.ends_with(char::is_whitespace) {
            return Some(Err(malformed(source_name, i + 1, "trailing whitespace")));
        }
        Some(Ok((i + 1, line.split('\t').collect())))
    })
}

pub(crate) fn malformed(source_name: &str, line: usize, reason: impl Into<String>) -> Error {
    Error::MalformedRow {
        source_name: source_name.to_string(),
        line,
        reason: reason.into(),
    }
}
