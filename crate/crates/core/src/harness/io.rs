//! Line-oriented input, atomic output and fixed-format numbers.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::value::RawValue;

use super::HarnessError;

/// A parsed record and the 1-based line it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Line<T> {
    pub line: usize,
    pub value: T,
}

pub fn read_text(path: &Path) -> Result<String, HarnessError> {
    let bytes = std::fs::read(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    String::from_utf8(bytes).map_err(|e| HarnessError::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: format!("invalid UTF-8 at byte {}", e.utf8_error().valid_up_to()),
    })
}

/// Splits JSONL text into non-blank lines with their line numbers.
pub fn jsonl_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
}

/// One record per non-empty line.
pub fn load_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<Line<T>>, HarnessError> {
    let text = read_text(path)?;
    parse_jsonl(&text, path)
}

pub fn parse_jsonl<T: DeserializeOwned>(text: &str, path: &Path) -> Result<Vec<Line<T>>, HarnessError> {
    jsonl_lines(text)
        .map(|(line, raw)| {
            serde_json::from_str(raw)
                .map(|value| Line { line, value })
                .map_err(|e| HarnessError::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: e.to_string(),
                })
        })
        .collect()
}

/// Raw document slices from a JSONL file, a top-level JSON array, or a
/// single (possibly multi-line) JSON object. Array elements report their
/// 1-based position in place of a line number.
pub fn split_documents(text: &str, path: &Path) -> Result<Vec<(usize, String)>, HarnessError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') && serde_json::from_str::<&RawValue>(text).is_ok() {
        let line = text.len() - trimmed.len();
        let line = text[..line].matches('\n').count() + 1;
        return Ok(vec![(line, text.trim().to_string())]);
    }
    if trimmed.starts_with('[') {
        let items: Vec<Box<RawValue>> =
            serde_json::from_str(text).map_err(|e| HarnessError::Parse {
                path: path.to_path_buf(),
                line: e.line(),
                message: e.to_string(),
            })?;
        Ok(items
            .into_iter()
            .enumerate()
            .map(|(i, raw)| (i + 1, raw.get().to_string()))
            .collect())
    } else {
        Ok(jsonl_lines(text)
            .map(|(line, raw)| (line, raw.to_string()))
            .collect())
    }
}

/// Writes every file to a temporary sibling first and renames only after
/// all of them are complete, so an interrupted run leaves no partial output
/// at the target paths.
pub fn write_atomic_all(files: &[(PathBuf, Vec<u8>)]) -> Result<(), HarnessError> {
    let mut staged = Vec::with_capacity(files.len());
    for (path, bytes) in files {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let io_err = |source| HarnessError::Io {
            path: path.clone(),
            source,
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io_err)?;
        tmp.write_all(bytes).map_err(io_err)?;
        tmp.as_file().sync_all().map_err(io_err)?;
        staged.push((path, tmp));
    }
    for (path, tmp) in staged {
        tmp.persist(path).map_err(|e| HarnessError::Io {
            path: path.clone(),
            source: e.error,
        })?;
    }
    Ok(())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    write_atomic_all(&[(path.to_path_buf(), bytes.to_vec())])
}

fn raw(text: String) -> Box<RawValue> {
    RawValue::from_string(text).expect("formatted numbers are valid JSON")
}

/// A JSON number with exactly `decimals` fractional digits (`null` if not finite).
pub fn fixed(value: f64, decimals: usize) -> Box<RawValue> {
    if value.is_finite() {
        // avoid "-0.0000"
        let text = format!("{value:.decimals$}");
        let text = if text.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
            text.trim_start_matches('-').to_string()
        } else {
            text
        };
        raw(text)
    } else {
        raw("null".into())
    }
}

/// Six significant digits: fixed notation for moderate magnitudes,
/// exponent notation below 1e-4 or from 1e15 up.
pub fn significant6(value: f64) -> Box<RawValue> {
    raw(format_significant(value, 6))
}

pub fn format_significant(value: f64, digits: usize) -> String {
    if !value.is_finite() {
        return "null".into();
    }
    if value == 0.0 {
        return "0".into();
    }
    let exponent = value.abs().log10().floor() as i32;
    if (-4..15).contains(&exponent) {
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        format!("{value:.decimals$}")
    } else {
        format!("{value:.*e}", digits - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formats() {
        assert_eq!(fixed(0.746, 4).get(), "0.7460");
        assert_eq!(fixed(-0.00001, 4).get(), "0.0000");
        assert_eq!(fixed(f64::NAN, 4).get(), "null");
        assert_eq!(significant6(0.6065306597126334).get(), "0.606531");
        assert_eq!(significant6(1.0).get(), "1.00000");
        assert_eq!(significant6(9.105257503679799e-29).get(), "9.10526e-29");
        assert_eq!(significant6(0.0).get(), "0");
        assert_eq!(significant6(123.4567).get(), "123.457");
    }

    #[test]
    fn jsonl_skips_blank_lines_and_reports_line_numbers() {
        let path = Path::new("mem.jsonl");
        let rows: Vec<Line<serde_json::Value>> =
            parse_jsonl("{\"a\":1}\n\n{\"a\":2}\n", path).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].line, 3);
        let err = parse_jsonl::<serde_json::Value>("{\"a\":1}\n{oops\n", path).unwrap_err();
        assert!(matches!(err, HarnessError::Parse { line: 2, .. }));
    }

    #[test]
    fn documents_from_array_or_lines() {
        let path = Path::new("mem");
        let docs = split_documents("[{\"a\":1}, {\"b\":2}]", path).unwrap();
        assert_eq!(docs, vec![(1, "{\"a\":1}".into()), (2, "{\"b\":2}".into())]);
        let docs = split_documents("{\"a\":1}\n\n{\"b\":2}", path).unwrap();
        assert_eq!(docs[1].0, 3);
        let docs = split_documents("{\n  \"a\": [1,\n 2]\n}\n", path).unwrap();
        assert_eq!(docs.len(), 1);
    }
}
