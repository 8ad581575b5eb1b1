//! Artifact file formats: `shifts.csv`, `chain.csv`, JSON documents, and
//! atomic multi-file output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::chain::ChainRecord;
use crate::error::{Error, Result};
use crate::phase::ShiftEstimate;

pub const SHIFTS_HEADER: &str = "pair_index,dx,dy,peak_response";
pub const CHAIN_HEADER: &str = "pair_index,mscc,iscc,dx";

pub fn shifts_csv(shifts: &[ShiftEstimate]) -> String {
    let mut out = String::with_capacity(32 * (shifts.len() + 1));
    out.push_str(SHIFTS_HEADER);
    out.push('\n');
    for s in shifts {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            s.pair_index, s.dx, s.dy, s.peak_response
        );
    }
    out
}

pub fn chain_csv(records: &[ChainRecord]) -> String {
    let mut out = String::with_capacity(16 * (records.len() + 1));
    out.push_str(CHAIN_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(out, "{},{},{},{}", r.pair_index, r.mscc, r.iscc, r.dx);
    }
    out
}

fn format_err(path: &Path, line: u64, reason: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        line,
        reason: reason.into(),
    }
}

/// Parses a headed CSV document into rows of the given width.
fn parse_rows(text: &str, path: &Path, header: &str) -> Result<Vec<(u64, Vec<String>)>> {
    let columns: Vec<&str> = header.split(',').collect();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    let mut saw_header = false;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            format_err(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if !saw_header {
            if record.iter().ne(columns.iter().copied()) {
                return Err(format_err(
                    path,
                    line,
                    format!("expected header '{header}'"),
                ));
            }
            saw_header = true;
            continue;
        }
        if record.len() != columns.len() {
            return Err(format_err(
                path,
                line,
                format!("expected {} fields, found {}", columns.len(), record.len()),
            ));
        }
        rows.push((line, record.iter().map(str::to_owned).collect()));
    }
    if !saw_header {
        return Err(format_err(path, 1, "empty file"));
    }
    if rows.is_empty() {
        return Err(format_err(path, 2, "no data rows"));
    }
    Ok(rows)
}

fn field<T: std::str::FromStr>(path: &Path, line: u64, name: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| format_err(path, line, format!("invalid {name} '{raw}'")))
}

fn code(path: &Path, line: u64, name: &str, raw: &str) -> Result<u8> {
    let v: u8 = field(path, line, name, raw)?;
    if v > 3 {
        return Err(format_err(path, line, format!("{name} {v} outside 0..=3")));
    }
    Ok(v)
}

pub fn parse_chain_csv(text: &str, path: &Path) -> Result<Vec<ChainRecord>> {
    parse_rows(text, path, CHAIN_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            Ok(ChainRecord {
                pair_index: field(path, line, "pair_index", &f[0])?,
                mscc: code(path, line, "mscc", &f[1])?,
                iscc: code(path, line, "iscc", &f[2])?,
                dx: field(path, line, "dx", &f[3])?,
            })
        })
        .collect()
}

pub fn parse_shifts_csv(text: &str, path: &Path) -> Result<Vec<ShiftEstimate>> {
    parse_rows(text, path, SHIFTS_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            Ok(ShiftEstimate {
                pair_index: field(path, line, "pair_index", &f[0])?,
                dx: field(path, line, "dx", &f[1])?,
                dy: field(path, line, "dy", &f[2])?,
                peak_response: field(path, line, "peak_response", &f[3])?,
            })
        })
        .collect()
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn read_chain_csv(path: &Path) -> Result<Vec<ChainRecord>> {
    parse_chain_csv(&read_text(path)?, path)
}

pub fn read_shifts_csv(path: &Path) -> Result<Vec<ShiftEstimate>> {
    parse_shifts_csv(&read_text(path)?, path)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact types serialize");
    s.push('\n');
    s
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| format_err(path, e.line() as u64, e.to_string()))
}

/// Writes every file to a temporary name, then renames them all into place.
/// On failure nothing from this call is left behind under its final name.
pub fn commit_files(dir: &Path, files: &[(&str, Vec<u8>)]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let staged: Vec<(PathBuf, PathBuf)> = files
        .iter()
        .map(|(name, _)| (dir.join(format!(".{name}.tmp")), dir.join(name)))
        .collect();

    let cleanup = |upto_renamed: usize| {
        for (i, (tmp, dst)) in staged.iter().enumerate() {
            let _ = fs::remove_file(tmp);
            if i < upto_renamed {
                let _ = fs::remove_file(dst);
            }
        }
    };

    for ((tmp, _), (_, bytes)) in staged.iter().zip(files) {
        if let Err(e) = fs::write(tmp, bytes) {
            cleanup(0);
            return Err(Error::io(tmp, e));
        }
    }
    for (i, (tmp, dst)) in staged.iter().enumerate() {
        if let Err(e) = fs::rename(tmp, dst) {
            cleanup(i);
            return Err(Error::io(dst, e));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_roundtrip() {
        let recs = vec![
            ChainRecord {
                pair_index: 0,
                mscc: 1,
                iscc: 1,
                dx: -3,
            },
            ChainRecord {
                pair_index: 1,
                mscc: 0,
                iscc: 0,
                dx: 80,
            },
        ];
        let text = chain_csv(&recs);
        assert_eq!(text, "pair_index,mscc,iscc,dx\n0,1,1,-3\n1,0,0,80\n");
        assert_eq!(parse_chain_csv(&text, Path::new("c.csv")).unwrap(), recs);
    }

    #[test]
    fn shifts_roundtrip_keeps_exact_floats() {
        let s = vec![ShiftEstimate {
            pair_index: 3,
            dx: -40,
            dy: 2,
            peak_response: 0.123_456_789_012_345_67,
        }];
        let text = shifts_csv(&s);
        assert!(text.starts_with("pair_index,dx,dy,peak_response\n3,-40,2,"));
        assert_eq!(parse_shifts_csv(&text, Path::new("s.csv")).unwrap(), s);
    }

    #[test]
    fn format_errors_carry_line_numbers() {
        let p = Path::new("chain.csv");
        let cases = [
            ("", 1),
            ("pair_index,mscc,iscc,dx\n", 2),
            ("pair,mscc,iscc,dx\n0,1,1,0\n", 1),
            ("pair_index,mscc,iscc,dx\n0,1,1,0\n1,7,1,0\n", 3),
            ("pair_index,mscc,iscc,dx\n0,1,1,0\n1,1,1\n", 3),
            ("pair_index,mscc,iscc,dx\n0,1,x,0\n", 2),
        ];
        for (text, line) in cases {
            match parse_chain_csv(text, p) {
                Err(Error::Format { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn commit_writes_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("nested");
        commit_files(&out, &[("a.txt", b"a".to_vec()), ("b.txt", b"bb".to_vec())]).unwrap();
        assert_eq!(fs::read(out.join("a.txt")).unwrap(), b"a");
        assert_eq!(fs::read(out.join("b.txt")).unwrap(), b"bb");
        let leftovers: Vec<_> = fs::read_dir(&out)
            .unwrap()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_name().to_string_lossy().ends_with(".tmp"))
            .collect();
        assert!(leftovers.is_empty());
    }

    #[test]
    fn failed_commit_leaves_nothing() {
        let dir = tempfile::tempdir().unwrap();
        // a directory squatting on the second name makes its rename fail
        fs::create_dir_all(dir.path().join("b.txt/inner")).unwrap();
        let err = commit_files(
            dir.path(),
            &[("a.txt", b"a".to_vec()), ("b.txt", b"b".to_vec())],
        );
        assert!(err.is_err());
        assert!(!dir.path().join("a.txt").exists());
        assert!(!dir.path().join(".a.txt.tmp").exists());
        assert!(!dir.path().join(".b.txt.tmp").exists());
    }
}
