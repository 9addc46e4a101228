//! File plumbing shared by the subcommands: failure classification for exit
//! codes, atomic output writes, fixed-precision number formatting, and small
//! CSV/JSON readers.

use std::fmt;
use std::fs;
use std::path::Path;

/// A failed run, split by exit code: usage errors (bad flags, malformed
/// inputs, violated preconditions) exit 2, computational failures
/// (non-convergence, escapes, unmet targets, I/O trouble while writing)
/// exit 1.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Compute(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Compute(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    /// One-line machine-parsable reason: `error: <kind>: <detail>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) => write!(f, "error: usage: {}", single_line(msg)),
            Failure::Compute(msg) => write!(f, "error: compute: {}", single_line(msg)),
        }
    }
}

fn single_line(msg: &str) -> String {
    msg.replace('\n', " / ")
}

/// Library errors map to exit codes by their nature: precondition
/// violations are usage errors, everything else is computational.
impl From<lagflow::Error> for Failure {
    fn from(e: lagflow::Error) -> Self {
        match e {
            lagflow::Error::InvalidInput(msg) => Failure::Usage(msg),
            other => Failure::Compute(other.to_string()),
        }
    }
}

pub type RunResult<T> = std::result::Result<T, Failure>;

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

pub fn compute(msg: impl Into<String>) -> Failure {
    Failure::Compute(msg.into())
}

/// Decimal text with 17 significant digits (round-trips every f64).
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes via a sibling temp file and rename, so a crash never leaves a
/// truncated output at the destination.
pub fn write_atomic(path: &Path, contents: &str) -> RunResult<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| usage(format!("output path {} has no file name", path.display())))?;
    let tmp = path.with_file_name(format!("{}.tmp", file_name.to_string_lossy()));
    fs::write(&tmp, contents)
        .map_err(|e| compute(format!("writing {} failed: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| compute(format!("renaming into {} failed: {e}", path.display())))?;
    Ok(())
}

pub fn read_to_string(path: &Path) -> RunResult<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("reading {} failed: {e}", path.display())))
}

/// Parses a CSV with a mandatory header; returns the header fields and the
/// rows (each already split on commas and trimmed).
pub fn read_csv(path: &Path) -> RunResult<(Vec<String>, Vec<Vec<String>>)> {
    let text = read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| usage(format!("{} is empty; a header row is required", path.display())))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|s| s.trim().to_string()).collect())
        .collect();
    Ok((header, rows))
}

pub fn expect_header(path: &Path, header: &[String], expected: &[&str]) -> RunResult<()> {
    let got: Vec<&str> = header.iter().map(String::as_str).collect();
    if got != expected {
        return Err(usage(format!(
            "{}: expected header {:?}, got {:?}",
            path.display(),
            expected.join(","),
            header.join(",")
        )));
    }
    Ok(())
}

pub fn parse_f64(path: &Path, field: &str, raw: &str) -> RunResult<f64> {
    raw.parse::<f64>()
        .map_err(|_| usage(format!("{}: field {field} is not a number: {raw:?}", path.display())))
}

pub fn parse_usize(path: &Path, field: &str, raw: &str) -> RunResult<usize> {
    raw.parse::<usize>().map_err(|_| {
        usage(format!(
            "{}: field {field} is not a nonnegative integer: {raw:?}",
            path.display()
        ))
    })
}

/// Parses `a,b` (exactly two comma-separated numbers) from a flag value.
pub fn parse_pair(flag: &str, raw: &str) -> RunResult<(f64, f64)> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(usage(format!("--{flag} expects two comma-separated numbers, got {raw:?}")));
    }
    let a = parts[0]
        .parse::<f64>()
        .map_err(|_| usage(format!("--{flag}: {:?} is not a number", parts[0])))?;
    let b = parts[1]
        .parse::<f64>()
        .map_err(|_| usage(format!("--{flag}: {:?} is not a number", parts[1])))?;
    Ok((a, b))
}

/// Parses JSON into a serde-deserializable config.
pub fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> RunResult<T> {
    serde_json::from_str(text).map_err(|e| usage(format!("{}: bad JSON: {e}", path.display())))
}
