//! Number formatting and file helpers shared by the subcommands.

use std::fs;
use std::io::Write;
use std::path::Path;

use fiberqm::io::{observable_from_json, parse_json, state_from_json, StateData};
use fiberqm::{HermiteBasis, Observable};
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Round to 15 significant digits.
pub fn sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

pub fn num(x: f64) -> Value {
    Value::from(sig15(x))
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_json(&text).map_err(|e| schema_in(path, e))
}

fn schema_in(path: &Path, e: fiberqm::Error) -> CliError {
    match e {
        fiberqm::Error::Schema { pointer, message } => CliError::Schema {
            file: path.to_path_buf(),
            pointer,
            message,
        },
        other => CliError::from_lib(&path.display().to_string(), other),
    }
}

pub fn read_state(path: &Path) -> CliResult<StateData> {
    state_from_json(&read_json(path)?).map_err(|e| schema_in(path, e))
}

pub fn read_observable(path: &Path) -> CliResult<Observable> {
    observable_from_json(&read_json(path)?).map_err(|e| schema_in(path, e))
}

/// Fail with a numerical-precondition error naming both files.
pub fn require_same_basis(
    a: &HermiteBasis,
    a_file: &Path,
    b: &HermiteBasis,
    b_file: &Path,
    what: &str,
) -> CliResult<()> {
    if a.descriptor() != b.descriptor() {
        return Err(CliError::Numerical(format!(
            "basis mismatch between {} ({what}: {:?}) and {} ({:?})",
            a_file.display(),
            a.descriptor(),
            b_file.display(),
            b.descriptor()
        )));
    }
    Ok(())
}

/// Single-line JSON with a trailing newline, for state files.
pub fn render_compact(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn print_stdout(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

pub fn print_stderr(text: &str) {
    let _ = std::io::stderr().lock().write_all(text.as_bytes());
}
