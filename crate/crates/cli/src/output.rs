use std::fs;
use std::path::Path;

use crate::error::{CliError, CliResult};

pub fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))
}

/// Writes through a temporary sibling so readers never see partial files.
pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| CliError::write(path, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::write(path, e))
}

pub fn remove_if_present(path: &Path) -> CliResult<()> {
    match fs::remove_file(path) {
        Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(CliError::write(path, e)),
        _ => Ok(()),
    }
}

pub fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::read(path, e))
}

/// Shortest round-trip formatting; non-finite values become empty fields.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        String::new()
    }
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn single_row(header: &str, row: &str) -> String {
    format!("{header}\n{row}\n")
}
