//! CSV tables and the summary record.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Config;
use crate::error::{CliError, ErrorClass};

/// Full-precision float: 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Creates the output directory before any computation starts.
pub fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(&format!("output directory {}", dir.display()), e, ErrorClass::Config))
}

pub fn write_csv(dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut body = header.join(",");
    body.push('\n');
    for row in rows {
        body.push_str(&row.join(","));
        body.push('\n');
    }
    write_file(&path, &body)?;
    Ok(path)
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    let mut file =
        fs::File::create(path).map_err(|e| CliError::io(&format!("create {}", path.display()), e, ErrorClass::Numeric))?;
    file.write_all(body.as_bytes())
        .map_err(|e| CliError::io(&format!("write {}", path.display()), e, ErrorClass::Numeric))
}

#[derive(Serialize)]
struct Summary<'a, T: Serialize> {
    command: &'a str,
    version: &'a str,
    files: Vec<String>,
    result: &'a T,
    config: &'a Config,
}

/// Writes `summary.toml` with the command result and the resolved config.
pub fn write_summary<T: Serialize>(
    dir: &Path,
    command: &str,
    config: &Config,
    files: &[PathBuf],
    result: &T,
) -> Result<PathBuf, CliError> {
    let summary = Summary {
        command,
        version: env!("CARGO_PKG_VERSION"),
        files: files
            .iter()
            .map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default())
            .collect(),
        result,
        config,
    };
    let text = toml::to_string(&summary)
        .map_err(|e| CliError {
            class: ErrorClass::Numeric,
            code: "summary".into(),
            message: format!("cannot serialise summary: {e}"),
        })?;
    let path = dir.join("summary.toml");
    write_file(&path, &text)?;
    Ok(path)
}
