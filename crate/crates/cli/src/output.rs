//! Where and how results are written.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use sharpext_core::grid::format_f64;

use crate::error::CliResult;

/// Directory used for output files when `--output` is not given.
pub const OUTPUT_DIR_ENV: &str = "SHARPEXT_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Origin of a reported number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Stated in the source literature.
    Published,
    /// Computed here from independent formulas or quadrature.
    Derived,
    /// Holds by definition.
    Trivial,
}

/// A payload tagged with its provenance.
#[derive(Serialize)]
pub struct Tagged<T: Serialize> {
    pub provenance: Provenance,
    #[serde(flatten)]
    pub body: T,
}

pub fn json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// CSV with a header row and 17 significant digits per field.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let fields: Vec<String> = row.into_iter().map(format_f64).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Writes to `explicit` if given, else to `<$SHARPEXT_OUTPUT_DIR>/<stem>.<ext>`
/// if that variable is set, else to stdout. Returns the path written, if any.
pub fn emit(text: &str, explicit: Option<&Path>, stem: &str, format: Format) -> CliResult<Option<PathBuf>> {
    let target = match explicit {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os(OUTPUT_DIR_ENV)
            .filter(|d| !d.is_empty())
            .map(|d| PathBuf::from(d).join(format!("{stem}.{}", format.extension()))),
    };
    match target {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(&path, text)?;
            Ok(Some(path))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(None)
        }
    }
}
