use std::io::Write;
use std::path::PathBuf;

use crate::error::CliError;
use crate::options::Format;
use crate::table::Table;

#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// Result of a subcommand that ran to completion.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    /// Reasons for exit status 2; empty when every value is trusted.
    pub flags: Vec<String>,
    /// Informational messages for standard error.
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn new(table: Table) -> Self {
        Self {
            table,
            flags: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.flags.is_empty() { 0 } else { 2 }
    }
}

pub fn render(table: &Table, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}

/// Writes the whole table at once, to the file or to standard output.
pub fn emit(table: &Table, target: &Target) -> Result<(), CliError> {
    let text = render(table, target.format);
    match &target.path {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}
