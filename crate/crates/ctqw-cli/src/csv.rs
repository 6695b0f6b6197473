//! CSV emission: one header line naming the columns, one comment line with
//! the full parameter set and tool version, then data rows. Reals are
//! written in scientific notation with 17 significant digits so output is
//! lossless and diff-stable.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::CliError;

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvOut {
    writer: Box<dyn Write>,
    path: Option<PathBuf>,
}

impl CsvOut {
    /// Open `path`, or stdout when no path is given.
    pub fn create(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            Some(p) => {
                let file = File::create(p)
                    .map_err(|e| CliError::io(format!("opening output file {}", p.display()), e))?;
                Ok(Self {
                    writer: Box::new(BufWriter::new(file)),
                    path: Some(p.to_path_buf()),
                })
            }
            None => Ok(Self {
                writer: Box::new(io::stdout().lock()),
                path: None,
            }),
        }
    }

    /// Write the column header and the parameter comment line.
    pub fn preamble(&mut self, columns: &str, command: &str, params: &str) -> Result<(), CliError> {
        self.line(columns)?;
        self.line(&format!(
            "# tool=ctqw version={} command={command} {params}",
            env!("CARGO_PKG_VERSION")
        ))
    }

    pub fn line(&mut self, text: &str) -> Result<(), CliError> {
        writeln!(self.writer, "{text}").map_err(|e| self.io_err(e))
    }

    pub fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        self.line(&fields.join(","))
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.writer.flush().map_err(|e| self.io_err(e))
    }

    fn io_err(&self, e: io::Error) -> CliError {
        let target = self
            .path
            .as_ref()
            .map_or("stdout".to_string(), |p| p.display().to_string());
        CliError::io(format!("writing {target}"), e)
    }
}
