//! Deterministic plain-text run reports.
//!
//! Reports render `key = value` lines in a fixed order, with every float in
//! full-precision scientific notation, so the same run produces the same
//! bytes on every machine and execution path. The rendered text goes to
//! stdout and, when requested, byte for byte into a file.

use std::fmt::{Display, Write as _};
use std::io::Write as _;
use std::path::Path;

use crate::Failure;

pub fn fmt(value: f64) -> String {
    format!("{value:.16e}")
}

pub struct Report {
    text: String,
}

impl Report {
    pub fn new(kind: &str) -> Self {
        let mut text = String::new();
        let _ = writeln!(text, "report = {kind}");
        Self { text }
    }

    pub fn line(&mut self, key: &str, value: impl Display) {
        let _ = writeln!(self.text, "{key} = {value}");
    }

    pub fn float(&mut self, key: &str, value: f64) {
        let _ = writeln!(self.text, "{key} = {}", fmt(value));
    }

    pub fn floats(&mut self, key: &str, values: &[f64]) {
        let joined: Vec<String> = values.iter().map(|&v| fmt(v)).collect();
        let _ = writeln!(self.text, "{key} = [{}]", joined.join(", "));
    }

    pub fn emit(&self, out: Option<&Path>) -> Result<(), Failure> {
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(self.text.as_bytes())
            .and_then(|()| stdout.flush())
            .map_err(|e| Failure::config(format!("cannot write the report to stdout: {e}")))?;
        if let Some(path) = out {
            std::fs::write(path, &self.text)
                .map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(())
    }
}
