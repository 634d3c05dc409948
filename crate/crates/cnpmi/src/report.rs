//! Experiment reports: a `#` header followed by a TSV body.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::cache::hex;
use crate::formats::{self, FormatError};

/// Departures from the published method that every report lists.
pub const DEVIATIONS: [&str; 3] = [
    "document-topic prior optimized by a fixed-point update instead of slice sampling",
    "the chain with the highest final log-likelihood is reported; chains are not averaged",
    "topic-word prior is fixed",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    /// Effective settings; their digest is the config hash.
    pub settings: Vec<(String, String)>,
    pub notes: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(command: &str, seed: u64, columns: &[&str]) -> Self {
        Report {
            command: command.to_string(),
            seed,
            settings: Vec::new(),
            notes: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn setting(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.settings.push((key.to_string(), value.to_string()));
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    /// Digest of the command and its sorted settings.
    pub fn config_hash(&self) -> String {
        let mut settings = self.settings.clone();
        settings.sort();
        let mut h = Sha256::new();
        h.update(self.command.as_bytes());
        h.update(b"\n");
        for (k, v) in &settings {
            h.update(format!("{k}={v}\n").as_bytes());
        }
        hex(&h.finalize()[..8])
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# {} {}",
            env!("CARGO_PKG_NAME"),
            env!("CARGO_PKG_VERSION")
        );
        let _ = writeln!(out, "# command: {}", self.command);
        let _ = writeln!(out, "# seed: {}", self.seed);
        let _ = writeln!(out, "# config: {}", self.config_hash());
        let mut settings = self.settings.clone();
        settings.sort();
        for (k, v) in &settings {
            let _ = writeln!(out, "# set {k}={v}");
        }
        for d in DEVIATIONS {
            let _ = writeln!(out, "# deviation: {d}");
        }
        for n in &self.notes {
            let _ = writeln!(out, "# note: {n}");
        }
        out.push_str(&self.columns.join("\t"));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join("\t"));
            out.push('\n');
        }
        out
    }

    /// Writes `<path>.partial`, then renames it into place.
    pub fn write(&self, path: &Path) -> Result<(), FormatError> {
        formats::write_atomic(path, self.render().as_bytes())
    }
}
