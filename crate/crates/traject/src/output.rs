//! Result tables, plot data and the run manifest, written atomically.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Floats carry 17 significant digits so tables diff bit-exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

/// Comma-separated table with a fixed header.
#[derive(Debug, Clone)]
pub struct Csv {
    width: usize,
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { width: header.len(), text }
    }

    /// Two-column `quantity,value` table.
    pub fn quantities() -> Self {
        Self::new(&["quantity", "value"])
    }

    pub fn row<I, S>(&mut self, cells: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let cells: Vec<String> = cells.into_iter().map(Into::into).collect();
        assert_eq!(cells.len(), self.width, "row width does not match the header");
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
        self
    }

    pub fn real(&mut self, name: &str, x: f64) -> &mut Self {
        self.row([name.to_string(), fmt_f64(x)])
    }

    pub fn int(&mut self, name: &str, n: u64) -> &mut Self {
        self.row([name.to_string(), n.to_string()])
    }

    pub fn file(&self, name: &str) -> OutputFile {
        OutputFile { name: name.into(), contents: self.text.clone() }
    }
}

/// Whitespace-separated numeric columns under a `#` comment header. Blank
/// lines separate blocks.
#[derive(Debug, Clone)]
pub struct PlotData {
    text: String,
}

impl PlotData {
    pub fn new(columns: &[&str]) -> Self {
        Self { text: format!("# {}\n", columns.join(" ")) }
    }

    pub fn row(&mut self, values: &[f64]) -> &mut Self {
        let cells: Vec<String> = values.iter().map(|v| fmt_f64(*v)).collect();
        self.text.push_str(&cells.join(" "));
        self.text.push('\n');
        self
    }

    pub fn block_break(&mut self) -> &mut Self {
        self.text.push('\n');
        self
    }

    pub fn file(&self, name: &str) -> OutputFile {
        OutputFile { name: name.into(), contents: self.text.clone() }
    }
}

/// Writes each file through a temporary sibling that is renamed into place,
/// so a reader never sees a partial file.
pub fn write_atomic(dir: &Path, files: &[OutputFile]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let mut written = Vec::with_capacity(files.len());
    for f in files {
        let target = dir.join(&f.name);
        let mut tmp = tempfile::NamedTempFile::new_in(dir)
            .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
        tmp.write_all(f.contents.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(&target)
            .with_context(|| format!("cannot move output into {}", target.display()))?;
        written.push(target);
    }
    Ok(written)
}
