//! Deterministic table and sidecar writers. Every file begins with `#`
//! comment lines echoing the fully resolved configuration, so outputs are
//! self-describing; identical inputs produce byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use pdl_core::Complex64;

use crate::CliError;

/// Fixed-width scientific notation keeps reruns byte-identical.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Table {
    path: PathBuf,
    writer: BufWriter<File>,
}

impl Table {
    pub fn create(
        path: &Path,
        command: &str,
        header: &[(String, String)],
        columns: &[&str],
    ) -> Result<Self, CliError> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let mut writer = BufWriter::new(File::create(path)?);
        writeln!(writer, "# pdl {command}")?;
        for (key, value) in header {
            writeln!(writer, "# {key} = {value}")?;
        }
        writeln!(writer, "{}", columns.join(","))?;
        Ok(Table {
            path: path.to_path_buf(),
            writer,
        })
    }

    pub fn row(&mut self, cells: &[String]) -> Result<(), CliError> {
        writeln!(self.writer, "{}", cells.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.writer.flush()?;
        Ok(self.path)
    }
}

/// Binary sidecar with the full mode vectors: little-endian u64 header
/// (`M`, sample count) followed by `count × (2M+1)` little-endian f64 pairs
/// (re, im) in sample order.
pub fn write_mode_sidecar(
    path: &Path,
    half_width: i64,
    samples: &[Vec<Complex64>],
) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut writer = BufWriter::new(File::create(path)?);
    writer.write_all(&(half_width as u64).to_le_bytes())?;
    writer.write_all(&(samples.len() as u64).to_le_bytes())?;
    for sample in samples {
        debug_assert_eq!(sample.len() as i64, 2 * half_width + 1);
        for b in sample {
            writer.write_all(&b.re.to_le_bytes())?;
            writer.write_all(&b.im.to_le_bytes())?;
        }
    }
    writer.flush()?;
    Ok(())
}
