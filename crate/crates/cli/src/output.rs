//! Output plumbing: stdout-or-file sinks, the versioned CSV schema, and
//! value formatting shared by every subcommand.
//!
//! CSV files are RFC-4180 with LF line endings; the first record is always
//! `schema_version,1`. Rationals print both exactly (`p/q`) and as
//! 17-significant-digit decimals.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

use spinsync_core::rational::{decimal_string, format_ratio, Rational};

pub const SCHEMA_VERSION: &str = "1";
pub const DECIMAL_DIGITS: usize = 17;

/// Where a command writes its report.
pub struct Sink {
    inner: Box<dyn Write>,
}

impl Sink {
    pub fn create(out: Option<&Path>) -> Result<Sink> {
        let inner: Box<dyn Write> = match out {
            None => Box::new(std::io::stdout().lock()),
            Some(path) => Box::new(
                File::create(path)
                    .with_context(|| format!("cannot create {}", path.display()))?,
            ),
        };
        Ok(Sink { inner })
    }
}

impl Write for Sink {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.inner.write(buf)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

/// Minimal RFC-4180 writer: quotes only when a field needs it, LF endings.
pub struct CsvOut<W: Write> {
    w: W,
}

impl<W: Write> CsvOut<W> {
    pub fn new(mut w: W) -> Result<CsvOut<W>> {
        writeln!(w, "schema_version,{SCHEMA_VERSION}")?;
        Ok(CsvOut { w })
    }

    pub fn record<S: AsRef<str>>(&mut self, fields: &[S]) -> Result<()> {
        let line: Vec<String> = fields.iter().map(|f| csv_field(f.as_ref())).collect();
        writeln!(self.w, "{}", line.join(","))?;
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.w
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        String::from(s)
    }
}

/// `p/q` next to its decimal rendering.
pub fn exact_and_decimal(r: &Rational) -> (String, String) {
    (format_ratio(r), decimal_string(r, DECIMAL_DIGITS))
}

/// Text rendering `p/q (0.dddd...)`.
pub fn ratio_pair(r: &Rational) -> String {
    let (e, d) = exact_and_decimal(r);
    format!("{e} ({d})")
}

/// f64 rendering with full round-trip precision.
pub fn f64_str(x: f64) -> String {
    format!("{x:.17e}")
}
