//! Output plumbing: JSON with a fixed 17-significant-digit float format
//! (reproducible and diffable across runs) and small CSV helpers.

use std::fs::File;
use std::io::{self, Write};

use serde::Serialize;

/// Formatter printing every float with 17 significant digits.
struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes to JSON with deterministic float formatting.
pub fn to_json_string<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf)?)
}

/// Writer for `--output FILE|-` (`-` or absence meaning stdout).
pub fn open_output(path: Option<&str>) -> anyhow::Result<Box<dyn Write>> {
    match path {
        None | Some("-") => Ok(Box::new(io::stdout().lock())),
        Some(p) => Ok(Box::new(File::create(p)?)),
    }
}

pub fn read_input(path: &str) -> anyhow::Result<String> {
    if path == "-" {
        let mut buf = String::new();
        io::Read::read_to_string(&mut io::stdin().lock(), &mut buf)?;
        Ok(buf)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

/// One CSV cell for a float, same 17-significant-digit convention.
pub fn csv_float(value: f64) -> String {
    format!("{value:.16e}")
}
