//! Serialisation with every float written as `{:.16e}` (17 significant
//! digits), so that outputs round-trip exactly and compare byte for byte.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use holonomy_core::linalg::CMat;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::ser::Formatter;

use crate::error::CliError;

struct Digits17;

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17);
    value.serialize(&mut ser).map_err(|e| CliError::Config(format!("serialisation failed: {e}")))?;
    buf.push(b'\n');
    Ok(buf)
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn complex(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Row-major `[re, im]` pairs, the same layout as the config.
pub fn matrix(m: &CMat) -> Vec<[f64; 2]> {
    (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| (i, j))).map(|(i, j)| complex(m[(i, j)])).collect()
}

/// Where results go: a directory, or standard output when none is given.
#[derive(Clone, Debug)]
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> Result<Self, CliError> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d).map_err(|e| CliError::io(d, e))?;
        }
        Ok(Sink { dir })
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        match &self.dir {
            Some(d) => {
                let path = d.join(name);
                std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))
            }
            None => {
                let mut out = io::stdout().lock();
                out.write_all(bytes).map_err(|e| CliError::io(Path::new("<stdout>"), e))
            }
        }
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        self.write(name, &to_json(value)?)
    }

    /// CSV files only make sense next to the JSON, so they are skipped when
    /// writing to standard output.
    pub fn csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        if self.dir.is_none() {
            return Ok(());
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let wrap = |e: csv::Error| CliError::Config(format!("csv: {e}"));
        w.write_record(header).map_err(wrap)?;
        for r in rows {
            w.write_record(r).map_err(wrap)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))?;
        self.write(name, &bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_with_17_digits() {
        let xs = vec![0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0];
        let bytes = to_json(&xs).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.contains("1.0000000000000001e-1"));
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, xs);
        assert_eq!(to_json(&f64::NAN).unwrap(), b"null\n");
    }
}
