//! Byte-stable CSV and JSON emission.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

/// 17 significant digits in scientific notation; round-trips any `f64` and
/// never depends on locale.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Csv { buf, columns: header.len() }
    }

    pub fn row(&mut self, label: Option<&str>, values: &[f64]) {
        let mut cells: Vec<String> = label.map(str::to_owned).into_iter().collect();
        cells.extend(values.iter().map(|&v| fmt_f64(v)));
        debug_assert_eq!(cells.len(), self.columns);
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf.into_bytes()
    }
}

pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report serializes");
    out.push(b'\n');
    out
}

/// Writes to `path`, or to standard output when absent.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}
