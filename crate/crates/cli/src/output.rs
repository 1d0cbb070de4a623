//! Deterministic CSV/JSON emission.
//!
//! Floats are printed with 17 significant digits so repeated runs with the
//! same config and seed are byte-identical and round-trip exactly.

use std::io::Write;
use std::path::Path;

/// `{:.16e}`: one leading digit plus 16 fractional digits.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

pub fn opt_int(x: Option<u64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

/// Write to the path, or stdout when no path is given.
pub fn emit(out: Option<&Path>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| format!("cannot write to stdout: {e}")),
    }
}
