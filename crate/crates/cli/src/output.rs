//! Writing reports to a file or stdout, and number formatting.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use dyadic_core::rational::{to_decimal, to_text};
use dyadic_core::Rational;
use serde::Serialize;

use crate::error::CliResult;

/// Writes `bytes` to `out`, or to stdout when absent.
pub fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> CliResult {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

pub fn emit_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> CliResult {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(out, text.as_bytes())
}

/// Builds a CSV document from a header and rows of preformatted fields.
pub fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// Shortest round-trip rendering, in scientific form for very small or
/// very large magnitudes.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// `num/den (decimal)`.
pub fn rational(r: &Rational) -> String {
    format!("{} ({})", to_text(r), to_decimal(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use dyadic_core::rational::rat;

    #[test]
    fn formatting() {
        assert_eq!(num(4.0), "4");
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(-1.0 / 6144.0), "-0.00016276041666666666");
        assert_eq!(num(1.5e-20), "1.5e-20");
        assert_eq!(rational(&rat(10, 3)), "10/3 (3.33333333333333e0)");
    }

    #[test]
    fn csv_has_header() {
        let b = csv_bytes(&["a", "b"], vec![vec!["1".into(), "".into()]]).unwrap();
        assert_eq!(String::from_utf8(b).unwrap(), "a,b\n1,\n");
    }
}
