//! Output helpers shared by the library writers and the CLI.

use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// Seventeen significant digits in scientific notation.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write CSV rows with a `#`-prefixed header block echoing the run context.
pub fn write_csv(
    path: &Path,
    preamble: &[String],
    header: &str,
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> std::io::Result<()> {
    write_rows(path, preamble, header, rows.into_iter().map(|r| r.into_iter().map(fmt17).collect()))
}

/// As [`write_csv`] but with preformatted cells.
pub fn write_rows(
    path: &Path,
    preamble: &[String],
    header: &str,
    rows: impl IntoIterator<Item = Vec<String>>,
) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for line in preamble {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "{header}")?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()
}

/// Recursively replace every float in a JSON value by a 17-digit number so
/// the serialized text is fixed-width and reproducible.
pub fn canonical_json<T: Serialize>(v: &T) -> serde_json::Result<serde_json::Value> {
    fn walk(v: serde_json::Value) -> serde_json::Value {
        use serde_json::Value;
        match v {
            Value::Number(n) if n.is_f64() => {
                let x = n.as_f64().unwrap_or(f64::NAN);
                let s = fmt17(x);
                match s.parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
                    Some(num) => Value::Number(num),
                    None => Value::String(s),
                }
            }
            Value::Array(a) => Value::Array(a.into_iter().map(walk).collect()),
            Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, walk(v))).collect()),
            other => other,
        }
    }
    Ok(walk(serde_json::to_value(v)?))
}

pub fn write_json<T: Serialize>(path: &Path, v: &T) -> crate::Result<()> {
    let text = serde_json::to_string_pretty(&canonical_json(v)?)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
