//! Deterministic CSV output.
//!
//! Floats print with 17 significant digits (`{:.16e}`), enough to round-trip
//! any f64, so identical numerical results serialize to identical bytes
//! regardless of worker count or platform.

use crate::Result;
use std::path::Path;

/// Canonical float rendering used by every CSV column.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `header` then `rows`, comma-separated, trailing newline.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Parses a CSV written by [`write_csv`] back into header and float rows.
pub fn read_float_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| crate::Error::Config(format!("{}: empty CSV", path.display())))?
        .split(',')
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|s| {
                s.parse::<f64>().map_err(|_| {
                    crate::Error::Config(format!(
                        "{}:{}: `{s}` is not a number",
                        path.display(),
                        i + 2
                    ))
                })
            })
            .collect::<Result<_>>()?;
        if row.len() != header.len() {
            return Err(crate::Error::Config(format!(
                "{}:{}: {} fields, header has {}",
                path.display(),
                i + 2,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok((header, rows))
}
