//! Deterministic CSV/JSON emission.
//!
//! CSV: comma-separated, header row, Unix newlines, UTF-8, scientific
//! notation with 12 significant digits and a locale-independent decimal
//! point. Identical inputs produce byte-identical files.

use std::io::Write;
use std::path::Path;

/// 12 significant digits, scientific.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn write_csv<W: Write>(
    mut w: W,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> std::io::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Writes to `out`, or stdout when `out` is `None` or `"-"`.
pub fn to_destination(out: Option<&str>, body: &str) -> std::io::Result<()> {
    match out {
        None | Some("-") => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())
        }
        Some(path) => {
            if let Some(parent) = Path::new(path).parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(path, body)
        }
    }
}

pub fn json_pretty<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(8.67891147350335e-7), "8.67891147350e-7");
        assert_eq!(num(1.0), "1.00000000000e0");
        assert_eq!(num(-2.5e11), "-2.50000000000e11");
    }
}
