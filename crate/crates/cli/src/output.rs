use std::io::{self, Write};
use std::path::Path;

use tempfile::NamedTempFile;

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn split_unit<'a>(s: &'a str, units: &[(&'a str, f64)]) -> Result<f64, String> {
    let s = s.trim();
    let (num, scale) = units
        .iter()
        .find_map(|&(u, f)| s.strip_suffix(u).map(|n| (n, f)))
        .unwrap_or((s, 1.0));
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("cannot parse '{s}' as a number with optional unit"))?;
    Ok(v * scale)
}

/// Length in meters; accepts `km`, `m` or a bare number of meters.
pub fn parse_length(s: &str) -> Result<f64, String> {
    split_unit(s, &[("km", 1e3), ("m", 1.0)])
}

/// Duration in seconds; accepts `ns`, `us`, `ms`, `s` or a bare number of seconds.
pub fn parse_duration(s: &str) -> Result<f64, String> {
    split_unit(s, &[("ns", 1e-9), ("us", 1e-6), ("µs", 1e-6), ("ms", 1e-3), ("s", 1.0)])
}
