//! Report serialization: JSON documents with sorted keys, CSV timing tables,
//! and atomic file writes (temp file in the target directory, then rename).

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::Value;

/// Seconds since the Unix epoch, recorded in every report. This is the one
/// field excluded from byte-identity across reruns.
pub fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut tmp: PathBuf = path.to_path_buf();
    let mut ext = tmp.extension().unwrap_or_default().to_os_string();
    ext.push(".tmp");
    tmp.set_extension(ext);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

/// Write a JSON document. `serde_json` object maps are ordered, so key order
/// in the output is sorted and stable across runs.
pub fn write_json(path: &Path, value: &Value) -> io::Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn write_text(path: &Path, text: &str) -> io::Result<()> {
    write_atomic(path, text.as_bytes())
}
