//! Atomic writes and small read helpers that attach paths to errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Result, ToolkitError};

/// Writes `bytes` to a temporary file next to `path`, then renames it into
/// place.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| ToolkitError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| ToolkitError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| ToolkitError::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| ToolkitError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| ToolkitError::io(path, e.error))?;
    Ok(())
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("in-memory JSON serialization");
    bytes.push(b'\n');
    bytes
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    atomic_write(path, &to_json_bytes(value))
}

pub fn read_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| ToolkitError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_string(path)?).map_err(|e| ToolkitError::json(path, e))
}

/// Files in `dir` whose name ends with `suffix`, sorted by name.
pub fn files_with_suffix(dir: &Path, suffix: &str) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| ToolkitError::io(dir, e))? {
        let path = entry.map_err(|e| ToolkitError::io(dir, e))?.path();
        let matches = path.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(suffix) && n.len() > suffix.len());
        if matches && path.is_file() {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// File name with `suffix` removed.
pub fn stem_before(path: &Path, suffix: &str) -> String {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    name.strip_suffix(suffix).unwrap_or(name).to_owned()
}

pub fn modified(path: &Path) -> Option<SystemTime> {
    fs::metadata(path).and_then(|m| m.modified()).ok()
}

/// True when `output` exists and is at least as new as every input.
pub fn is_fresh(output: &Path, inputs: &[PathBuf]) -> bool {
    let Some(out_time) = modified(output) else { return false };
    inputs.iter().all(|input| modified(input).is_some_and(|t| t <= out_time))
}
