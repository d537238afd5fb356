use std::fmt::Display;
use std::fs;
use std::path::Path;

use anyhow::Context;

pub const MANIFEST_FILE: &str = phrasmooth::pipeline::MANIFEST_FILE;

/// Writes `key = value` lines in the given order.
pub fn write(dir: &Path, fields: &[(&str, &dyn Display)]) -> anyhow::Result<()> {
    let text: String = fields.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn create_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}
