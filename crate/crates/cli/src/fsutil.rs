//! Output-file helpers.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Directory for staging files before they land at their final path. Honours
/// the `DEPNET_TMPDIR` override and falls back to the target's directory,
/// where a rename is guaranteed to stay on one filesystem.
fn staging_dir(target: &Path) -> PathBuf {
    if let Some(dir) = std::env::var_os("DEPNET_TMPDIR") {
        return PathBuf::from(dir);
    }
    target
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Writes a file through a staging temp file so a crash never leaves a
/// half-written output behind.
pub fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = staging_dir(path);
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)
        .with_context(|| format!("creating staging file in {}", dir.display()))?;
    {
        let mut writer = BufWriter::new(&mut tmp);
        fill(&mut writer)?;
        writer.flush()?;
    }
    match tmp.persist(path) {
        Ok(_) => Ok(()),
        // Cross-device staging dir: fall back to a plain copy.
        Err(err) => {
            fs::copy(err.file.path(), path)
                .with_context(|| format!("writing {}", path.display()))?;
            Ok(())
        }
    }
}
