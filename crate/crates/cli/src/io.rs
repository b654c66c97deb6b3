use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

use crate::InputError;

struct HashingWriter<W> {
    inner: W,
    hasher: Sha256,
}

impl<W: Write> Write for HashingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

fn hex(digest: &[u8]) -> String {
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `path` through a temp file in the same directory and renames it
/// into place once `fill` succeeds. Logs the SHA-256 of what was written.
pub fn write_atomic<F>(path: &Path, fill: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let tmp = NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    let mut w = HashingWriter {
        inner: BufWriter::new(tmp),
        hasher: Sha256::new(),
    };
    fill(&mut w)?;
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    let digest = hex(&w.hasher.finalize());
    let tmp = w.inner.into_inner().map_err(|e| e.into_error())?;
    tmp.persist(path)
        .with_context(|| format!("moving output into {}", path.display()))?;
    log::info!("wrote {} sha256={digest}", path.display());
    Ok(())
}

/// Fails with an input error if any path is missing, and logs the SHA-256
/// of each input.
pub fn check_inputs(paths: &[&Path]) -> Result<()> {
    for p in paths {
        if !p.is_file() {
            return Err(InputError(format!("input file {} does not exist", p.display())).into());
        }
    }
    for p in paths {
        log::info!("input {} sha256={}", p.display(), checksum(p)?);
    }
    Ok(())
}

pub fn checksum(path: &Path) -> Result<String> {
    let mut file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).with_context(|| format!("reading {}", path.display()))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex(&hasher.finalize()))
}
