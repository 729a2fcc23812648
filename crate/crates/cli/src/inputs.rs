use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wavechaos::io::{digest_file, read_sample_file_at, read_touchstone_file, FileDigest, SampleFile};
use wavechaos::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputKind {
    /// Sample CSV (S or K schema).
    Samples,
    /// Touchstone `.s2p`.
    Touchstone,
    /// A curve table written by `theory`.
    Curve,
}

/// An input file pinned by content digest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputRef {
    pub path: PathBuf,
    pub kind: InputKind,
    pub sha256: String,
}

impl InputRef {
    /// Resolves `path` to an absolute path and records its digest. The kind
    /// follows the extension unless given.
    pub fn new(path: impl AsRef<Path>, kind: Option<InputKind>) -> Result<Self> {
        let path = path.as_ref();
        let abs = std::fs::canonicalize(path).map_err(|e| Error::io(path, e))?;
        let kind = kind.unwrap_or_else(|| {
            let ext = abs.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
            if ext == "s2p" {
                InputKind::Touchstone
            } else {
                InputKind::Samples
            }
        });
        let sha256 = digest_file(&abs)?.sha256;
        Ok(InputRef { path: abs, kind, sha256 })
    }

    /// Fails when the file is missing or no longer matches its digest.
    pub fn check(&self) -> Result<FileDigest> {
        let d = digest_file(&self.path)?;
        if d.sha256 != self.sha256 {
            return Err(Error::invalid(
                "input",
                format!("{} changed since it was recorded (sha256 {} != {})", self.path.display(), d.sha256, self.sha256),
            ));
        }
        Ok(d)
    }

    /// Loads samples; Touchstone files become realization `realization`.
    pub fn load(&self, realization: u64) -> Result<SampleFile> {
        match self.kind {
            InputKind::Samples => read_sample_file_at(&self.path),
            InputKind::Touchstone => Ok(SampleFile::S(read_touchstone_file(&self.path, realization)?.samples)),
            InputKind::Curve => Err(Error::invalid("input", format!("{} is a curve, not samples", self.path.display()))),
        }
    }
}
