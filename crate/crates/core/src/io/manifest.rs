use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

pub fn digest_bytes(path: impl Into<String>, bytes: &[u8]) -> FileDigest {
    FileDigest {
        path: path.into(),
        sha256: hex::encode(Sha256::digest(bytes)),
        bytes: bytes.len() as u64,
    }
}

pub fn digest_file(path: impl AsRef<Path>) -> Result<FileDigest> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(digest_bytes(path.display().to_string(), &bytes))
}

/// Everything needed to rerun a command and check its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    /// The fully resolved command configuration.
    pub config: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub wall_time_s: f64,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
    /// Headline numbers of the run (W, T, γ̂, residuals, ...).
    pub results: serde_json::Value,
}

impl RunManifest {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config {
            location: format!("{}:{}:{}", path.display(), e.line(), e.column()),
            reason: e.to_string(),
        })
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut v = serde_json::to_vec_pretty(self).map_err(|e| Error::invalid("manifest", e.to_string()))?;
        v.push(b'\n');
        Ok(v)
    }
}

/// Output files held in memory until every one is ready, then written as
/// temp files in the target directory and renamed into place.
#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn digests(&self) -> Vec<FileDigest> {
        self.files.iter().map(|(n, b)| digest_bytes(n.clone(), b)).collect()
    }

    pub fn bytes(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    /// Writes every file into `dir` (created if missing). Nothing is renamed
    /// into place until all temp files are fully written.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut staged = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            let mut tmp = tempfile::Builder::new()
                .prefix(".wavechaos-")
                .tempfile_in(dir)
                .map_err(|e| Error::io(dir, e))?;
            tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
            tmp.as_file().sync_all().map_err(|e| Error::io(tmp.path(), e))?;
            staged.push((tmp, dir.join(name)));
        }
        let mut written = Vec::with_capacity(staged.len());
        for (tmp, target) in staged {
            tmp.persist(&target).map_err(|e| Error::io(&target, e.error))?;
            written.push(target);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_known_bytes() {
        let d = digest_bytes("x", b"abc");
        assert_eq!(d.sha256, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        assert_eq!(d.bytes, 3);
    }

    #[test]
    fn commit_writes_all_and_leaves_no_temps() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputSet::new();
        out.add("a.csv", b"1\n".to_vec());
        out.add("b.json", b"{}".to_vec());
        let paths = out.commit(dir.path()).unwrap();
        assert_eq!(paths.len(), 2);
        let names: Vec<_> = std::fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        assert_eq!(names.len(), 2);
        assert!(names.iter().all(|n| !n.starts_with(".wavechaos-")));
        assert_eq!(std::fs::read(dir.path().join("a.csv")).unwrap(), b"1\n");
    }

    #[test]
    fn manifest_roundtrip() {
        let m = RunManifest {
            tool: "wavechaos".into(),
            version: "0.1.0".into(),
            command: "theory".into(),
            seed: None,
            config: serde_json::json!({"gammas": [5.39]}),
            inputs: vec![],
            outputs: vec![digest_bytes("a", b"")],
            wall_time_s: 0.5,
            warnings: vec![],
            notes: vec!["n".into()],
            results: serde_json::Value::Null,
        };
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        std::fs::write(&p, m.to_json().unwrap()).unwrap();
        assert_eq!(RunManifest::read(&p).unwrap(), m);
        std::fs::write(&p, "{").unwrap();
        assert!(matches!(RunManifest::read(&p), Err(Error::Config { .. })));
    }
}
