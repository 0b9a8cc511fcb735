//! Staged outputs. Nothing touches the output directory until a command
//! has produced every artifact; each file is then written to a hidden
//! temporary name and renamed into place, with the manifest last.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MANIFEST_FORMAT: &str = "seqforge.manifest.v1";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

/// What was run, on what, and what came out. Wall times are deliberately
/// absent so the manifest is itself reproducible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub format: &'static str,
    pub toolkit: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config_sha256: String,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

/// Input file contents, recorded by file name and digest.
#[derive(Debug, Default)]
pub struct Inputs {
    digests: Vec<FileDigest>,
}

impl Inputs {
    pub fn read(&mut self, path: &Path) -> CliResult<Vec<u8>> {
        let bytes = fs::read(path).map_err(|e| CliError::input(format!("cannot read: {e}")).at(path))?;
        let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        self.digests.push(FileDigest { path: name, bytes: bytes.len(), sha256: sha256_hex(&bytes) });
        Ok(bytes)
    }

    pub fn read_text(&mut self, path: &Path) -> CliResult<String> {
        String::from_utf8(self.read(path)?).map_err(|_| CliError::input("not valid UTF-8").at(path))
    }
}

#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: impl Into<String>, bytes: impl Into<Vec<u8>>) {
        let name = name.into();
        debug_assert!(!self.files.iter().any(|(n, _)| *n == name), "duplicate output {name}");
        self.files.push((name, bytes.into()));
    }

    pub fn extend(&mut self, other: Outputs) {
        for (n, b) in other.files {
            self.add(n, b);
        }
    }

    /// Moves `other`'s files under `subdir/`.
    pub fn nest(&mut self, subdir: &str, other: Outputs) {
        for (n, b) in other.files {
            self.add(format!("{subdir}/{n}"), b);
        }
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    /// Writes every file plus `manifest.json` into `dir`.
    pub fn commit(mut self, dir: &Path, command: &str, seed: u64, config_text: &str, inputs: Inputs) -> CliResult<RunManifest> {
        self.files.sort_by(|a, b| a.0.cmp(&b.0));
        let manifest = RunManifest {
            format: MANIFEST_FORMAT,
            toolkit: "seqforge",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            config_sha256: sha256_hex(config_text.as_bytes()),
            inputs: inputs.digests,
            outputs: self
                .files
                .iter()
                .map(|(n, b)| FileDigest { path: n.clone(), bytes: b.len(), sha256: sha256_hex(b) })
                .collect(),
        };
        let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        json.push('\n');
        self.files.push(("manifest.json".into(), json.into_bytes()));
        for (name, bytes) in &self.files {
            write_atomic(&dir.join(name), bytes)?;
        }
        Ok(manifest)
    }
}

fn internal(path: &Path, e: std::io::Error) -> CliError {
    CliError::Internal(format!("{}: {e}", path.display()))
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(parent).map_err(|e| internal(parent, e))?;
    let file_name = path.file_name().expect("output paths name a file").to_string_lossy();
    let tmp: PathBuf = parent.join(format!(".{file_name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(internal(path, e));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha_known_vector() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn commit_writes_files_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = Outputs::default();
        out.add("b.txt", "two");
        out.add("sub/a.txt", "one");
        let m = out.commit(dir.path(), "test", 3, "", Inputs::default()).unwrap();
        assert_eq!(fs::read_to_string(dir.path().join("sub/a.txt")).unwrap(), "one");
        assert_eq!(m.outputs.iter().map(|d| d.path.as_str()).collect::<Vec<_>>(), ["b.txt", "sub/a.txt"]);
        let leftovers: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_name().to_string_lossy().starts_with('.'))
            .collect();
        assert!(leftovers.is_empty());
        assert!(dir.path().join("manifest.json").exists());
    }
}
