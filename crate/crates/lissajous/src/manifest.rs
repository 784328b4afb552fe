//! Run manifests: what was run, with which parameters, and the checksum of
//! every file it wrote.

use crate::error::{Error, Result};
use crate::io::{sha256_hex, to_json, GridMeta};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    /// Path relative to the output directory.
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Every flag with its resolved value, defaults included.
    pub parameters: BTreeMap<String, String>,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid: Option<GridMeta>,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    /// Arguments that repeat the run: the subcommand, then `--key value`
    /// in key order.
    pub fn argv(&self) -> Vec<String> {
        let mut out = vec![self.command.clone()];
        for (k, v) in &self.parameters {
            out.push(format!("--{k}"));
            out.push(v.clone());
        }
        out
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(Error::io(path))?;
        Ok(serde_json::from_slice(&bytes)?)
    }
}

/// Output directory that checksums everything written through it.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: BTreeMap<String, OutputFile>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(Error::io(root))?;
        Ok(Self {
            root: root.to_path_buf(),
            files: BTreeMap::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.path(name);
        fs::write(&path, bytes).map_err(Error::io(&path))?;
        self.insert(name, bytes);
        Ok(path)
    }

    /// Records a file some other writer already put in the directory.
    pub fn record(&mut self, name: &str) -> Result<()> {
        let path = self.path(name);
        let bytes = fs::read(&path).map_err(Error::io(&path))?;
        self.insert(name, &bytes);
        Ok(())
    }

    fn insert(&mut self, name: &str, bytes: &[u8]) {
        self.files.insert(
            name.to_string(),
            OutputFile {
                name: name.to_string(),
                bytes: bytes.len() as u64,
                sha256: sha256_hex(bytes),
            },
        );
    }

    /// Writes `manifest.json` listing every recorded file.
    pub fn finish(
        self,
        command: &str,
        parameters: BTreeMap<String, String>,
        grid: Option<GridMeta>,
    ) -> Result<RunManifest> {
        let manifest = RunManifest {
            command: command.to_string(),
            parameters,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            grid,
            outputs: self.files.into_values().collect(),
        };
        let path = self.root.join(MANIFEST_NAME);
        fs::write(&path, to_json(&manifest)?).map_err(Error::io(&path))?;
        Ok(manifest)
    }
}

/// Re-hashes every listed output; names of files whose checksum differs.
pub fn verify_outputs(root: &Path, manifest: &RunManifest) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    for f in &manifest.outputs {
        let path = root.join(&f.name);
        let bytes = fs::read(&path).map_err(Error::io(&path))?;
        if sha256_hex(&bytes) != f.sha256 {
            bad.push(f.name.clone());
        }
    }
    Ok(bad)
}
