//! Run manifests: input and output digests plus the effective
//! configuration. No timestamps, so identical runs give identical files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Failure;

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: &'static str,
    pub inputs: BTreeMap<String, FileDigest>,
    pub config: serde_json::Value,
    pub outputs: BTreeMap<String, FileDigest>,
}

pub fn sha256_file(path: &Path) -> anyhow::Result<String> {
    let bytes = std::fs::read(path).map_err(|_| Failure::MissingInput(path.display().to_string()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl Manifest {
    pub fn new(command: impl Into<String>, config: impl Serialize) -> anyhow::Result<Self> {
        Ok(Manifest {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION"),
            inputs: BTreeMap::new(),
            config: serde_json::to_value(config)?,
            outputs: BTreeMap::new(),
        })
    }

    pub fn input(&mut self, name: &str, path: &Path) -> anyhow::Result<()> {
        let digest = FileDigest {
            path: path.to_path_buf(),
            sha256: sha256_file(path)?,
        };
        self.inputs.insert(name.to_string(), digest);
        Ok(())
    }

    pub fn output(&mut self, name: &str, path: &Path) -> anyhow::Result<()> {
        let digest = FileDigest {
            path: path.to_path_buf(),
            sha256: sha256_file(path)?,
        };
        self.outputs.insert(name.to_string(), digest);
        Ok(())
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}
