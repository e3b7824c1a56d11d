//! Per-stage manifests: the settings hash plus content hashes of every
//! input and output. A stage whose manifest still matches is skipped.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::io::{sha256_file, write_bytes};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub stage: String,
    pub config_hash: String,
    /// Logical input name -> SHA-256.
    pub inputs: BTreeMap<String, String>,
    /// Output path relative to the workdir -> SHA-256.
    pub outputs: BTreeMap<String, String>,
}

impl Manifest {
    pub fn path(workdir: &Path, stage: &str) -> PathBuf {
        workdir.join(stage).join("manifest.json")
    }

    pub fn load(workdir: &Path, stage: &str) -> Option<Manifest> {
        let text = std::fs::read_to_string(Self::path(workdir, stage)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn write(&self, workdir: &Path) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("manifest serializes");
        bytes.push(b'\n');
        write_bytes(&Self::path(workdir, &self.stage), &bytes)
    }

    /// True when settings and inputs are unchanged and every recorded output
    /// is still on disk with its recorded hash.
    pub fn is_current(&self, workdir: &Path, config_hash: &str, inputs: &BTreeMap<String, String>) -> bool {
        self.config_hash == config_hash
            && &self.inputs == inputs
            && self
                .outputs
                .iter()
                .all(|(rel, hash)| sha256_file(&workdir.join(rel)).is_ok_and(|h| &h == hash))
    }
}
