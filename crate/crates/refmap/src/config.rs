//! Pipeline configuration, read from a TOML file.
//!
//! Relative paths are resolved against the directory holding the config
//! file. Everything that can change results lives here rather than in
//! command-line flags, so a stage manifest's config hash pins it.

use std::path::{Path, PathBuf};

use refmap_core::corpus::SegmenterConfig;
use refmap_core::ecomap::FlowConfig;
use refmap_core::stats::Denominator;
use refmap_core::ResolverConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::sha256_hex;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    /// JSONL file or directory of `*.txt` memos.
    pub corpus: PathBuf,
    pub records: PathBuf,
    pub award_db: PathBuf,
    pub aliases: PathBuf,
    pub workdir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RemoteConfig {
    pub enabled: bool,
    pub base_url: String,
    /// Requests-per-second ceiling.
    pub rps: f64,
    pub max_retries: u32,
    /// Serve only cached responses.
    pub offline: bool,
    /// Defaults to `<workdir>/cache`.
    pub cache_dir: Option<PathBuf>,
    pub backoff_ms: u64,
    pub timeout_secs: u64,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        RemoteConfig {
            enabled: false,
            base_url: "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/esearch.fcgi".into(),
            rps: 3.0,
            max_retries: 3,
            offline: false,
            cache_dir: None,
            backoff_ms: 500,
            timeout_secs: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FundingConfig {
    /// Fail the link stage on a funder missing from the alias file.
    pub hard_fail: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsConfig {
    pub denominator: Denominator,
    pub ci_level: f64,
    /// Entities with fewer yearly observations get no test.
    pub min_obs: usize,
}

impl Default for StatsConfig {
    fn default() -> Self {
        StatsConfig {
            denominator: Denominator::PoolEntities,
            ci_level: 0.95,
            min_obs: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: Paths,
    #[serde(default)]
    pub segmenter: SegmenterConfig,
    #[serde(default)]
    pub resolver: ResolverConfig,
    #[serde(default)]
    pub remote: RemoteConfig,
    #[serde(default)]
    pub funding: FundingConfig,
    #[serde(default)]
    pub stats: StatsConfig,
    #[serde(default)]
    pub report: FlowConfig,
}

impl PipelineConfig {
    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let p = &mut cfg.paths;
        for path in [
            &mut p.corpus,
            &mut p.records,
            &mut p.award_db,
            &mut p.aliases,
            &mut p.workdir,
        ] {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        if let Some(dir) = cfg.remote.cache_dir.as_mut() {
            if dir.is_relative() {
                *dir = base.join(&*dir);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.stats.min_obs < 1 {
            return bad("stats.min_obs must be at least 1".into());
        }
        if !(self.stats.ci_level > 0.0 && self.stats.ci_level < 1.0) {
            return bad(format!("stats.ci_level {} outside (0, 1)", self.stats.ci_level));
        }
        if !(0.0..=1.0).contains(&self.resolver.threshold) {
            return bad(format!("resolver.threshold {} outside [0, 1]", self.resolver.threshold));
        }
        if self.resolver.margin.is_nan() || self.resolver.margin < 0.0 {
            return bad("resolver.margin must be non-negative".into());
        }
        if self.resolver.k < 1 {
            return bad("resolver.k must be at least 1".into());
        }
        if self.report.top_k < 1 {
            return bad("report.top_k must be at least 1".into());
        }
        if self.remote.enabled && (self.remote.rps.is_nan() || self.remote.rps <= 0.0) {
            return bad("remote.rps must be positive".into());
        }
        Ok(())
    }

    /// Checks that every input path exists.
    pub fn check_inputs(&self) -> Result<()> {
        let p = &self.paths;
        for (key, path) in [
            ("paths.corpus", &p.corpus),
            ("paths.records", &p.records),
            ("paths.award_db", &p.award_db),
            ("paths.aliases", &p.aliases),
        ] {
            if !path.exists() {
                return Err(Error::Config(format!("{key}: {} does not exist", path.display())));
            }
        }
        Ok(())
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.remote
            .cache_dir
            .clone()
            .unwrap_or_else(|| self.paths.workdir.join("cache"))
    }

    /// Hash of every setting that can affect outputs. Paths are left out:
    /// inputs are pinned by content hash instead.
    pub fn settings_hash(&self) -> String {
        self.section_hash(&["segmenter", "resolver", "remote", "funding", "stats", "report"])
    }

    /// Hash of the named top-level sections only.
    pub fn section_hash(&self, sections: &[&str]) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        let obj = v.as_object_mut().expect("config is a table");
        if let Some(remote) = obj.get_mut("remote").and_then(|r| r.as_object_mut()) {
            remote.remove("cache_dir");
        }
        let picked: serde_json::Map<_, _> = sections
            .iter()
            .filter_map(|k| obj.get(*k).map(|v| (k.to_string(), v.clone())))
            .collect();
        sha256_hex(serde_json::Value::Object(picked).to_string().as_bytes())
    }
}
