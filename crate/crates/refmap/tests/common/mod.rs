#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use refmap::PipelineConfig;

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn bundled_toml() -> PathBuf {
    manifest_dir().join("fixtures/bundled/refmap.toml")
}

pub fn golden_dir() -> PathBuf {
    manifest_dir().join("tests/golden/bundled")
}

pub fn bundled_config(workdir: &Path) -> PipelineConfig {
    let mut cfg = PipelineConfig::load(&bundled_toml()).expect("bundled config loads");
    cfg.paths.workdir = workdir.to_path_buf();
    cfg
}

/// Every file under `root` keyed by its `/`-separated relative path.
pub fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        let Ok(entries) = fs::read_dir(dir) else { return };
        for entry in entries {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap();
                let key = rel
                    .components()
                    .map(|c| c.as_os_str().to_string_lossy())
                    .collect::<Vec<_>>()
                    .join("/");
                out.insert(key, fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

/// Pipeline outputs, leaving out stage manifests and the remote cache.
pub fn outputs(workdir: &Path) -> BTreeMap<String, Vec<u8>> {
    read_tree(workdir)
        .into_iter()
        .filter(|(k, _)| !k.ends_with("manifest.json") && !k.starts_with("cache/"))
        .collect()
}

/// Differences between two output trees, one line per file.
pub fn tree_diff(expected: &BTreeMap<String, Vec<u8>>, actual: &BTreeMap<String, Vec<u8>>) -> Vec<String> {
    let mut diffs = Vec::new();
    for (k, v) in expected {
        match actual.get(k) {
            None => diffs.push(format!("missing {k}")),
            Some(a) if a != v => diffs.push(format!("differs {k}")),
            _ => {}
        }
    }
    for k in actual.keys().filter(|k| !expected.contains_key(*k)) {
        diffs.push(format!("unexpected {k}"));
    }
    diffs
}

pub fn write_tree(root: &Path, files: &BTreeMap<String, Vec<u8>>) {
    if root.exists() {
        fs::remove_dir_all(root).unwrap();
    }
    for (k, v) in files {
        let path = root.join(k);
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(path, v).unwrap();
    }
}
