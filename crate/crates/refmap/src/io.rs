//! JSONL/CSV readers and writers for pipeline inputs and artifacts.

use std::fs;
use std::path::Path;

use refmap_core::{ArticleRecord, Award, BiblioIndex, IndexError, Memo};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))
}

/// Parses one JSON value per non-blank line. Returns values with their
/// 1-based line numbers.
pub fn read_jsonl_lines<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>> {
    let text = read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push((i + 1, value));
    }
    Ok(out)
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    Ok(read_jsonl_lines(path)?.into_iter().map(|(_, v)| v).collect())
}

pub fn jsonl_bytes<T: Serialize>(items: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, item).expect("artifact types serialize");
        out.push(b'\n');
    }
    out
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    write_bytes(path, &jsonl_bytes(items))
}

/// CSV bytes with a header row and LF line endings.
pub fn csv_bytes<R: AsRef<[u8]>>(header: &[&str], rows: impl IntoIterator<Item = Vec<R>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    Ok(sha256_hex(&bytes))
}

/// Memo metadata without the body, as written to the workdir.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoInfo {
    pub memo_id: String,
    #[serde(default)]
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision_date: Option<String>,
}

impl From<&Memo> for MemoInfo {
    fn from(m: &Memo) -> Self {
        MemoInfo {
            memo_id: m.memo_id.clone(),
            title: m.title.clone(),
            decision_date: m.decision_date.clone(),
        }
    }
}

/// Loads memos from a JSONL file, or from a directory where each `*.txt`
/// file is one memo named by its file stem. Memos are sorted by id.
pub fn load_memos(path: &Path) -> Result<Vec<Memo>> {
    let mut memos = if path.is_dir() {
        let entries = fs::read_dir(path).map_err(|e| Error::io(format!("listing {}", path.display()), e))?;
        let mut memos = Vec::new();
        for entry in entries {
            let p = entry
                .map_err(|e| Error::io(format!("listing {}", path.display()), e))?
                .path();
            if p.extension().and_then(|e| e.to_str()) != Some("txt") {
                continue;
            }
            let memo_id = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
            memos.push(Memo {
                memo_id,
                title: String::new(),
                decision_date: None,
                body_text: read_to_string(&p)?,
            });
        }
        memos
    } else {
        read_jsonl::<Memo>(path)?
    };
    memos.sort_by(|a, b| a.memo_id.cmp(&b.memo_id));
    if let Some(w) = memos.windows(2).find(|w| w[0].memo_id == w[1].memo_id) {
        return Err(Error::Input {
            path: path.to_path_buf(),
            message: format!("duplicate memo_id {:?}", w[0].memo_id),
        });
    }
    Ok(memos)
}

/// Reads records JSONL and builds the index; errors name the offending line.
pub fn load_records(path: &Path) -> Result<BiblioIndex> {
    let lines: Vec<(usize, ArticleRecord)> = read_jsonl_lines(path)?;
    let line_of: Vec<usize> = lines.iter().map(|(l, _)| *l).collect();
    BiblioIndex::build(lines.into_iter().map(|(_, r)| r)).map_err(|e| {
        let line = line_of[e.position()];
        let message = match e {
            IndexError::DuplicateId { id, .. } => format!("duplicate article_id {id:?}"),
            IndexError::Invalid { reason, .. } => reason,
        };
        Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        }
    })
}

pub fn load_awards(path: &Path) -> Result<Vec<Award>> {
    read_jsonl(path)
}

#[derive(Debug, Deserialize)]
struct AliasRow {
    raw_name: String,
    canonical_code: String,
}

/// Two-column CSV `raw_name,canonical_code` with a header row.
pub fn load_aliases(path: &Path) -> Result<Vec<(String, String)>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<AliasRow>().enumerate() {
        let row = row.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 2,
            message: e.to_string(),
        })?;
        out.push((row.raw_name, row.canonical_code));
    }
    Ok(out)
}

/// Fixed-precision float cell; empty for `None`.
pub fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map(|x| fmt_f(x, digits)).unwrap_or_default()
}

/// Fixed precision without a negative zero.
pub fn fmt_f(x: f64, digits: usize) -> String {
    let s = format!("{x:.digits$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}
