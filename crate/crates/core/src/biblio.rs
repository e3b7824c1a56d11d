//! Local bibliographic index.
//!
//! Records are indexed by normalized tokens from title, authors and journal.
//! Words shorter than two characters are indexed only for the author field,
//! where they carry initials.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Reverse;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{normalize_fragment, words};

pub const MIN_YEAR: i32 = 1800;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Author {
    pub surname: String,
    #[serde(default)]
    pub initials: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrantTag {
    pub award_text: String,
    pub funder_text: String,
}

/// A bibliographic record. `article_id` is PMID-like and opaque.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleRecord {
    pub article_id: String,
    pub title: String,
    #[serde(default)]
    pub authors: Vec<Author>,
    #[serde(default)]
    pub journal: String,
    #[serde(default)]
    pub pub_year: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pages: Option<String>,
    #[serde(default)]
    pub grant_tags: Vec<GrantTag>,
    #[serde(default)]
    pub retracted: bool,
}

impl ArticleRecord {
    pub fn title_tokens(&self) -> BTreeSet<String> {
        long_words(&self.title)
    }

    pub fn journal_tokens(&self) -> BTreeSet<String> {
        long_words(&self.journal)
    }

    /// Each surname as its list of normalized words.
    pub fn surname_tokens(&self) -> Vec<Vec<String>> {
        self.authors
            .iter()
            .map(|a| {
                words(&normalize_fragment(&a.surname))
                    .map(String::from)
                    .collect::<Vec<_>>()
            })
            .filter(|w| !w.is_empty())
            .collect()
    }

    fn index_tokens(&self) -> BTreeSet<String> {
        let mut out = self.title_tokens();
        out.extend(self.journal_tokens());
        for a in &self.authors {
            out.extend(words(&normalize_fragment(&a.surname)).map(String::from));
            out.extend(
                normalize_fragment(&a.initials)
                    .chars()
                    .filter(|c| c.is_alphanumeric())
                    .map(String::from),
            );
        }
        out
    }
}

fn long_words(text: &str) -> BTreeSet<String> {
    words(&normalize_fragment(text))
        .filter(|w| w.chars().count() >= 2)
        .map(String::from)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexStats {
    pub record_count: usize,
    pub token_count: usize,
    /// Unix seconds; filled in by callers that have a clock.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub build_timestamp: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error("duplicate article_id {id:?} (record {position})")]
    DuplicateId { id: String, position: usize },
    #[error("record {position}: {reason}")]
    Invalid { position: usize, reason: String },
}

impl IndexError {
    pub fn position(&self) -> usize {
        match self {
            IndexError::DuplicateId { position, .. } | IndexError::Invalid { position, .. } => *position,
        }
    }
}

/// A search result with its shared-token count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchHit<'a> {
    pub record: &'a ArticleRecord,
    pub shared: usize,
}

/// Immutable after [`BiblioIndex::build`].
#[derive(Debug, Clone, Default)]
pub struct BiblioIndex {
    records: Vec<ArticleRecord>,
    by_id: BTreeMap<String, usize>,
    postings: BTreeMap<String, Vec<usize>>,
    by_year: BTreeMap<i32, Vec<usize>>,
}

impl BiblioIndex {
    /// Builds the index; positions in errors are 0-based record positions.
    pub fn build<I>(records: I) -> Result<Self, IndexError>
    where
        I: IntoIterator<Item = ArticleRecord>,
    {
        let mut index = BiblioIndex::default();
        for (position, record) in records.into_iter().enumerate() {
            if record.article_id.trim().is_empty() {
                return Err(IndexError::Invalid {
                    position,
                    reason: "empty article_id".into(),
                });
            }
            if let Some(y) = record.pub_year {
                if !(MIN_YEAR..=MAX_YEAR).contains(&y) {
                    return Err(IndexError::Invalid {
                        position,
                        reason: alloc::format!("pub_year {y} outside [{MIN_YEAR}, {MAX_YEAR}]"),
                    });
                }
            }
            if index.by_id.contains_key(&record.article_id) {
                return Err(IndexError::DuplicateId {
                    id: record.article_id,
                    position,
                });
            }
            let slot = index.records.len();
            for tok in record.index_tokens() {
                index.postings.entry(tok).or_default().push(slot);
            }
            if let Some(y) = record.pub_year {
                index.by_year.entry(y).or_default().push(slot);
            }
            index.by_id.insert(record.article_id.clone(), slot);
            index.records.push(record);
        }
        Ok(index)
    }

    pub fn stats(&self) -> IndexStats {
        IndexStats {
            record_count: self.records.len(),
            token_count: self.postings.len(),
            build_timestamp: None,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, article_id: &str) -> Option<&ArticleRecord> {
        self.by_id.get(article_id).map(|&i| &self.records[i])
    }

    pub fn records(&self) -> &[ArticleRecord] {
        &self.records
    }

    pub fn by_year(&self, year: i32) -> impl Iterator<Item = &ArticleRecord> {
        self.by_year.get(&year).into_iter().flatten().map(|&i| &self.records[i])
    }

    /// Up to `k` records sharing at least one token with the query, ordered by
    /// shared-token count (desc), distance to `year_hint` (asc), then
    /// `article_id` (asc).
    pub fn search<'q, T>(&self, tokens: T, year_hint: Option<i32>, k: usize) -> Vec<SearchHit<'_>>
    where
        T: IntoIterator<Item = &'q str>,
    {
        let query: BTreeSet<&str> = tokens.into_iter().collect();
        let mut shared: BTreeMap<usize, usize> = BTreeMap::new();
        for tok in query {
            if let Some(slots) = self.postings.get(tok) {
                for &s in slots {
                    *shared.entry(s).or_default() += 1;
                }
            }
        }
        let year_distance = |r: &ArticleRecord| match (year_hint, r.pub_year) {
            (Some(h), Some(y)) => (h - y).unsigned_abs(),
            (Some(_), None) => u32::MAX,
            (None, _) => 0,
        };
        let mut hits: Vec<SearchHit<'_>> = shared
            .into_iter()
            .map(|(slot, n)| SearchHit {
                record: &self.records[slot],
                shared: n,
            })
            .collect();
        hits.sort_by(|a, b| {
            (Reverse(a.shared), year_distance(a.record), &a.record.article_id).cmp(&(
                Reverse(b.shared),
                year_distance(b.record),
                &b.record.article_id,
            ))
        });
        hits.truncate(k);
        hits
    }
}
