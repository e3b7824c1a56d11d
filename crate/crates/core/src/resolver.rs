//! Citation resolution: weighted-overlap scoring with an acceptance margin,
//! followed by an optional fallback lookup.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::biblio::{ArticleRecord, BiblioIndex, MAX_YEAR, MIN_YEAR};
use crate::corpus::{words, ReferenceFragment};
use crate::stats::summary::{quartiles, Quartiles};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lexical,
    RemoteFallback,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionResult {
    pub memo_id: String,
    pub ordinal: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub article_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    pub method: Method,
}

impl ResolutionResult {
    pub fn is_linked(&self) -> bool {
        self.article_id.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageStats {
    pub memo_id: String,
    pub fragment_count: usize,
    pub linked_count: usize,
    /// `None` for memos without fragments.
    pub linked_pct: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ResolverConfig {
    pub threshold: f64,
    pub margin: f64,
    pub k: usize,
}

impl Default for ResolverConfig {
    fn default() -> Self {
        Self {
            threshold: 0.55,
            margin: 0.05,
            k: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("fallback lookup unavailable: {0}")]
pub struct FallbackError(pub String);

/// A secondary resolver consulted when lexical matching fails.
pub trait Fallback {
    /// Returns an article id only for an unambiguous single match.
    fn lookup(&self, fragment_text: &str) -> Result<Option<String>, FallbackError>;
}

/// Four-digit tokens that look like publication years.
fn years_in<'a, I>(tokens: I) -> impl Iterator<Item = i32> + 'a
where
    I: Iterator<Item = &'a str> + 'a,
{
    tokens.filter_map(|t| {
        if t.len() == 4 && t.bytes().all(|b| b.is_ascii_digit()) {
            t.parse::<i32>().ok().filter(|y| (MIN_YEAR..=MAX_YEAR).contains(y))
        } else {
            None
        }
    })
}

fn overlap(reference: &BTreeSet<String>, fragment: &BTreeSet<&str>) -> f64 {
    if reference.is_empty() {
        return 0.0;
    }
    let shared = reference.iter().filter(|t| fragment.contains(t.as_str())).count();
    (shared as f64 / reference.len() as f64).clamp(0.0, 1.0)
}

/// Score in [0, 1]: 0.6 title + 0.2 authors + 0.1 journal + 0.1 year.
pub fn score_candidate(fragment: &ReferenceFragment, record: &ArticleRecord) -> f64 {
    score_normalized(&fragment.normalized_text, record)
}

pub fn score_normalized(normalized: &str, record: &ArticleRecord) -> f64 {
    let frag: BTreeSet<&str> = words(normalized).collect();

    let title = overlap(&record.title_tokens(), &frag);

    let surnames = record.surname_tokens();
    let authors = if surnames.is_empty() {
        0.0
    } else {
        let hit = surnames
            .iter()
            .filter(|s| s.iter().all(|w| frag.contains(w.as_str())))
            .count();
        hit as f64 / surnames.len() as f64
    };

    let journal = overlap(&record.journal_tokens(), &frag);

    let year = match record.pub_year {
        Some(py) => {
            let mut best: f64 = 0.0;
            for y in years_in(frag.iter().copied()) {
                if y == py {
                    best = 1.0;
                } else if (y - py).abs() == 1 {
                    best = best.max(0.5);
                }
            }
            best
        }
        None => 0.0,
    };

    // integer weights keep the perfect and title-only scores exact
    ((6.0 * title + 2.0 * authors + journal + year) / 10.0).clamp(0.0, 1.0)
}

/// Best and runner-up candidate of a fragment, for auditing decisions.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidates {
    pub best: Option<(String, f64)>,
    pub second_score: f64,
}

pub fn rank_candidates(fragment: &ReferenceFragment, index: &BiblioIndex, config: &ResolverConfig) -> Candidates {
    let year_hint = years_in(fragment.tokens()).next();
    let hits = index.search(fragment.tokens(), year_hint, config.k.max(1));
    let mut scored: Vec<(f64, usize, &ArticleRecord)> = hits
        .iter()
        .enumerate()
        .map(|(rank, h)| (score_candidate(fragment, h.record), rank, h.record))
        .collect();
    // descending score; search rank breaks exact ties
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    Candidates {
        best: scored.first().map(|(s, _, r)| (r.article_id.clone(), *s)),
        second_score: scored.get(1).map(|c| c.0).unwrap_or(0.0),
    }
}

pub fn resolve_fragment(
    fragment: &ReferenceFragment,
    index: &BiblioIndex,
    config: &ResolverConfig,
    fallback: Option<&dyn Fallback>,
) -> ResolutionResult {
    let candidates = rank_candidates(fragment, index, config);
    let mut result = ResolutionResult {
        memo_id: fragment.memo_id.clone(),
        ordinal: fragment.ordinal,
        article_id: None,
        score: None,
        method: Method::Unresolved,
    };
    if let Some((id, best)) = candidates.best {
        if best >= config.threshold && best - candidates.second_score >= config.margin {
            result.article_id = Some(id);
            result.score = Some(best);
            result.method = Method::Lexical;
            return result;
        }
    }
    if let Some(fb) = fallback {
        match fb.lookup(&fragment.raw_text) {
            Ok(Some(id)) => {
                result.article_id = Some(id);
                result.method = Method::RemoteFallback;
            }
            Ok(None) => {}
            Err(e) => log::warn!("{} #{}: {e}; leaving unresolved", fragment.memo_id, fragment.ordinal),
        }
    }
    result
}

/// Per-memo coverage. Every id in `memo_ids` gets a row, including memos
/// without fragments; rows are ordered by memo id.
pub fn coverage<'a>(
    results: &'a [ResolutionResult],
    memo_ids: impl IntoIterator<Item = &'a str>,
) -> Vec<CoverageStats> {
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for id in memo_ids {
        counts.entry(id).or_default();
    }
    for r in results {
        let c = counts.entry(r.memo_id.as_str()).or_default();
        c.0 += 1;
        if r.is_linked() {
            c.1 += 1;
        }
    }
    counts
        .into_iter()
        .map(|(memo_id, (fragment_count, linked_count))| CoverageStats {
            memo_id: memo_id.into(),
            fragment_count,
            linked_count,
            linked_pct: (fragment_count > 0).then(|| 100.0 * linked_count as f64 / fragment_count as f64),
        })
        .collect()
}

/// Median and interquartile range of `linked_pct`, skipping memos without
/// fragments. `None` when no memo qualifies.
pub fn coverage_summary(stats: &[CoverageStats]) -> Option<Quartiles> {
    let pcts: Vec<f64> = stats.iter().filter_map(|s| s.linked_pct).collect();
    quartiles(&pcts)
}

/// Resolves every fragment; results are ordered by (memo_id, ordinal).
pub fn resolve_corpus(
    fragments: &[ReferenceFragment],
    index: &BiblioIndex,
    config: &ResolverConfig,
    fallback: Option<&dyn Fallback>,
) -> (Vec<ResolutionResult>, Vec<CoverageStats>) {
    let mut results: Vec<ResolutionResult> = fragments
        .iter()
        .map(|f| resolve_fragment(f, index, config, fallback))
        .collect();
    sort_results(&mut results);
    let cov = coverage(&results, core::iter::empty());
    (results, cov)
}

pub fn sort_results(results: &mut [ResolutionResult]) {
    results.sort_by(|a, b| (&a.memo_id, a.ordinal).cmp(&(&b.memo_id, b.ordinal)));
}
