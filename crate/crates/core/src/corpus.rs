//! Reference-section extraction from pre-extracted memo text.
//!
//! A memo's reference section is the span after the *last* heading line that
//! matches one of the configured headings, up to the next terminator heading.
//! The section is split into fragments on blank lines and enumeration markers,
//! with hard-wrapped lines merged into the fragment they continue.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::char::{decompose_canonical, is_combining_mark};

/// A policy document with its extracted text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Memo {
    pub memo_id: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub decision_date: Option<String>,
    pub body_text: String,
}

/// One free-text citation string from a memo's reference section.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceFragment {
    pub memo_id: String,
    pub ordinal: usize,
    pub raw_text: String,
    pub normalized_text: String,
}

impl ReferenceFragment {
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.normalized_text.split(' ').filter(|t| !t.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SegmenterConfig {
    pub headings: Vec<String>,
    pub terminators: Vec<String>,
    /// Fragments shorter than this many characters are dropped.
    pub min_fragment_len: usize,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        Self {
            headings: ["References", "Bibliography", "Sources"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            terminators: ["Appendix"].iter().map(|s| s.to_string()).collect(),
            min_fragment_len: 25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SegmentError {
    #[error("segmenter config has an empty heading list")]
    EmptyHeadings,
    #[error("memo body text is empty")]
    EmptyBody,
}

fn heading_matches(line: &str, candidates: &[String]) -> bool {
    let line = line.trim();
    let line = line.strip_suffix(':').unwrap_or(line).trim_end();
    !line.is_empty()
        && candidates
            .iter()
            .any(|h| h.trim().to_lowercase() == line.to_lowercase())
}

/// Byte offsets of each line: (start, end-without-newline, next-line-start).
fn line_spans(text: &str) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
    let mut pos = 0;
    core::iter::from_fn(move || {
        if pos >= text.len() {
            return None;
        }
        let start = pos;
        let (end, next) = match text[start..].find('\n') {
            Some(i) => (start + i, start + i + 1),
            None => (text.len(), text.len()),
        };
        pos = next;
        let end = if text[start..end].ends_with('\r') { end - 1 } else { end };
        Some((start, end, next))
    })
}

/// Locates the reference section of `body`.
///
/// Returns `Ok(None)` when no heading matches or the section after the last
/// matching heading is blank.
pub fn segment_reference_section<'a>(body: &'a str, config: &SegmenterConfig) -> Result<Option<&'a str>, SegmentError> {
    if config.headings.iter().all(|h| h.trim().is_empty()) {
        return Err(SegmentError::EmptyHeadings);
    }
    if body.trim().is_empty() {
        return Err(SegmentError::EmptyBody);
    }
    let lines: Vec<_> = line_spans(body).collect();
    let Some(head) = lines
        .iter()
        .rposition(|&(s, e, _)| heading_matches(&body[s..e], &config.headings))
    else {
        return Ok(None);
    };
    let start = lines[head].2;
    let end = lines[head + 1..]
        .iter()
        .find(|&&(s, e, _)| heading_matches(&body[s..e], &config.terminators))
        .map(|&(s, _, _)| s)
        .unwrap_or(body.len());
    let span = &body[start..end];
    if span.trim().is_empty() {
        Ok(None)
    } else {
        Ok(Some(span))
    }
}

impl Memo {
    pub fn reference_text(&self, config: &SegmenterConfig) -> Result<Option<&str>, SegmentError> {
        segment_reference_section(&self.body_text, config)
    }
}

const BULLETS: &[char] = &['•', '·', '▪', '◦', '*', '-', '–'];

/// Returns the remainder of `line` after a leading enumeration marker
/// ("1.", "1)", "[1]", or a bullet), or `None` when there is no marker.
pub fn strip_marker(line: &str) -> Option<&str> {
    let line = line.trim_start();
    if let Some(rest) = line.strip_prefix('[') {
        let digits = rest.chars().take_while(|c| c.is_ascii_digit()).count();
        if (1..=3).contains(&digits) {
            if let Some(after) = rest[digits..].strip_prefix(']') {
                return Some(after.trim_start());
            }
        }
        return None;
    }
    let digits = line.chars().take_while(|c| c.is_ascii_digit()).count();
    if (1..=3).contains(&digits) {
        let rest = &line[digits..];
        let mut chars = rest.chars();
        if let Some('.' | ')') = chars.next() {
            let after = chars.as_str();
            if after.is_empty() || after.starts_with(char::is_whitespace) {
                return Some(after.trim_start());
            }
        }
        return None;
    }
    let mut chars = line.chars();
    match chars.next() {
        Some(c) if BULLETS.contains(&c) => {
            let after = chars.as_str();
            if after.starts_with(char::is_whitespace) {
                Some(after.trim_start())
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Splits a reference section into fragments with dense ordinals.
pub fn split_fragments(memo_id: &str, reference_text: &str, min_len: usize) -> Vec<ReferenceFragment> {
    let mut pieces: Vec<String> = Vec::new();
    let mut current: Option<String> = None;
    for line in reference_text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            pieces.extend(current.take());
            continue;
        }
        match strip_marker(trimmed) {
            Some(rest) => {
                pieces.extend(current.take());
                current = Some(rest.trim().to_string());
            }
            None => match current.as_mut() {
                Some(buf) => {
                    if !buf.is_empty() {
                        buf.push(' ');
                    }
                    buf.push_str(trimmed);
                }
                None => current = Some(trimmed.to_string()),
            },
        }
    }
    pieces.extend(current);

    pieces
        .into_iter()
        .filter(|p| p.chars().count() >= min_len)
        .filter_map(|raw| {
            let normalized = normalize_fragment(&raw);
            (!normalized.is_empty()).then_some((raw, normalized))
        })
        .enumerate()
        .map(|(ordinal, (raw_text, normalized_text))| ReferenceFragment {
            memo_id: memo_id.to_string(),
            ordinal,
            raw_text,
            normalized_text,
        })
        .collect()
}

/// Letters that have no canonical decomposition but fold to ASCII.
fn fold_letter(c: char, out: &mut String) -> bool {
    let s = match c {
        'ß' => "ss",
        'æ' => "ae",
        'œ' => "oe",
        'ø' => "o",
        'đ' | 'ð' => "d",
        'ł' => "l",
        'þ' => "th",
        'ı' => "i",
        'ħ' => "h",
        'ŧ' => "t",
        _ => return false,
    };
    out.push_str(s);
    true
}

/// Case-folds, strips diacritics, and collapses every non-alphanumeric run
/// into a single space. Idempotent.
pub fn normalize_fragment(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    let push = |out: &mut String, c: char, pending: &mut bool| {
        if *pending && !out.is_empty() {
            out.push(' ');
        }
        *pending = false;
        out.push(c);
    };
    for c in raw.chars() {
        let mut decomposed: [char; 8] = ['\0'; 8];
        let mut n = 0;
        decompose_canonical(c, |d| {
            if n < decomposed.len() {
                decomposed[n] = d;
                n += 1;
            }
        });
        for &d in &decomposed[..n] {
            if is_combining_mark(d) {
                continue;
            }
            for l in d.to_lowercase() {
                if is_combining_mark(l) {
                    continue;
                }
                let mut folded = String::new();
                if fold_letter(l, &mut folded) {
                    for f in folded.chars() {
                        push(&mut out, f, &mut pending_space);
                    }
                } else if l.is_ascii_digit() || (l.is_alphabetic() && !l.is_uppercase()) {
                    push(&mut out, l, &mut pending_space);
                } else {
                    pending_space = true;
                }
            }
        }
    }
    out
}

/// Splits normalized text into words.
pub fn words(normalized: &str) -> impl Iterator<Item = &str> {
    normalized.split(' ').filter(|w| !w.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;

    fn cfg() -> SegmenterConfig {
        SegmenterConfig::default()
    }

    #[test]
    fn single_heading_span() {
        let body = "Decision memo\nSome text.\nReferences\n1. Smith J. A study. 2005.\n";
        let span = segment_reference_section(body, &cfg()).unwrap().unwrap();
        assert_eq!(span, "1. Smith J. A study. 2005.\n");
    }

    #[test]
    fn no_heading_is_none() {
        let body = "Decision memo\nNothing to cite here.\n";
        assert_eq!(segment_reference_section(body, &cfg()).unwrap(), None);
    }

    #[test]
    fn last_heading_wins() {
        let body = "Intro\nReferences\nsee below\nBody text\n  references  \nA. Real citation list\n";
        // oracle: last line equal (case-insensitively, trimmed) to a heading
        let last = body
            .lines()
            .enumerate()
            .filter(|(_, l)| l.trim().eq_ignore_ascii_case("references"))
            .map(|(i, _)| i)
            .last()
            .unwrap();
        let expected: Vec<&str> = body.lines().skip(last + 1).collect();
        let span = segment_reference_section(body, &cfg()).unwrap().unwrap();
        assert_eq!(span.lines().collect::<Vec<_>>(), expected);
    }

    #[test]
    fn terminator_ends_span() {
        let body = "References\n1. One citation that is long enough.\nAPPENDIX\nTable A\n";
        let span = segment_reference_section(body, &cfg()).unwrap().unwrap();
        assert_eq!(span, "1. One citation that is long enough.\n");
    }

    #[test]
    fn empty_heading_list_is_config_error() {
        let c = SegmenterConfig {
            headings: vec![],
            ..cfg()
        };
        assert_eq!(segment_reference_section("x", &c), Err(SegmentError::EmptyHeadings));
    }

    #[test]
    fn span_is_substring_of_body() {
        let body = "Title\r\nReferences:\r\n[1] Alpha beta gamma delta epsilon.\r\n";
        let span = segment_reference_section(body, &cfg()).unwrap().unwrap();
        let start = span.as_ptr() as usize - body.as_ptr() as usize;
        assert_eq!(&body[start..start + span.len()], span);
    }

    #[test]
    fn two_markers_two_fragments() {
        let text = "1. Alpha study of something important\n\n2. Beta study of something else entirely";
        let frags = split_fragments("M1", text, 25);
        assert_eq!(frags.len(), 2);
        assert_eq!(frags[0].raw_text, "Alpha study of something important");
        assert_eq!(frags[1].ordinal, 1);
    }

    #[test]
    fn continuation_lines_merge() {
        let text = "1. Smith J, Jones K. A randomized trial of\nsomething quite long that wraps\nacross three lines. JAMA 2005.\n";
        let frags = split_fragments("M1", text, 25);
        assert_eq!(frags.len(), 1);
        assert_eq!(
            frags[0].raw_text,
            "Smith J, Jones K. A randomized trial of something quite long that wraps across three lines. JAMA 2005."
        );
    }

    #[test]
    fn short_debris_dropped_and_ordinals_dense() {
        let text = "Page 12\n\n1. A citation that is certainly long enough.\n\n- 3\n\n2. Another citation that is long enough too.";
        let frags = split_fragments("M", text, 25);
        let ords: Vec<_> = frags.iter().map(|f| f.ordinal).collect();
        assert_eq!(ords, vec![0, 1]);
    }

    #[test]
    fn marker_forms() {
        assert_eq!(strip_marker("1. Foo"), Some("Foo"));
        assert_eq!(strip_marker("12) Foo"), Some("Foo"));
        assert_eq!(strip_marker("[3] Foo"), Some("Foo"));
        assert_eq!(strip_marker("[3]Foo"), Some("Foo"));
        assert_eq!(strip_marker("• Foo"), Some("Foo"));
        assert_eq!(strip_marker("2005. Foo"), None);
        assert_eq!(strip_marker("1.5 mg"), None);
        assert_eq!(strip_marker("-Foo"), None);
        assert_eq!(strip_marker("Foo"), None);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_fragment("Müller, J. (2005)!"), "muller j 2005");
        assert_eq!(normalize_fragment("muller j 2005"), "muller j 2005");
        assert_eq!(normalize_fragment("  Straße -- Øresund  "), "strasse oresund");
        assert_eq!(normalize_fragment("!!!"), "");
        assert_eq!(normalize_fragment("İstanbul"), "istanbul");
    }

    #[test]
    fn words_skip_empty() {
        let n = normalize_fragment("a  b,c");
        let w: Vec<_> = words(&n).collect();
        assert_eq!(w, vec!["a", "b", "c"]);
        let _ = format!("{w:?}");
    }

    proptest::proptest! {
        #[test]
        fn normalize_is_idempotent(s in "\\PC{0,60}") {
            let once = normalize_fragment(&s);
            proptest::prop_assert_eq!(normalize_fragment(&once), once.clone());
            proptest::prop_assert!(!once.starts_with(' ') && !once.ends_with(' '));
            proptest::prop_assert!(!once.contains("  "));
        }

        #[test]
        fn split_is_deterministic_and_subsequence(
            lines in proptest::collection::vec("(\\[[0-9]\\] |[0-9]\\. |• |)[A-Za-z ,.]{0,40}", 0..12)
        ) {
            let text = lines.join("\n");
            let a = split_fragments("M", &text, 5);
            let b = split_fragments("M", &text, 5);
            proptest::prop_assert_eq!(&a, &b);
            let hay: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
            let needle: Vec<char> = a
                .iter()
                .flat_map(|f| f.raw_text.chars())
                .filter(|c| !c.is_whitespace())
                .collect();
            let mut it = hay.iter();
            for c in &needle {
                proptest::prop_assert!(it.any(|h| h == c));
            }
            for f in &a {
                proptest::prop_assert!(!f.normalized_text.is_empty());
            }
        }
    }
}
