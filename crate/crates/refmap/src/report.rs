//! CSV layouts of stage artifacts.

use refmap_core::ecomap::{CoveragePoint, RetractionFlag, TableRow};
use refmap_core::stats::summary::Quartiles;
use refmap_core::stats::{EntityTest, FunderYearShare};
use refmap_core::CoverageStats;
use serde::{Deserialize, Serialize};

use crate::io::{csv_bytes, fmt_f, fmt_opt};

/// Per-memo concentration of support; a class without entity data is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KldRow {
    pub memo_id: String,
    pub kld_f: Option<f64>,
    pub kld_ro: Option<f64>,
    pub n_f: usize,
    pub n_ro: usize,
}

pub fn shares_csv(rows: &[FunderYearShare]) -> Vec<u8> {
    csv_bytes(
        &[
            "entity",
            "year",
            "memo_count",
            "pool_count",
            "memo_pct",
            "pool_pct",
            "diff_pct",
        ],
        rows.iter().map(|r| {
            vec![
                r.entity.clone(),
                r.year.to_string(),
                r.memo_count.to_string(),
                r.pool_count.to_string(),
                fmt_f(r.memo_pct, 6),
                fmt_f(r.pool_pct, 6),
                fmt_f(r.diff_pct, 6),
            ]
        }),
    )
}

pub fn tests_csv(tests: &[EntityTest]) -> Vec<u8> {
    csv_bytes(
        &["entity", "n_obs", "median_diff", "ci_lo", "ci_hi", "p_value", "note"],
        tests.iter().map(|t| {
            let r = t.result.as_ref();
            vec![
                t.entity.clone(),
                t.n_obs.to_string(),
                fmt_opt(r.map(|r| r.median_diff), 4),
                fmt_opt(r.map(|r| r.ci_lo), 4),
                fmt_opt(r.map(|r| r.ci_hi), 4),
                fmt_opt(r.map(|r| r.p_value), 6),
                t.note.clone().unwrap_or_default(),
            ]
        }),
    )
}

/// Funder or recipient table: percent of awards at two decimals, blank
/// statistics for entities without a test.
pub fn table_csv(rows: &[TableRow]) -> Vec<u8> {
    csv_bytes(
        &[
            "entity",
            "label",
            "n_awards",
            "pct_awards",
            "n_obs",
            "median_diff",
            "ci_lo",
            "ci_hi",
            "p_value",
        ],
        rows.iter().map(|r| {
            let s = r.stat.as_ref();
            vec![
                r.entity.clone(),
                r.label.clone(),
                r.n_awards.to_string(),
                fmt_f(r.pct_awards, 2),
                r.n_obs.map(|n| n.to_string()).unwrap_or_default(),
                fmt_opt(s.map(|s| s.median_diff), 4),
                fmt_opt(s.map(|s| s.ci_lo), 4),
                fmt_opt(s.map(|s| s.ci_hi), 4),
                fmt_opt(s.map(|s| s.p_value), 6),
            ]
        }),
    )
}

pub fn kld_csv(rows: &[KldRow]) -> Vec<u8> {
    csv_bytes(
        &["memo_id", "kld_f", "kld_ro", "n_f", "n_ro"],
        rows.iter().map(|r| {
            vec![
                r.memo_id.clone(),
                fmt_opt(r.kld_f, 6),
                fmt_opt(r.kld_ro, 6),
                r.n_f.to_string(),
                r.n_ro.to_string(),
            ]
        }),
    )
}

pub fn coverage_csv(stats: &[CoverageStats]) -> Vec<u8> {
    csv_bytes(
        &["memo_id", "fragment_count", "linked_count", "linked_pct"],
        stats.iter().map(|s| {
            vec![
                s.memo_id.clone(),
                s.fragment_count.to_string(),
                s.linked_count.to_string(),
                fmt_opt(s.linked_pct, 2),
            ]
        }),
    )
}

pub fn scatter_csv(points: &[CoveragePoint]) -> Vec<u8> {
    csv_bytes(
        &["memo_id", "fragment_count", "linked_pct"],
        points
            .iter()
            .map(|p| vec![p.memo_id.clone(), p.fragment_count.to_string(), fmt_f(p.linked_pct, 2)]),
    )
}

pub fn summary_csv(summary: Option<&Quartiles>) -> Vec<u8> {
    let row = match summary {
        Some(q) => vec![
            q.n.to_string(),
            fmt_f(q.median, 2),
            fmt_f(q.q1, 2),
            fmt_f(q.q3, 2),
            fmt_f(q.iqr, 2),
        ],
        None => vec!["0".into(), String::new(), String::new(), String::new(), String::new()],
    };
    csv_bytes(&["n", "median_linked_pct", "q1", "q3", "iqr"], [row])
}

pub fn retractions_csv(flags: &[RetractionFlag]) -> Vec<u8> {
    csv_bytes(
        &["memo_id", "article_id", "note"],
        flags
            .iter()
            .map(|f| vec![f.memo_id.clone(), f.article_id.clone(), f.note.clone()]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use refmap_core::stats::StatResult;

    #[test]
    fn excluded_entity_has_blank_stats() {
        let rows = [
            TableRow {
                entity: "NCI".into(),
                label: "NCI".into(),
                n_awards: 3,
                pct_awards: 75.0,
                n_obs: Some(6),
                stat: Some(StatResult {
                    entity: "NCI".into(),
                    n: 6,
                    median_diff: 1.25,
                    ci_lo: -0.5,
                    ci_hi: 3.0,
                    p_value: 0.03125,
                }),
            },
            TableRow {
                entity: "PHS".into(),
                label: "PHS".into(),
                n_awards: 1,
                pct_awards: 25.0,
                n_obs: Some(3),
                stat: None,
            },
        ];
        let text = String::from_utf8(table_csv(&rows)).unwrap();
        assert_eq!(
            text,
            "entity,label,n_awards,pct_awards,n_obs,median_diff,ci_lo,ci_hi,p_value\n\
             NCI,NCI,3,75.00,6,1.2500,-0.5000,3.0000,0.031250\n\
             PHS,PHS,1,25.00,3,,,,\n"
        );
    }

    #[test]
    fn empty_summary_row() {
        assert_eq!(summary_csv(None), b"n,median_linked_pct,q1,q3,iqr\n0,,,,\n");
    }
}
