//! Article-award linkage.
//!
//! Links come from two directions: grant tags listed on the article itself,
//! and award records that cite the article. When both directions produce the
//! same (article, core project) pair the award-database draft wins, since only
//! it carries organization identity. Every link is then assigned a project
//! year from the award history of its core number.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::biblio::ArticleRecord;
use crate::corpus::normalize_fragment;

pub const UNMAPPED: &str = "UNMAPPED";

/// Funder codes folded into another code before use. NCRR's portfolio
/// moved to NCATS when NCRR was retired.
const MERGED_FUNDERS: &[(&str, &str)] = &[("NCRR", "NCATS")];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Award {
    pub full_project_number: String,
    pub core_project_number: String,
    pub funder_code: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub org_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub org_name: Option<String>,
    pub fiscal_year: i32,
    #[serde(default)]
    pub cited_article_ids: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkSource {
    ArticleMetadata,
    AwardDatabase,
}

/// A link before merging and year imputation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkDraft {
    pub article_id: String,
    pub core_project_number: String,
    pub full_project_number: Option<String>,
    pub funder_code: String,
    pub source: LinkSource,
    pub org_id: Option<String>,
    pub org_name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleAwardLink {
    pub article_id: String,
    pub core_project_number: String,
    pub funder_code: String,
    pub source: LinkSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub org_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub org_name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imputed_full_project: Option<String>,
    pub imputed_year: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FundingError {
    #[error("article {article_id}: funder {raw:?} has no alias")]
    UnmappedFunder { article_id: String, raw: String },
    #[error("award {full:?}: core project number {core:?} is not a prefix of the full number")]
    CoreMismatch { full: String, core: String },
    #[error("duplicate full project number {0:?}")]
    DuplicateAward(String),
    #[error("alias {raw:?} maps to an empty code")]
    EmptyCode { raw: String },
}

/// Canonical form of an award identifier: whitespace removed, upper-cased.
pub fn canonical_award_text(text: &str) -> String {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .flat_map(char::to_uppercase)
        .collect()
}

/// Core project number of an award identifier: the canonical text up to the
/// first hyphen ("R01 CA031770-02" -> "R01CA031770").
pub fn core_project_number(award_text: &str) -> String {
    let canon = canonical_award_text(award_text);
    match canon.find('-') {
        Some(i) => canon[..i].to_string(),
        None => canon,
    }
}

/// Raw funder strings to a closed vocabulary of canonical codes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FunderAliasTable {
    aliases: BTreeMap<String, String>,
    vocabulary: BTreeSet<String>,
    /// Fail linkage on an unmapped funder instead of warning.
    pub hard_fail: bool,
}

fn merged_code(code: &str) -> &str {
    MERGED_FUNDERS
        .iter()
        .find(|(from, _)| *from == code)
        .map(|(_, to)| *to)
        .unwrap_or(code)
}

impl FunderAliasTable {
    /// Builds the table from `(raw_name, canonical_code)` pairs. Every code is
    /// also an alias of itself.
    pub fn from_pairs<I, A, B>(pairs: I) -> Result<Self, FundingError>
    where
        I: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let mut table = FunderAliasTable::default();
        for (raw, code) in pairs {
            let code = code.as_ref().trim();
            if code.is_empty() {
                return Err(FundingError::EmptyCode {
                    raw: raw.as_ref().into(),
                });
            }
            let code = merged_code(code).to_string();
            table.aliases.insert(normalize_fragment(raw.as_ref()), code.clone());
            table.vocabulary.insert(code);
        }
        for (from, to) in MERGED_FUNDERS {
            if table.vocabulary.contains(*to) {
                table.aliases.insert(normalize_fragment(from), to.to_string());
            }
        }
        for code in table.vocabulary.clone() {
            table.aliases.entry(normalize_fragment(&code)).or_insert(code);
        }
        Ok(table)
    }

    pub fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocabulary
    }

    pub fn lookup(&self, raw: &str) -> Option<&str> {
        self.aliases.get(&normalize_fragment(raw)).map(String::as_str)
    }
}

/// Canonical funder code for `raw`, or [`UNMAPPED`]. Idempotent.
pub fn normalize_funder(raw: &str, aliases: &FunderAliasTable) -> String {
    aliases.lookup(raw).unwrap_or(UNMAPPED).to_string()
}

/// One draft per grant tag, with org fields absent.
pub fn extract_article_awards(
    record: &ArticleRecord,
    aliases: &FunderAliasTable,
) -> Result<Vec<LinkDraft>, FundingError> {
    let mut out = Vec::with_capacity(record.grant_tags.len());
    for tag in &record.grant_tags {
        let funder_code = normalize_funder(&tag.funder_text, aliases);
        if funder_code == UNMAPPED {
            if aliases.hard_fail {
                return Err(FundingError::UnmappedFunder {
                    article_id: record.article_id.clone(),
                    raw: tag.funder_text.clone(),
                });
            }
            log::warn!(
                "article {}: funder {:?} not in alias table",
                record.article_id,
                tag.funder_text
            );
        }
        let canon = canonical_award_text(&tag.award_text);
        let core = core_project_number(&tag.award_text);
        out.push(LinkDraft {
            article_id: record.article_id.clone(),
            full_project_number: (canon != core).then_some(canon),
            core_project_number: core,
            funder_code,
            source: LinkSource::ArticleMetadata,
            org_id: None,
            org_name: None,
        });
    }
    Ok(out)
}

/// Award records indexed by core number and by cited article.
#[derive(Debug, Clone, Default)]
pub struct AwardDb {
    awards: Vec<Award>,
    by_core: BTreeMap<String, Vec<usize>>,
    citing: BTreeMap<String, Vec<usize>>,
}

impl AwardDb {
    pub fn build<I: IntoIterator<Item = Award>>(awards: I) -> Result<Self, FundingError> {
        let mut db = AwardDb::default();
        let mut seen = BTreeSet::new();
        for mut award in awards {
            award.full_project_number = canonical_award_text(&award.full_project_number);
            award.core_project_number = canonical_award_text(&award.core_project_number);
            if !award
                .full_project_number
                .starts_with(award.core_project_number.as_str())
                || award.core_project_number.is_empty()
            {
                return Err(FundingError::CoreMismatch {
                    full: award.full_project_number,
                    core: award.core_project_number,
                });
            }
            if !seen.insert(award.full_project_number.clone()) {
                return Err(FundingError::DuplicateAward(award.full_project_number));
            }
            let slot = db.awards.len();
            db.by_core
                .entry(award.core_project_number.clone())
                .or_default()
                .push(slot);
            let cited: BTreeSet<&String> = award.cited_article_ids.iter().collect();
            for id in cited {
                db.citing.entry(id.clone()).or_default().push(slot);
            }
            db.awards.push(award);
        }
        Ok(db)
    }

    pub fn awards(&self) -> &[Award] {
        &self.awards
    }

    pub fn projects(&self, core: &str) -> impl Iterator<Item = &Award> {
        self.by_core.get(core).into_iter().flatten().map(|&i| &self.awards[i])
    }

    pub fn citing(&self, article_id: &str) -> impl Iterator<Item = &Award> {
        self.citing
            .get(article_id)
            .into_iter()
            .flatten()
            .map(|&i| &self.awards[i])
    }
}

/// Drafts for every award record that cites `article_id`.
pub fn lookup_awards_citing(article_id: &str, db: &AwardDb, aliases: &FunderAliasTable) -> Vec<LinkDraft> {
    db.citing(article_id)
        .map(|a| LinkDraft {
            article_id: article_id.to_string(),
            core_project_number: a.core_project_number.clone(),
            full_project_number: Some(a.full_project_number.clone()),
            funder_code: normalize_funder(&a.funder_code, aliases),
            source: LinkSource::AwardDatabase,
            org_id: a.org_id.clone(),
            org_name: a.org_name.clone(),
        })
        .collect()
}

/// One draft per (article, core number). Award-database drafts take
/// precedence; within a source the smallest full project number wins.
pub fn merge_drafts(drafts: Vec<LinkDraft>) -> Vec<LinkDraft> {
    let mut best: BTreeMap<(String, String), LinkDraft> = BTreeMap::new();
    for d in drafts {
        let key = (d.article_id.clone(), d.core_project_number.clone());
        match best.get(&key) {
            Some(cur) => {
                let better = (d.source, core::cmp::Reverse(&d.full_project_number))
                    > (cur.source, core::cmp::Reverse(&cur.full_project_number));
                if better {
                    best.insert(key, d);
                }
            }
            None => {
                best.insert(key, d);
            }
        }
    }
    best.into_values().collect()
}

/// Picks the project of `core` whose year difference to publication
/// (`pub_year - fiscal_year`) is closest to one. Ties prefer the larger
/// difference, then the smallest full project number. Without records the
/// award is assumed to date from the year before publication.
pub fn impute_award_year(core: &str, pub_year: i32, db: &AwardDb) -> (Option<String>, i32) {
    db.projects(core)
        .min_by(|a, b| {
            let da = pub_year - a.fiscal_year;
            let db_ = pub_year - b.fiscal_year;
            ((da - 1).abs(), core::cmp::Reverse(da), &a.full_project_number).cmp(&(
                (db_ - 1).abs(),
                core::cmp::Reverse(db_),
                &b.full_project_number,
            ))
        })
        .map(|a| (Some(a.full_project_number.clone()), a.fiscal_year))
        .unwrap_or((None, pub_year - 1))
}

/// Links every record to awards from both directions, merged and with
/// imputed years. Records without a publication year are skipped.
pub fn link_articles<'a, I>(
    records: I,
    db: &AwardDb,
    aliases: &FunderAliasTable,
) -> Result<Vec<ArticleAwardLink>, FundingError>
where
    I: IntoIterator<Item = &'a ArticleRecord>,
{
    let mut links = Vec::new();
    for record in records {
        let mut drafts = extract_article_awards(record, aliases)?;
        drafts.extend(lookup_awards_citing(&record.article_id, db, aliases));
        if drafts.is_empty() {
            continue;
        }
        let Some(pub_year) = record.pub_year else {
            log::warn!(
                "article {}: no publication year, {} award link(s) dropped",
                record.article_id,
                drafts.len()
            );
            continue;
        };
        for d in merge_drafts(drafts) {
            let (imputed_full_project, imputed_year) = impute_award_year(&d.core_project_number, pub_year, db);
            links.push(ArticleAwardLink {
                article_id: d.article_id,
                core_project_number: d.core_project_number,
                funder_code: d.funder_code,
                source: d.source,
                org_id: d.org_id,
                org_name: d.org_name,
                imputed_full_project,
                imputed_year,
            });
        }
    }
    links.sort_by(|a, b| (&a.article_id, &a.core_project_number).cmp(&(&b.article_id, &b.core_project_number)));
    links.dedup_by(|a, b| a.article_id == b.article_id && a.core_project_number == b.core_project_number);
    Ok(links)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biblio::GrantTag;
    use alloc::vec;

    fn aliases() -> FunderAliasTable {
        FunderAliasTable::from_pairs([
            ("National Cancer Institute", "NCI"),
            ("NCI NIH HHS", "NCI"),
            ("National Heart, Lung, and Blood Institute", "NHLBI"),
            ("National Center for Research Resources", "NCRR"),
            ("National Center for Advancing Translational Sciences", "NCATS"),
        ])
        .unwrap()
    }

    fn award(full: &str, year: i32, cites: &[&str]) -> Award {
        Award {
            full_project_number: full.into(),
            core_project_number: core_project_number(full),
            funder_code: "NCI".into(),
            org_id: Some("DUNS-1".into()),
            org_name: Some("Univ".into()),
            fiscal_year: year,
            cited_article_ids: cites.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn article(id: &str, year: i32, tags: &[(&str, &str)]) -> ArticleRecord {
        ArticleRecord {
            article_id: id.into(),
            title: "t".into(),
            authors: vec![],
            journal: String::new(),
            pub_year: Some(year),
            volume: None,
            pages: None,
            grant_tags: tags
                .iter()
                .map(|(a, f)| GrantTag {
                    award_text: a.to_string(),
                    funder_text: f.to_string(),
                })
                .collect(),
            retracted: false,
        }
    }

    #[test]
    fn core_number_strips_suffix_and_space() {
        assert_eq!(core_project_number("R01 CA031770-02"), "R01CA031770");
        assert_eq!(core_project_number(" r01ca031770 "), "R01CA031770");
        assert_eq!(core_project_number("MR/K0001/1-A2-3"), "MR/K0001/1");
    }

    #[test]
    fn grant_tag_to_draft() {
        let r = article("1", 2005, &[("R01 CA031770-02", "NCI")]);
        let d = extract_article_awards(&r, &aliases()).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].core_project_number, "R01CA031770");
        assert_eq!(d[0].funder_code, "NCI");
        assert_eq!(d[0].source, LinkSource::ArticleMetadata);
        assert_eq!(d[0].org_id, None);
    }

    #[test]
    fn no_tags_no_drafts() {
        let r = article("1", 2005, &[]);
        assert!(extract_article_awards(&r, &aliases()).unwrap().is_empty());
    }

    #[test]
    fn unmapped_funder_warns_or_fails() {
        let r = article(
            "1",
            2005,
            &[
                ("R01CA1", "National Cancer Institute"),
                ("HL2", "NHLBI"),
                ("X-3", "Acme Trust"),
            ],
        );
        let d = extract_article_awards(&r, &aliases()).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.iter().filter(|x| x.funder_code == UNMAPPED).count(), 1);
        let strict = FunderAliasTable {
            hard_fail: true,
            ..aliases()
        };
        assert!(matches!(
            extract_article_awards(&r, &strict),
            Err(FundingError::UnmappedFunder { .. })
        ));
    }

    #[test]
    fn funder_normalization() {
        let a = aliases();
        assert_eq!(normalize_funder("National Cancer Institute", &a), "NCI");
        assert_eq!(normalize_funder("national cancer institute.", &a), "NCI");
        assert_eq!(normalize_funder("NCRR", &a), "NCATS");
        assert_eq!(normalize_funder("National Center for Research Resources", &a), "NCATS");
        assert_eq!(normalize_funder("Acme Trust", &a), UNMAPPED);
        assert!(!a.vocabulary().contains("NCRR"));
        for code in a.vocabulary() {
            assert_eq!(&normalize_funder(code, &a), code);
        }
    }

    #[test]
    fn citing_awards_carry_org() {
        let db = AwardDb::build(vec![
            award("R01CA1-01", 2001, &["P1"]),
            award("R01CA2-01", 2002, &["P1", "P2"]),
        ])
        .unwrap();
        let d = lookup_awards_citing("P1", &db, &aliases());
        assert_eq!(d.len(), 2);
        assert!(d.iter().all(|x| x.org_id.is_some()));
        assert!(lookup_awards_citing("P9", &db, &aliases()).is_empty());
    }

    #[test]
    fn merge_prefers_award_database() {
        let db = AwardDb::build(vec![award("R01CA031770-02", 2004, &["P1"])]).unwrap();
        let r = article("P1", 2005, &[("R01 CA031770", "NCI")]);
        let links = link_articles([&r], &db, &aliases()).unwrap();
        assert_eq!(links.len(), 1);
        assert_eq!(links[0].source, LinkSource::AwardDatabase);
        assert_eq!(links[0].org_id.as_deref(), Some("DUNS-1"));
        assert_eq!(links[0].imputed_year, 2004);
        assert_eq!(links[0].imputed_full_project.as_deref(), Some("R01CA031770-02"));
        // idempotent
        assert_eq!(links, link_articles([&r], &db, &aliases()).unwrap());
    }

    #[test]
    fn db_rejects_bad_core_and_duplicates() {
        let mut bad = award("R01CA1-01", 2001, &[]);
        bad.core_project_number = "R01XX".into();
        assert!(AwardDb::build(vec![bad]).is_err());
        assert!(AwardDb::build(vec![award("A-01", 2001, &[]), award("A-01", 2002, &[])]).is_err());
    }

    fn db_with_years(core: &str, years: &[i32]) -> AwardDb {
        AwardDb::build(
            years
                .iter()
                .enumerate()
                .map(|(i, &y)| award(&alloc::format!("{core}-{:02}", i + 1), y, &[])),
        )
        .unwrap()
    }

    #[test]
    fn imputation_examples() {
        let db = db_with_years("R01CA1", &[2001, 2003, 2004, 2006]);
        assert_eq!(impute_award_year("R01CA1", 2005, &db).1, 2004);
        assert_eq!(impute_award_year("NOPE", 1990, &db), (None, 1989));
        let db = db_with_years("R01CA1", &[2003, 2005]);
        assert_eq!(impute_award_year("R01CA1", 2005, &db).1, 2003);
    }

    #[test]
    fn imputation_lexical_tiebreak() {
        let db = AwardDb::build(vec![award("C-02", 2004, &[]), award("C-01", 2004, &[])]).unwrap();
        assert_eq!(impute_award_year("C", 2005, &db), (Some("C-01".into()), 2004));
    }
}
