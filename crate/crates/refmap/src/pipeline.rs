//! Pipeline stages and the on-disk layout of their artifacts.
//!
//! Every stage reads its inputs from the workdir (ingest reads the
//! configured source files), writes its outputs under `<workdir>/<stage>/`
//! and records a manifest. A stage whose manifest matches the current
//! settings and input hashes is skipped.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use refmap_core::corpus::{segment_reference_section, split_fragments, SegmentError};
use refmap_core::ecomap::{self, EntityCounts, MemoAward};
use refmap_core::funding::{link_articles, normalize_funder, UNMAPPED};
use refmap_core::resolver::{coverage, resolve_fragment, sort_results, Fallback};
use refmap_core::stats::{self, kld::EntityShares, EntityTest, StatsError};
use refmap_core::{
    ArticleAwardLink, Award, AwardDb, FunderAliasTable, IndexStats, ReferenceFragment, ResolutionResult,
};
use serde::Serialize;

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::io::{self, jsonl_bytes, sha256_file, sha256_hex, MemoInfo};
use crate::manifest::Manifest;
use crate::remote::RemoteClient;
use crate::report::{self, KldRow};
use crate::sankey;

/// Artifact paths relative to the workdir.
pub mod layout {
    pub const MEMOS: &str = "ingest/memos.jsonl";
    pub const FRAGMENTS: &str = "ingest/fragments.jsonl";
    pub const RECORDS: &str = "ingest/records.jsonl";
    pub const INDEX_STATS: &str = "ingest/index_stats.json";
    pub const AWARDS: &str = "ingest/awards.jsonl";
    pub const ALIASES: &str = "ingest/aliases.csv";

    pub const RESOLUTION: &str = "resolve/resolution.jsonl";
    pub const COVERAGE: &str = "resolve/coverage.csv";

    pub const LINKS: &str = "link/links.jsonl";

    pub const MEMO_AWARDS: &str = "stats/memo_awards.jsonl";
    pub const FUNDER_SHARES: &str = "stats/funder_shares.csv";
    pub const ORG_SHARES: &str = "stats/org_shares.csv";
    pub const FUNDER_TESTS: &str = "stats/funder_tests.jsonl";
    pub const ORG_TESTS: &str = "stats/org_tests.jsonl";
    pub const FUNDER_TESTS_CSV: &str = "stats/funder_tests.csv";
    pub const ORG_TESTS_CSV: &str = "stats/org_tests.csv";
    pub const KLD: &str = "stats/kld.csv";
    pub const KLD_PAIRED: &str = "stats/kld_paired.json";

    pub const FUNDER_TABLE: &str = "report/funder_table.csv";
    pub const RECIPIENT_TABLE: &str = "report/recipient_table.csv";
    pub const EXCLUDED: &str = "report/excluded.csv";
    pub const RETRACTIONS: &str = "report/retractions.csv";
    pub const COVERAGE_SCATTER: &str = "report/coverage_scatter.csv";
    pub const COVERAGE_SUMMARY: &str = "report/coverage_summary.csv";
    pub const SANKEY_DIR: &str = "report/sankey";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Resolve,
    Link,
    Stats,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Ingest, Stage::Resolve, Stage::Link, Stage::Stats, Stage::Report];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Resolve => "resolve",
            Stage::Link => "link",
            Stage::Stats => "stats",
            Stage::Report => "report",
        }
    }

    /// Config sections whose settings affect this stage's outputs.
    pub fn config_sections(self) -> &'static [&'static str] {
        match self {
            Stage::Ingest => &["segmenter"],
            Stage::Resolve => &["resolver", "remote"],
            Stage::Link => &["funding"],
            Stage::Stats => &["funding", "stats"],
            Stage::Report => &["report"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ran,
    UpToDate,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Restrict sankey output to one memo.
    pub memo: Option<String>,
}

enum Input<'a> {
    /// Artifact written by an upstream stage.
    Artifact(&'static str, Stage),
    /// Configured source file or directory.
    Source(&'static str, &'a Path),
}

type Outputs = BTreeMap<String, Vec<u8>>;

/// Hash of a source path; directories hash their `*.txt` files by name.
fn hash_source(path: &Path) -> Result<String> {
    if !path.is_dir() {
        return sha256_file(path);
    }
    let mut names: Vec<_> = fs::read_dir(path)
        .map_err(|e| Error::io(format!("listing {}", path.display()), e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("txt"))
        .collect();
    names.sort();
    let mut listing = String::new();
    for p in names {
        let name = p.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        listing.push_str(&format!("{name}\t{}\n", sha256_file(&p)?));
    }
    Ok(sha256_hex(listing.as_bytes()))
}

fn run_stage(
    cfg: &PipelineConfig,
    stage: Stage,
    extra: &str,
    inputs: &[Input<'_>],
    body: impl FnOnce() -> Result<Outputs>,
) -> Result<Outcome> {
    let workdir = &cfg.paths.workdir;
    let mut hashes = BTreeMap::new();
    for input in inputs {
        match input {
            Input::Artifact(rel, upstream) => {
                let path = workdir.join(rel);
                if !path.is_file() {
                    return Err(Error::MissingArtifact {
                        stage: stage.name(),
                        upstream: upstream.name(),
                        missing: path,
                    });
                }
                hashes.insert(rel.to_string(), sha256_file(&path)?);
            }
            Input::Source(key, path) => {
                hashes.insert(key.to_string(), hash_source(path)?);
            }
        }
    }
    let settings = cfg.section_hash(stage.config_sections());
    let config_hash = if extra.is_empty() {
        settings
    } else {
        sha256_hex(format!("{settings}\n{extra}").as_bytes())
    };
    let previous = Manifest::load(workdir, stage.name());
    if let Some(m) = &previous {
        if m.is_current(workdir, &config_hash, &hashes) {
            log::info!("{}: up to date", stage.name());
            return Ok(Outcome::UpToDate);
        }
    }

    let outputs = body()?;
    if let Some(m) = previous {
        for rel in m.outputs.keys().filter(|rel| !outputs.contains_key(*rel)) {
            let _ = fs::remove_file(workdir.join(rel));
        }
    }
    let mut manifest = Manifest {
        stage: stage.name().into(),
        config_hash,
        inputs: hashes,
        outputs: BTreeMap::new(),
    };
    for (rel, bytes) in &outputs {
        io::write_bytes(&workdir.join(rel), bytes)?;
        manifest.outputs.insert(rel.clone(), sha256_hex(bytes));
    }
    manifest.write(workdir)?;
    log::info!("{}: wrote {} artifact(s)", stage.name(), outputs.len());
    Ok(Outcome::Ran)
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("artifact serializes");
    out.push(b'\n');
    out
}

fn artifact(cfg: &PipelineConfig, rel: &str) -> std::path::PathBuf {
    cfg.paths.workdir.join(rel)
}

fn load_alias_table(cfg: &PipelineConfig) -> Result<FunderAliasTable> {
    let mut table = FunderAliasTable::from_pairs(io::load_aliases(&artifact(cfg, layout::ALIASES))?)?;
    table.hard_fail = cfg.funding.hard_fail;
    Ok(table)
}

pub fn run_ingest(cfg: &PipelineConfig) -> Result<Outcome> {
    cfg.check_inputs()?;
    let p = &cfg.paths;
    let inputs = [
        Input::Source("corpus", &p.corpus),
        Input::Source("records", &p.records),
        Input::Source("award_db", &p.award_db),
        Input::Source("aliases", &p.aliases),
    ];
    run_stage(cfg, Stage::Ingest, "", &inputs, || {
        let memos = io::load_memos(&p.corpus)?;
        let mut fragments: Vec<ReferenceFragment> = Vec::new();
        for m in &memos {
            match segment_reference_section(&m.body_text, &cfg.segmenter) {
                Ok(Some(text)) => fragments.extend(split_fragments(&m.memo_id, text, cfg.segmenter.min_fragment_len)),
                Ok(None) => log::info!("memo {}: no reference section", m.memo_id),
                Err(SegmentError::EmptyBody) => log::warn!("memo {}: empty body, skipped", m.memo_id),
                Err(e) => return Err(e.into()),
            }
        }
        let infos: Vec<MemoInfo> = memos.iter().map(MemoInfo::from).collect();

        let index = io::load_records(&p.records)?;
        let mut records = index.records().to_vec();
        records.sort_by(|a, b| a.article_id.cmp(&b.article_id));
        let index_stats: IndexStats = index.stats();

        let db = AwardDb::build(io::load_awards(&p.award_db)?).map_err(|e| Error::Input {
            path: p.award_db.clone(),
            message: e.to_string(),
        })?;
        let mut awards: Vec<Award> = db.awards().to_vec();
        awards.sort_by(|a, b| a.full_project_number.cmp(&b.full_project_number));

        let mut aliases = io::load_aliases(&p.aliases)?;
        FunderAliasTable::from_pairs(aliases.iter().map(|(a, b)| (a, b))).map_err(|e| Error::Input {
            path: p.aliases.clone(),
            message: e.to_string(),
        })?;
        aliases.sort();
        aliases.dedup();

        log::info!(
            "ingest: {} memos, {} fragments, {} records, {} awards",
            memos.len(),
            fragments.len(),
            index_stats.record_count,
            awards.len()
        );
        let mut out = Outputs::new();
        out.insert(layout::MEMOS.into(), jsonl_bytes(&infos));
        out.insert(layout::FRAGMENTS.into(), jsonl_bytes(&fragments));
        out.insert(layout::RECORDS.into(), jsonl_bytes(&records));
        out.insert(layout::INDEX_STATS.into(), json_bytes(&index_stats));
        out.insert(layout::AWARDS.into(), jsonl_bytes(&awards));
        out.insert(
            layout::ALIASES.into(),
            io::csv_bytes(&["raw_name", "canonical_code"], aliases.iter().map(|(a, b)| vec![a, b])),
        );
        Ok(out)
    })
}

/// Runs the resolve stage. When remote lookup is enabled and no fallback is
/// supplied, a client is built from the config.
pub fn run_resolve(cfg: &PipelineConfig, fallback: Option<&(dyn Fallback + Sync)>) -> Result<Outcome> {
    let inputs = [
        Input::Artifact(layout::MEMOS, Stage::Ingest),
        Input::Artifact(layout::FRAGMENTS, Stage::Ingest),
        Input::Artifact(layout::RECORDS, Stage::Ingest),
    ];
    run_stage(cfg, Stage::Resolve, "", &inputs, || {
        let memos: Vec<MemoInfo> = io::read_jsonl(&artifact(cfg, layout::MEMOS))?;
        let fragments: Vec<ReferenceFragment> = io::read_jsonl(&artifact(cfg, layout::FRAGMENTS))?;
        let index = io::load_records(&artifact(cfg, layout::RECORDS))?;

        let client;
        let fallback: Option<&(dyn Fallback + Sync)> = match fallback {
            Some(f) => Some(f),
            None if cfg.remote.enabled => {
                client = RemoteClient::from_config(&cfg.remote, &cfg.cache_dir());
                Some(&client)
            }
            None => None,
        };
        let mut results: Vec<ResolutionResult> = fragments
            .par_iter()
            .map(|f| resolve_fragment(f, &index, &cfg.resolver, fallback.map(|f| f as &dyn Fallback)))
            .collect();
        sort_results(&mut results);
        let cov = coverage(&results, memos.iter().map(|m| m.memo_id.as_str()));
        log::info!(
            "resolve: {} of {} fragments linked",
            results.iter().filter(|r| r.is_linked()).count(),
            results.len()
        );
        let mut out = Outputs::new();
        out.insert(layout::RESOLUTION.into(), jsonl_bytes(&results));
        out.insert(layout::COVERAGE.into(), report::coverage_csv(&cov));
        Ok(out)
    })
}

pub fn run_link(cfg: &PipelineConfig) -> Result<Outcome> {
    let inputs = [
        Input::Artifact(layout::RECORDS, Stage::Ingest),
        Input::Artifact(layout::AWARDS, Stage::Ingest),
        Input::Artifact(layout::ALIASES, Stage::Ingest),
    ];
    run_stage(cfg, Stage::Link, "", &inputs, || {
        let index = io::load_records(&artifact(cfg, layout::RECORDS))?;
        let db = AwardDb::build(io::load_awards(&artifact(cfg, layout::AWARDS))?)?;
        let aliases = load_alias_table(cfg)?;
        let links = link_articles(index.records(), &db, &aliases)?;
        log::info!("link: {} article-award links", links.len());
        let mut out = Outputs::new();
        out.insert(layout::LINKS.into(), jsonl_bytes(&links));
        Ok(out)
    })
}

/// Resolved article ids per memo.
fn resolved_articles(results: &[ResolutionResult]) -> BTreeMap<&str, BTreeSet<&str>> {
    let mut out: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for r in results {
        if let Some(a) = &r.article_id {
            out.entry(&r.memo_id).or_default().insert(a);
        }
    }
    out
}

#[derive(Serialize)]
struct PairedKld {
    n_memos: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<stats::PairedResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn memo_kld(
    memo_id: &str,
    articles: &BTreeSet<&str>,
    by_article: &BTreeMap<&str, Vec<&ArticleAwardLink>>,
) -> Option<KldRow> {
    let funders: Vec<Vec<&String>> = articles
        .iter()
        .map(|a| {
            by_article
                .get(a)
                .into_iter()
                .flatten()
                .map(|l| &l.funder_code)
                .filter(|f| f.as_str() != UNMAPPED)
                .collect()
        })
        .collect();
    let orgs: Vec<Vec<&String>> = articles
        .iter()
        .map(|a| {
            by_article
                .get(a)
                .into_iter()
                .flatten()
                .filter_map(|l| l.org_id.as_ref())
                .collect()
        })
        .collect();
    let f = EntityShares::from_articles(funders);
    let o = EntityShares::from_articles(orgs);
    let (kld_f, kld_ro) = (f.kld(), o.kld());
    if kld_f.is_none() {
        log::info!("memo {memo_id}: no funder data, funder KLD skipped");
    }
    if kld_ro.is_none() {
        log::info!("memo {memo_id}: no organization data, organization KLD skipped");
    }
    if kld_f.is_none() && kld_ro.is_none() {
        return None;
    }
    Some(KldRow {
        memo_id: memo_id.into(),
        kld_f,
        kld_ro,
        n_f: f.n_entities(),
        n_ro: o.n_entities(),
    })
}

pub fn run_stats(cfg: &PipelineConfig) -> Result<Outcome> {
    let inputs = [
        Input::Artifact(layout::MEMOS, Stage::Ingest),
        Input::Artifact(layout::AWARDS, Stage::Ingest),
        Input::Artifact(layout::ALIASES, Stage::Ingest),
        Input::Artifact(layout::RESOLUTION, Stage::Resolve),
        Input::Artifact(layout::LINKS, Stage::Link),
    ];
    run_stage(cfg, Stage::Stats, "", &inputs, || {
        let memos: Vec<MemoInfo> = io::read_jsonl(&artifact(cfg, layout::MEMOS))?;
        let awards = io::load_awards(&artifact(cfg, layout::AWARDS))?;
        let aliases = load_alias_table(cfg)?;
        let results: Vec<ResolutionResult> = io::read_jsonl(&artifact(cfg, layout::RESOLUTION))?;
        let links: Vec<ArticleAwardLink> = io::read_jsonl(&artifact(cfg, layout::LINKS))?;

        let resolved = resolved_articles(&results);
        let all_articles: BTreeSet<&str> = resolved.values().flatten().copied().collect();
        let memo_awards = ecomap::memo_awards(all_articles.iter().copied(), &links);

        let pool_funders: Vec<(String, i32)> = awards
            .iter()
            .map(|a| (normalize_funder(&a.funder_code, &aliases), a.fiscal_year))
            .filter(|(f, _)| f != UNMAPPED)
            .collect();
        let funder_shares = stats::yearly_shares(
            memo_awards
                .iter()
                .filter(|a| a.funder_code != UNMAPPED)
                .map(|a| (a.funder_code.as_str(), a.year)),
            pool_funders.iter().map(|(f, y)| (f.as_str(), *y)),
            cfg.stats.denominator,
        )?;
        let org_shares = match stats::yearly_shares(
            memo_awards
                .iter()
                .filter_map(|a| a.org_id.as_deref().map(|o| (o, a.year))),
            awards
                .iter()
                .filter_map(|a| a.org_id.as_deref().map(|o| (o, a.fiscal_year))),
            cfg.stats.denominator,
        ) {
            Ok(rows) => rows,
            Err(StatsError::EmptyPool) => {
                log::warn!("stats: no award records carry an org id; organization shares skipped");
                Vec::new()
            }
            Err(e) => return Err(e.into()),
        };
        let (level, min_obs) = (cfg.stats.ci_level, cfg.stats.min_obs);
        let funder_tests = stats::entity_tests(&funder_shares, min_obs, level);
        let org_tests = stats::entity_tests(&org_shares, min_obs, level);

        let mut by_article: BTreeMap<&str, Vec<&ArticleAwardLink>> = BTreeMap::new();
        for l in &links {
            by_article.entry(&l.article_id).or_default().push(l);
        }
        let empty = BTreeSet::new();
        let kld_rows: Vec<KldRow> = memos
            .iter()
            .filter_map(|m| {
                memo_kld(
                    &m.memo_id,
                    resolved.get(m.memo_id.as_str()).unwrap_or(&empty),
                    &by_article,
                )
            })
            .collect();
        let (f, ro): (Vec<f64>, Vec<f64>) = kld_rows.iter().filter_map(|r| Some((r.kld_f?, r.kld_ro?))).unzip();
        let paired = match stats::paired_wilcoxon(&f, &ro, level) {
            Ok(r) => PairedKld {
                n_memos: f.len(),
                result: Some(r),
                note: None,
            },
            Err(e) => PairedKld {
                n_memos: f.len(),
                result: None,
                note: Some(e.to_string()),
            },
        };

        log::info!(
            "stats: {} memo awards, {} funder-year rows, {} org-year rows, {} KLD rows",
            memo_awards.len(),
            funder_shares.len(),
            org_shares.len(),
            kld_rows.len()
        );
        let mut out = Outputs::new();
        out.insert(layout::MEMO_AWARDS.into(), jsonl_bytes(&memo_awards));
        out.insert(layout::FUNDER_SHARES.into(), report::shares_csv(&funder_shares));
        out.insert(layout::ORG_SHARES.into(), report::shares_csv(&org_shares));
        out.insert(layout::FUNDER_TESTS.into(), jsonl_bytes(&funder_tests));
        out.insert(layout::ORG_TESTS.into(), jsonl_bytes(&org_tests));
        out.insert(layout::FUNDER_TESTS_CSV.into(), report::tests_csv(&funder_tests));
        out.insert(layout::ORG_TESTS_CSV.into(), report::tests_csv(&org_tests));
        out.insert(layout::KLD.into(), report::kld_csv(&kld_rows));
        out.insert(layout::KLD_PAIRED.into(), json_bytes(&paired));
        Ok(out)
    })
}

/// File stem for a memo's sankey files.
pub fn sankey_stem(memo_id: &str) -> String {
    memo_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn run_report(cfg: &PipelineConfig, opts: &RunOptions) -> Result<Outcome> {
    let inputs = [
        Input::Artifact(layout::MEMOS, Stage::Ingest),
        Input::Artifact(layout::RECORDS, Stage::Ingest),
        Input::Artifact(layout::RESOLUTION, Stage::Resolve),
        Input::Artifact(layout::LINKS, Stage::Link),
        Input::Artifact(layout::MEMO_AWARDS, Stage::Stats),
        Input::Artifact(layout::FUNDER_TESTS, Stage::Stats),
        Input::Artifact(layout::ORG_TESTS, Stage::Stats),
    ];
    let extra = opts.memo.as_deref().map(|m| format!("memo={m}")).unwrap_or_default();
    run_stage(cfg, Stage::Report, &extra, &inputs, || {
        let memos: Vec<MemoInfo> = io::read_jsonl(&artifact(cfg, layout::MEMOS))?;
        let index = io::load_records(&artifact(cfg, layout::RECORDS))?;
        let results: Vec<ResolutionResult> = io::read_jsonl(&artifact(cfg, layout::RESOLUTION))?;
        let links: Vec<ArticleAwardLink> = io::read_jsonl(&artifact(cfg, layout::LINKS))?;
        let memo_awards: Vec<MemoAward> = io::read_jsonl(&artifact(cfg, layout::MEMO_AWARDS))?;
        let funder_tests: Vec<EntityTest> = io::read_jsonl(&artifact(cfg, layout::FUNDER_TESTS))?;
        let org_tests: Vec<EntityTest> = io::read_jsonl(&artifact(cfg, layout::ORG_TESTS))?;

        let selected: Vec<&MemoInfo> = match &opts.memo {
            Some(id) => {
                let m = memos
                    .iter()
                    .find(|m| &m.memo_id == id)
                    .ok_or_else(|| Error::Config(format!("memo {id:?} is not in the corpus")))?;
                vec![m]
            }
            None => memos.iter().collect(),
        };

        let EntityCounts {
            funders,
            orgs,
            unmapped_funder_awards,
            unknown_org_awards,
        } = ecomap::entity_counts(&memo_awards);
        let funder_rows = ecomap::table_rows(&funders, &funder_tests);
        let org_rows = ecomap::table_rows(&orgs, &org_tests);

        let resolved = resolved_articles(&results);
        let empty = BTreeSet::new();
        let graphs: Vec<(String, Vec<u8>, Vec<u8>)> = selected
            .par_iter()
            .map(|m| {
                let articles = resolved.get(m.memo_id.as_str()).unwrap_or(&empty);
                let g = ecomap::build_flow_graph(&m.memo_id, &m.title, articles.iter().copied(), &links, &cfg.report);
                (sankey_stem(&m.memo_id), sankey::to_json(&g), sankey::to_svg(&g))
            })
            .collect();

        let flags = ecomap::flag_retracted(&results, &index);
        let cov = coverage(&results, memos.iter().map(|m| m.memo_id.as_str()));
        let (points, summary) = ecomap::coverage_report(&cov);

        let mut out = Outputs::new();
        out.insert(layout::FUNDER_TABLE.into(), report::table_csv(&funder_rows));
        out.insert(layout::RECIPIENT_TABLE.into(), report::table_csv(&org_rows));
        out.insert(
            layout::EXCLUDED.into(),
            io::csv_bytes(
                &["category", "n_awards"],
                [
                    vec!["unmapped_funder".to_string(), unmapped_funder_awards.to_string()],
                    vec!["unknown_org".to_string(), unknown_org_awards.to_string()],
                ],
            ),
        );
        out.insert(layout::RETRACTIONS.into(), report::retractions_csv(&flags));
        out.insert(layout::COVERAGE_SCATTER.into(), report::scatter_csv(&points));
        out.insert(layout::COVERAGE_SUMMARY.into(), report::summary_csv(summary.as_ref()));
        for (stem, json, svg) in graphs {
            out.insert(format!("{}/{stem}.json", layout::SANKEY_DIR), json);
            out.insert(format!("{}/{stem}.svg", layout::SANKEY_DIR), svg);
        }
        Ok(out)
    })
}

pub fn run(stage: Stage, cfg: &PipelineConfig, opts: &RunOptions) -> Result<Outcome> {
    match stage {
        Stage::Ingest => run_ingest(cfg),
        Stage::Resolve => run_resolve(cfg, None),
        Stage::Link => run_link(cfg),
        Stage::Stats => run_stats(cfg),
        Stage::Report => run_report(cfg, opts),
    }
}

/// Every stage in order.
pub fn run_all(cfg: &PipelineConfig, opts: &RunOptions) -> Result<Vec<(Stage, Outcome)>> {
    Stage::ALL.iter().map(|&s| run(s, cfg, opts).map(|o| (s, o))).collect()
}
