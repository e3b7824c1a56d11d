//! Acceptance suite: one line per criterion, non-zero exit on any failure.
//!
//! Run with `cargo test -p refmap --test acceptance`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::Deserialize;

use refmap::io;
use refmap::pipeline::{self, layout, RunOptions};
use refmap_core::corpus::normalize_fragment;
use refmap_core::ecomap::{build_flow_graph, funded_article_count, FlowConfig, NodeKind};
use refmap_core::funding::{impute_award_year, Award, AwardDb};
use refmap_core::resolver::{resolve_corpus, ResolverConfig};
use refmap_core::stats::wilcoxon::{approx_p_value, wilcoxon_signed_rank, PValueMethod};
use refmap_core::stats::{kld, share_of_total, yearly_shares, Denominator};
use refmap_core::{ArticleAwardLink, ReferenceFragment, ResolutionResult};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    ensure(elapsed < budget, || format!("took {elapsed:?}, budget {budget:?}"))
}

// 1 -------------------------------------------------------------------------

fn share_arithmetic() -> Check {
    let start = Instant::now();
    let path = common::manifest_dir().join("tests/data/funder_award_shares.csv");
    let mut reader = csv::Reader::from_path(path).map_err(|e| e.to_string())?;
    let mut rows = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let count: usize = rec[1].parse().map_err(|e| format!("{e}"))?;
        let pct: f64 = rec[2].parse().map_err(|e| format!("{e}"))?;
        rows.insert(rec[0].to_string(), (count, pct));
    }
    let total: usize = rows.values().map(|(c, _)| c).sum();
    ensure(total == 2742, || format!("counts sum to {total}"))?;
    for (funder, (count, pct)) in &rows {
        let got = share_of_total(*count, 2742).map_err(|e| e.to_string())?;
        ensure((got - pct).abs() <= 0.01, || format!("{funder}: {got:.4} vs {pct}"))?;
    }
    for (funder, count, pct) in [("NCI", 566, 20.64), ("NHLBI", 552, 20.13), ("NCATS", 200, 7.29)] {
        ensure(rows.get(funder).map(|r| r.0) == Some(count), || {
            format!("{funder} count")
        })?;
        let got = share_of_total(count, 2742).unwrap();
        ensure((got - pct).abs() <= 0.005, || format!("{funder}: {got:.4} vs {pct}"))?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("{} funders, N = {total}", rows.len()))
}

// 2 -------------------------------------------------------------------------

/// Two-sided p from all 2^n sign assignments of ranks 1..=n.
fn brute_force_p(n: usize, w_plus: usize) -> f64 {
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        let w: usize = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).sum();
        le += (w <= w_plus) as u64;
        ge += (w >= w_plus) as u64;
    }
    let total = 1u64 << n;
    ((2 * le.min(ge)).min(total)) as f64 / total as f64
}

/// Null distribution of W+ as the coefficients of prod_k (1 + x^k) / 2.
fn generating_function(n: usize) -> Vec<f64> {
    let mut poly = vec![1.0];
    for k in 1..=n {
        let mut next = vec![0.0; poly.len() + k];
        for (i, c) in poly.iter().enumerate() {
            next[i] += c / 2.0;
            next[i + k] += c / 2.0;
        }
        poly = next;
    }
    poly
}

fn wilcoxon_exactness() -> Check {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    for case in 0..500 {
        let n = rng.gen_range(1..=12);
        let mut mags: Vec<u32> = (1..=60).collect();
        mags.shuffle(&mut rng);
        let xs: Vec<f64> = mags[..n]
            .iter()
            .map(|&m| {
                if rng.gen_bool(0.5) {
                    m as f64 / 4.0
                } else {
                    -(m as f64) / 4.0
                }
            })
            .collect();
        let r = wilcoxon_signed_rank(&xs, 0.0).map_err(|e| e.to_string())?;
        ensure(r.method == PValueMethod::Exact, || format!("case {case}: not exact"))?;
        // ranks of |x| among distinct magnitudes
        let mut sorted: Vec<u32> = mags[..n].to_vec();
        sorted.sort();
        let w: usize = xs
            .iter()
            .filter(|x| **x > 0.0)
            .map(|x| sorted.iter().position(|&m| m as f64 / 4.0 == *x).unwrap() + 1)
            .sum();
        let oracle = brute_force_p(n, w);
        ensure(r.p_value == oracle, || {
            format!("case {case}: n={n} {} vs {oracle}", r.p_value)
        })?;
    }
    let mut worst: f64 = 0.0;
    for n in 10..=25 {
        let dist = generating_function(n);
        let ranks: Vec<f64> = (1..=n).map(|r| r as f64).collect();
        for w in 0..dist.len() {
            let lower: f64 = dist[..=w].iter().sum();
            let upper: f64 = dist[w..].iter().sum();
            let exact = (2.0 * lower.min(upper)).min(1.0);
            let err = (approx_p_value(&ranks, w as f64) - exact).abs();
            worst = worst.max(err);
            ensure(err <= 0.01, || format!("n={n} w={w}: error {err:.5}"))?;
        }
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("500 exact matches; approximation max error {worst:.5}"))
}

// 3 -------------------------------------------------------------------------

fn kld_properties() -> Check {
    for n in 2..=64 {
        let v = kld(&vec![1.0 / n as f64; n]).map_err(|e| e.to_string())?;
        ensure(v.abs() <= 1e-12, || format!("uniform N={n}: {v:e}"))?;
    }
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    for case in 0..1000 {
        let n = rng.gen_range(2..=64);
        // Dirichlet(1, ..., 1) through normalized exponentials
        let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let s: f64 = e.iter().sum();
        let p: Vec<f64> = e.iter().map(|x| x / s).collect();
        let v = kld(&p).map_err(|e| format!("case {case}: {e}"))?;
        ensure(v >= 0.0 && v <= (n as f64).ln(), || {
            format!("case {case}: {v} outside [0, ln {n}]")
        })?;
    }
    let oracle = 0.5 * (3.0 * 0.5f64).ln() + 2.0 * 0.25 * (3.0 * 0.25f64).ln();
    let v = kld(&[0.5, 0.25, 0.25]).unwrap();
    ensure((v - oracle).abs() < 1e-12 && (v - 0.05889).abs() < 1e-4, || {
        format!("(0.5, 0.25, 0.25) -> {v}, oracle {oracle}")
    })?;
    Ok(format!("(0.5, 0.25, 0.25) -> {v:.5}"))
}

// 4 -------------------------------------------------------------------------

/// Walks year offsets d = 1, 2, 0, 3, -1, ... and returns the first match,
/// smallest full number within an offset.
fn imputation_oracle(projects: &[(String, i32)], pub_year: i32) -> (Option<String>, i32) {
    if projects.is_empty() {
        return (None, pub_year - 1);
    }
    for dist in 0..200 {
        for d in [1 + dist, 1 - dist] {
            let mut hits: Vec<&String> = projects
                .iter()
                .filter(|(_, fy)| pub_year - fy == d)
                .map(|(full, _)| full)
                .collect();
            hits.sort();
            if let Some(full) = hits.first() {
                return (Some((*full).clone()), pub_year - d);
            }
            if dist == 0 {
                break;
            }
        }
    }
    unreachable!("fixture years lie within 200 of publication")
}

fn year_imputation() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    let core = "R01CA123456";
    let mut with_ties = 0;
    for case in 0..1000 {
        let pub_year = rng.gen_range(1980..2020);
        let k = rng.gen_range(0..=6);
        let mut suffixes: Vec<u32> = (1..=30).collect();
        suffixes.shuffle(&mut rng);
        let projects: Vec<(String, i32)> = suffixes[..k]
            .iter()
            .map(|s| (format!("{core}-{s:02}"), pub_year + rng.gen_range(-8..=4)))
            .collect();
        let years: BTreeSet<i32> = projects.iter().map(|p| p.1).collect();
        if years.len() < projects.len() {
            with_ties += 1;
        }
        let db = AwardDb::build(projects.iter().map(|(full, fy)| Award {
            full_project_number: full.clone(),
            core_project_number: core.into(),
            funder_code: "NCI".into(),
            org_id: None,
            org_name: None,
            fiscal_year: *fy,
            cited_article_ids: vec![],
        }))
        .map_err(|e| e.to_string())?;
        let got = impute_award_year(core, pub_year, &db);
        let want = imputation_oracle(&projects, pub_year);
        ensure(got == want, || {
            format!("case {case}: {got:?} vs {want:?} for {projects:?}")
        })?;
        let absent = impute_award_year("U54XX000001", pub_year, &db);
        ensure(absent == (None, pub_year - 1), || {
            format!("case {case}: absent core {absent:?}")
        })?;
    }
    Ok(format!("1000 fixtures agree ({with_ties} with same-year projects)"))
}

// 5 -------------------------------------------------------------------------

#[derive(Deserialize)]
struct LabeledFragment {
    memo_id: String,
    ordinal: usize,
    raw_text: String,
    expected: Option<String>,
}

fn resolution_quality() -> Check {
    let dir = common::manifest_dir().join("tests/data/resolution");
    let index = io::load_records(&dir.join("records.jsonl")).map_err(|e| e.to_string())?;
    let labeled: Vec<LabeledFragment> = io::read_jsonl(&dir.join("fragments.jsonl")).map_err(|e| e.to_string())?;
    ensure(labeled.len() == 200, || format!("{} fragments", labeled.len()))?;
    let fragments: Vec<ReferenceFragment> = labeled
        .iter()
        .map(|l| ReferenceFragment {
            memo_id: l.memo_id.clone(),
            ordinal: l.ordinal,
            raw_text: l.raw_text.clone(),
            normalized_text: normalize_fragment(&l.raw_text),
        })
        .collect();
    let run = || {
        let (results, _) = resolve_corpus(&fragments, &index, &ResolverConfig::default(), None);
        results
    };
    let first = run();
    let second = run();
    ensure(io::jsonl_bytes(&first) == io::jsonl_bytes(&second), || {
        "runs differ".into()
    })?;

    let expected: BTreeMap<(&str, usize), Option<&str>> = labeled
        .iter()
        .map(|l| ((l.memo_id.as_str(), l.ordinal), l.expected.as_deref()))
        .collect();
    let (mut tp, mut fp) = (0usize, 0usize);
    for r in &first {
        if let Some(id) = &r.article_id {
            if expected[&(r.memo_id.as_str(), r.ordinal)] == Some(id.as_str()) {
                tp += 1;
            } else {
                fp += 1;
            }
        }
    }
    let positives = labeled.iter().filter(|l| l.expected.is_some()).count();
    let precision = tp as f64 / (tp + fp).max(1) as f64;
    let recall = tp as f64 / positives as f64;
    let detail = format!("precision {precision:.3}, recall {recall:.3} ({tp} tp, {fp} fp, {positives} positives)");
    ensure(precision >= 0.95 && recall >= 0.90, || detail.clone())?;
    Ok(detail)
}

// 6 -------------------------------------------------------------------------

fn flow_conservation() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = common::bundled_config(dir.path());
    let err = |e: refmap::Error| e.to_string();
    pipeline::run_ingest(&cfg).map_err(err)?;
    pipeline::run_resolve(&cfg, None).map_err(err)?;
    pipeline::run_link(&cfg).map_err(err)?;
    let results: Vec<ResolutionResult> = io::read_jsonl(&dir.path().join(layout::RESOLUTION)).map_err(err)?;
    let links: Vec<ArticleAwardLink> = io::read_jsonl(&dir.path().join(layout::LINKS)).map_err(err)?;
    let mut cited: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for r in &results {
        let entry = cited.entry(r.memo_id.as_str()).or_default();
        if let Some(a) = &r.article_id {
            entry.insert(a.as_str());
        }
    }
    ensure(cited.len() == 3, || format!("{} memos", cited.len()))?;

    let mut summary = Vec::new();
    for (memo, articles) in &cited {
        let funded = funded_article_count(articles.iter().copied(), &links) as f64;
        let full = build_flow_graph(memo, memo, articles.iter().copied(), &links, &FlowConfig::default());
        let sums = [
            full.out_weight(NodeKind::Funder),
            full.org_in_weight(),
            full.in_weight(NodeKind::Memo),
        ];
        ensure(sums.iter().all(|s| (s - funded).abs() <= 1e-9), || {
            format!("{memo}: sums {sums:?} vs {funded} funded articles")
        })?;
        ensure(funded > 0.0, || format!("{memo}: no funded articles"))?;
        for top_k in 1..=3 {
            let merged = build_flow_graph(memo, memo, articles.iter().copied(), &links, &FlowConfig { top_k });
            let named = merged.nodes.iter().filter(|n| n.kind == NodeKind::Org).count();
            ensure(named <= top_k, || format!("{memo} top_k={top_k}: {named} named orgs"))?;
            ensure(merged.in_weight(NodeKind::Memo) == sums[2], || {
                format!(
                    "{memo} top_k={top_k}: memo inflow {} vs {}",
                    merged.in_weight(NodeKind::Memo),
                    sums[2]
                )
            })?;
            ensure(merged.out_weight(NodeKind::Funder) == sums[0], || {
                format!("{memo} top_k={top_k}: funder outflow changed")
            })?;
            ensure((merged.org_in_weight() - sums[1]).abs() <= 1e-12, || {
                format!("{memo} top_k={top_k}: org inflow changed")
            })?;
        }
        summary.push(format!("{memo}={funded}"));
    }
    Ok(format!("funded articles {}", summary.join(", ")))
}

// 7 -------------------------------------------------------------------------

fn end_to_end_golden() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = common::bundled_config(dir.path());
    let start = Instant::now();
    pipeline::run_all(&cfg, &RunOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let expected = common::read_tree(&common::golden_dir());
    ensure(!expected.is_empty(), || "no goldens checked in".into())?;
    let diffs = common::tree_diff(&expected, &common::outputs(dir.path()));
    ensure(diffs.is_empty(), || diffs.join("; "))?;
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!("{} files identical in {elapsed:.2?}", expected.len()))
}

// 8 -------------------------------------------------------------------------

fn share_difference_properties() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_0008);
    let entities = ["NCI", "NHLBI", "NIA", "NIDDK", "NIMH", "NCATS", "WT"];
    let mut rows_checked = 0;
    for case in 0..500 {
        let n_ent = rng.gen_range(1..=entities.len());
        let pick = &entities[..n_ent];
        let draw = |rng: &mut StdRng| -> Vec<(&'static str, i32)> {
            // every entity appears at least once so both sets share a universe
            let mut v: Vec<_> = pick.iter().map(|e| (*e, rng.gen_range(2000..2006))).collect();
            for _ in 0..rng.gen_range(0..40) {
                v.push((pick[rng.gen_range(0..n_ent)], rng.gen_range(2000..2006)));
            }
            v
        };
        let memo = draw(&mut rng);
        let pool = draw(&mut rng);
        for denom in [Denominator::PoolEntities, Denominator::AllFunders] {
            let fwd = yearly_shares(memo.iter().copied(), pool.iter().copied(), denom).map_err(|e| e.to_string())?;
            let rev = yearly_shares(pool.iter().copied(), memo.iter().copied(), denom).map_err(|e| e.to_string())?;
            let mut per_year: BTreeMap<i32, f64> = BTreeMap::new();
            for r in &fwd {
                *per_year.entry(r.year).or_default() += r.diff_pct;
            }
            for (year, sum) in per_year {
                ensure(sum.abs() <= 1e-9, || {
                    format!("case {case} year {year}: diffs sum to {sum:e}")
                })?;
            }
            ensure(fwd.len() == rev.len(), || {
                format!("case {case}: row sets differ after swap")
            })?;
            for (a, b) in fwd.iter().zip(&rev) {
                ensure(
                    a.entity == b.entity && a.year == b.year && a.diff_pct == -b.diff_pct,
                    || format!("case {case}: {} {} {} vs {}", a.entity, a.year, a.diff_pct, b.diff_pct),
                )?;
            }
            rows_checked += fwd.len();
        }
    }
    Ok(format!("500 fixtures, {rows_checked} rows"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("share arithmetic", share_arithmetic),
        ("wilcoxon exactness", wilcoxon_exactness),
        ("kld properties", kld_properties),
        ("year imputation", year_imputation),
        ("citation resolution quality", resolution_quality),
        ("flow conservation", flow_conservation),
        ("end-to-end golden", end_to_end_golden),
        ("share difference properties", share_difference_properties),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}; {elapsed:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
