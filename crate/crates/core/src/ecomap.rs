//! The funder -> research organization -> memo ecosystem.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::biblio::BiblioIndex;
use crate::funding::{ArticleAwardLink, UNMAPPED};
use crate::resolver::{CoverageStats, ResolutionResult};
use crate::stats::summary::{quartiles, Quartiles};
use crate::stats::{share_of_total, EntityTest, StatResult};

pub const OTHER_ORG_ID: &str = "org:~other";
pub const UNKNOWN_ORG_ID: &str = "org:~unknown";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Funder,
    Org,
    OtherOrg,
    UnknownOrg,
    Memo,
}

impl NodeKind {
    /// Column in a three-column layout.
    pub fn column(self) -> usize {
        match self {
            NodeKind::Funder => 0,
            NodeKind::Org | NodeKind::OtherOrg | NodeKind::UnknownOrg => 1,
            NodeKind::Memo => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub label: String,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: String,
    pub dst: String,
    pub weight: f64,
}

/// Weighted tripartite flow graph; weights are in article-fraction units.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FlowGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowConfig {
    pub top_k: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { top_k: 10 }
    }
}

fn funder_node(code: &str) -> String {
    alloc::format!("funder:{code}")
}

fn org_node(org_id: &str) -> String {
    alloc::format!("org:{org_id}")
}

pub fn memo_node(memo_id: &str) -> String {
    alloc::format!("memo:{memo_id}")
}

impl FlowGraph {
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Larger of in- and out-flow of every node.
    pub fn throughput(&self) -> BTreeMap<&str, f64> {
        let mut inflow: BTreeMap<&str, f64> = BTreeMap::new();
        let mut outflow: BTreeMap<&str, f64> = BTreeMap::new();
        for e in &self.edges {
            *outflow.entry(e.src.as_str()).or_default() += e.weight;
            *inflow.entry(e.dst.as_str()).or_default() += e.weight;
        }
        self.nodes
            .iter()
            .map(|n| {
                let i = inflow.get(n.id.as_str()).copied().unwrap_or(0.0);
                let o = outflow.get(n.id.as_str()).copied().unwrap_or(0.0);
                (n.id.as_str(), i.max(o))
            })
            .collect()
    }

    /// Sum of weights leaving nodes of `kind`.
    pub fn out_weight(&self, kind: NodeKind) -> f64 {
        self.kind_weight(kind, |e| &e.src)
    }

    /// Sum of weights entering nodes of `kind`.
    pub fn in_weight(&self, kind: NodeKind) -> f64 {
        self.kind_weight(kind, |e| &e.dst)
    }

    /// Sum of weights entering the org column (named, other and unknown).
    pub fn org_in_weight(&self) -> f64 {
        self.in_weight(NodeKind::Org) + self.in_weight(NodeKind::OtherOrg) + self.in_weight(NodeKind::UnknownOrg)
    }

    fn kind_weight(&self, kind: NodeKind, end: impl Fn(&Edge) -> &String) -> f64 {
        let ids: BTreeSet<&str> = self
            .nodes
            .iter()
            .filter(|n| n.kind == kind)
            .map(|n| n.id.as_str())
            .collect();
        self.edges
            .iter()
            .filter(|e| ids.contains(end(e).as_str()))
            .map(|e| e.weight)
            .sum()
    }

    /// Nodes by (kind, descending throughput, id); edges by the positions of
    /// their endpoints.
    pub fn into_canonical(mut self) -> Self {
        let tp: BTreeMap<String, f64> = self.throughput().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        self.nodes.sort_by(|a, b| {
            a.kind
                .cmp(&b.kind)
                .then_with(|| tp[&b.id].total_cmp(&tp[&a.id]))
                .then_with(|| a.id.cmp(&b.id))
        });
        let pos: BTreeMap<&str, usize> = self.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
        let mut edges = core::mem::take(&mut self.edges);
        edges.sort_by_key(|e| (pos[e.src.as_str()], pos[e.dst.as_str()]));
        self.edges = edges;
        self
    }
}

/// Builds the flow graph of one memo.
///
/// Each funded article spreads weight 1 evenly over its distinct
/// (funder, organization) pairs. Organizations outside the `top_k` heaviest
/// are merged into one "Other" node (ties at the boundary go to the smaller
/// org id); links without an org id route through one "Unknown" node.
pub fn build_flow_graph<'a, I>(
    memo_id: &str,
    memo_label: &str,
    article_ids: I,
    links: &[ArticleAwardLink],
    config: &FlowConfig,
) -> FlowGraph
where
    I: IntoIterator<Item = &'a str>,
{
    let articles: BTreeSet<&str> = article_ids.into_iter().collect();
    let mut by_article: BTreeMap<&str, BTreeSet<(&str, Option<&str>)>> = BTreeMap::new();
    let mut org_labels: BTreeMap<&str, &str> = BTreeMap::new();
    for l in links.iter().filter(|l| articles.contains(l.article_id.as_str())) {
        let org = l.org_id.as_deref();
        if let Some(id) = org {
            let label = l.org_name.as_deref().unwrap_or(id);
            org_labels.entry(id).or_insert(label);
        }
        by_article
            .entry(&l.article_id)
            .or_default()
            .insert((&l.funder_code, org));
    }
    if by_article.is_empty() {
        return FlowGraph::default();
    }

    let mut pair_weight: BTreeMap<(&str, Option<&str>), f64> = BTreeMap::new();
    for pairs in by_article.values() {
        let share = 1.0 / pairs.len() as f64;
        for &pair in pairs {
            *pair_weight.entry(pair).or_default() += share;
        }
    }

    let mut org_total: BTreeMap<&str, f64> = BTreeMap::new();
    for (&(_, org), w) in &pair_weight {
        if let Some(o) = org {
            *org_total.entry(o).or_default() += w;
        }
    }
    let mut ranked: Vec<(&str, f64)> = org_total.iter().map(|(k, v)| (*k, *v)).collect();
    ranked.sort_by(|a, b| match b.1.total_cmp(&a.1) {
        Ordering::Equal => a.0.cmp(b.0),
        o => o,
    });
    let named: BTreeSet<&str> = ranked.iter().take(config.top_k).map(|(k, _)| *k).collect();

    let org_target = |org: Option<&str>| -> String {
        match org {
            None => UNKNOWN_ORG_ID.to_string(),
            Some(o) if named.contains(o) => org_node(o),
            Some(_) => OTHER_ORG_ID.to_string(),
        }
    };

    let mut nodes: BTreeMap<String, Node> = BTreeMap::new();
    let mut funder_edges: BTreeMap<(String, String), f64> = BTreeMap::new();
    let mut memo_edges: BTreeMap<String, f64> = BTreeMap::new();
    for (&(funder, org), &w) in &pair_weight {
        let f_id = funder_node(funder);
        nodes.entry(f_id.clone()).or_insert_with(|| Node {
            id: f_id.clone(),
            label: funder.to_string(),
            kind: NodeKind::Funder,
        });
        let o_id = org_target(org);
        nodes.entry(o_id.clone()).or_insert_with(|| match org {
            None => Node {
                id: o_id.clone(),
                label: "Unknown".into(),
                kind: NodeKind::UnknownOrg,
            },
            Some(o) if named.contains(o) => Node {
                id: o_id.clone(),
                label: org_labels.get(o).copied().unwrap_or(o).to_string(),
                kind: NodeKind::Org,
            },
            Some(_) => Node {
                id: o_id.clone(),
                label: "Other".into(),
                kind: NodeKind::OtherOrg,
            },
        });
        *funder_edges.entry((f_id, o_id.clone())).or_default() += w;
        *memo_edges.entry(o_id).or_default() += w;
    }
    let m_id = memo_node(memo_id);
    nodes.insert(
        m_id.clone(),
        Node {
            id: m_id.clone(),
            label: if memo_label.is_empty() {
                memo_id.to_string()
            } else {
                memo_label.to_string()
            },
            kind: NodeKind::Memo,
        },
    );

    let mut edges: Vec<Edge> = funder_edges
        .into_iter()
        .map(|((src, dst), weight)| Edge { src, dst, weight })
        .collect();
    edges.extend(memo_edges.into_iter().map(|(src, weight)| Edge {
        src,
        dst: m_id.clone(),
        weight,
    }));
    FlowGraph {
        nodes: nodes.into_values().collect(),
        edges,
    }
    .into_canonical()
}

/// Number of articles among `article_ids` with at least one award link.
pub fn funded_article_count<'a>(article_ids: impl IntoIterator<Item = &'a str>, links: &[ArticleAwardLink]) -> usize {
    let funded: BTreeSet<&str> = links.iter().map(|l| l.article_id.as_str()).collect();
    article_ids
        .into_iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .filter(|a| funded.contains(a))
        .count()
}

/// A unique award behind memo-cited articles, keyed by (core number, year).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoAward {
    pub core_project_number: String,
    pub year: i32,
    pub funder_code: String,
    pub org_id: Option<String>,
    pub org_name: Option<String>,
}

/// Unique awards linked to any of `article_ids`. When several links share a
/// (core, year) key, one that carries an org id is kept.
pub fn memo_awards<'a>(article_ids: impl IntoIterator<Item = &'a str>, links: &[ArticleAwardLink]) -> Vec<MemoAward> {
    let articles: BTreeSet<&str> = article_ids.into_iter().collect();
    let mut out: BTreeMap<(&str, i32), MemoAward> = BTreeMap::new();
    for l in links.iter().filter(|l| articles.contains(l.article_id.as_str())) {
        let key = (l.core_project_number.as_str(), l.imputed_year);
        let candidate = MemoAward {
            core_project_number: l.core_project_number.clone(),
            year: l.imputed_year,
            funder_code: l.funder_code.clone(),
            org_id: l.org_id.clone(),
            org_name: l.org_name.clone(),
        };
        match out.get(&key) {
            Some(cur) if cur.org_id.is_some() || candidate.org_id.is_none() => {}
            _ => {
                out.insert(key, candidate);
            }
        }
    }
    out.into_values().collect()
}

/// One row of a funder or recipient table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub entity: String,
    pub label: String,
    pub n_awards: usize,
    pub pct_awards: f64,
    pub n_obs: Option<usize>,
    pub stat: Option<StatResult>,
}

/// Joins award counts with per-entity tests. Percentages are over the sum of
/// all counts; entities without a test result get empty statistics.
pub fn table_rows(counts: &BTreeMap<String, (String, usize)>, tests: &[EntityTest]) -> Vec<TableRow> {
    let total: usize = counts.values().map(|(_, n)| n).sum();
    let tests: BTreeMap<&str, &EntityTest> = tests.iter().map(|t| (t.entity.as_str(), t)).collect();
    counts
        .iter()
        .map(|(entity, (label, n))| {
            let t = tests.get(entity.as_str());
            TableRow {
                entity: entity.clone(),
                label: label.clone(),
                n_awards: *n,
                pct_awards: share_of_total(*n, total).unwrap_or(0.0),
                n_obs: t.map(|t| t.n_obs),
                stat: t.and_then(|t| t.result.clone()),
            }
        })
        .collect()
}

/// Award counts by funder and by organization over memo awards. Unmapped
/// funders and awards without org ids are left out and counted separately.
pub struct EntityCounts {
    pub funders: BTreeMap<String, (String, usize)>,
    pub orgs: BTreeMap<String, (String, usize)>,
    pub unmapped_funder_awards: usize,
    pub unknown_org_awards: usize,
}

pub fn entity_counts(awards: &[MemoAward]) -> EntityCounts {
    let mut c = EntityCounts {
        funders: BTreeMap::new(),
        orgs: BTreeMap::new(),
        unmapped_funder_awards: 0,
        unknown_org_awards: 0,
    };
    for a in awards {
        if a.funder_code == UNMAPPED {
            c.unmapped_funder_awards += 1;
        } else {
            c.funders
                .entry(a.funder_code.clone())
                .or_insert_with(|| (a.funder_code.clone(), 0))
                .1 += 1;
        }
        match &a.org_id {
            Some(id) => {
                let label = a.org_name.clone().unwrap_or_else(|| id.clone());
                c.orgs.entry(id.clone()).or_insert_with(|| (label, 0)).1 += 1;
            }
            None => c.unknown_org_awards += 1,
        }
    }
    c
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RetractionFlag {
    pub memo_id: String,
    pub article_id: String,
    pub note: String,
}

/// One flag per (memo, retracted article), ordered by memo then article.
pub fn flag_retracted(results: &[ResolutionResult], index: &BiblioIndex) -> Vec<RetractionFlag> {
    let mut seen = BTreeSet::new();
    for r in results {
        if let Some(id) = &r.article_id {
            if let Some(rec) = index.get(id).filter(|rec| rec.retracted) {
                seen.insert(RetractionFlag {
                    memo_id: r.memo_id.clone(),
                    article_id: id.clone(),
                    note: alloc::format!("cites retracted article: {}", rec.title),
                });
            }
        }
    }
    seen.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveragePoint {
    pub memo_id: String,
    pub fragment_count: usize,
    pub linked_pct: f64,
}

/// Scatter points for memos with fragments, plus median/IQR of linked_pct.
pub fn coverage_report(stats: &[CoverageStats]) -> (Vec<CoveragePoint>, Option<Quartiles>) {
    let points: Vec<CoveragePoint> = stats
        .iter()
        .filter_map(|s| {
            s.linked_pct.map(|p| CoveragePoint {
                memo_id: s.memo_id.clone(),
                fragment_count: s.fragment_count,
                linked_pct: p,
            })
        })
        .collect();
    let pcts: Vec<f64> = points.iter().map(|p| p.linked_pct).collect();
    let summary = quartiles(&pcts);
    (points, summary)
}
