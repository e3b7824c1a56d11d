//! Share differences, signed-rank tests and concentration measures.

pub mod hodges_lehmann;
pub mod kld;
pub mod normal;
pub mod shares;
pub mod summary;
pub mod wilcoxon;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use hodges_lehmann::{hodges_lehmann_ci, walsh_averages, HodgesLehmann};
pub use kld::{kld, EntityShares};
pub use shares::{yearly_shares, Denominator, FunderYearShare};
pub use wilcoxon::{wilcoxon_signed_rank, PValueMethod, WilcoxonResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("degenerate sample: no nonzero differences")]
    DegenerateSample,
    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("confidence level {0} outside (0, 1)")]
    InvalidLevel(f64),
    #[error("input contains non-finite or negative values")]
    NonFinite,
    #[error("proportions sum to {sum}, not 1")]
    NotProbability { sum: f64 },
    #[error("paired samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("comparison pool is empty")]
    EmptyPool,
    #[error("count {count} outside [0, {total}]")]
    InvalidCount { count: usize, total: usize },
}

/// `100 * count / total`.
pub fn share_of_total(count: usize, total: usize) -> Result<f64, StatsError> {
    if total == 0 || count > total {
        return Err(StatsError::InvalidCount { count, total });
    }
    Ok(100.0 * count as f64 / total as f64)
}

/// Signed-rank test and Hodges-Lehmann interval for one entity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatResult {
    pub entity: String,
    pub n: usize,
    pub median_diff: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub p_value: f64,
}

/// Outcome for one entity; `result` is empty when the entity was excluded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityTest {
    pub entity: String,
    pub n_obs: usize,
    pub result: Option<StatResult>,
    pub note: Option<String>,
}

pub fn one_sample(entity: &str, xs: &[f64], level: f64) -> Result<StatResult, StatsError> {
    let w = wilcoxon_signed_rank(xs, 0.0)?;
    let hl = hodges_lehmann_ci(xs, level)?;
    Ok(StatResult {
        entity: entity.into(),
        n: xs.len(),
        median_diff: hl.estimate,
        ci_lo: hl.lo,
        ci_hi: hl.hi,
        p_value: w.p_value,
    })
}

/// Tests each entity's yearly differences against zero. Entities with fewer
/// than `min_obs` observations are reported without statistics.
pub fn entity_tests(shares: &[FunderYearShare], min_obs: usize, level: f64) -> Vec<EntityTest> {
    let mut by_entity: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for s in shares {
        by_entity.entry(&s.entity).or_default().push(s.diff_pct);
    }
    by_entity
        .into_iter()
        .map(|(entity, diffs)| {
            let (result, note) = if diffs.len() < min_obs {
                (None, Some(alloc::format!("fewer than {min_obs} observations")))
            } else {
                match one_sample(entity, &diffs, level) {
                    Ok(r) => (Some(r), None),
                    Err(e) => (None, Some(alloc::format!("{e}"))),
                }
            };
            EntityTest {
                entity: entity.into(),
                n_obs: diffs.len(),
                result,
                note,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedResult {
    pub n: usize,
    pub pseudo_median_diff: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub p_value: f64,
    pub test: WilcoxonResult,
}

/// Paired signed-rank comparison of `a - b`.
pub fn paired_wilcoxon(a: &[f64], b: &[f64], level: f64) -> Result<PairedResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let test = wilcoxon_signed_rank(&diffs, 0.0)?;
    let hl = hodges_lehmann_ci(&diffs, level)?;
    Ok(PairedResult {
        n: diffs.len(),
        pseudo_median_diff: hl.estimate,
        ci_lo: hl.lo,
        ci_hi: hl.hi,
        p_value: test.p_value,
        test,
    })
}
