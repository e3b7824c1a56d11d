//! Yearly award shares and their memo-minus-pool differences.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::StatsError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunderYearShare {
    pub entity: String,
    pub year: i32,
    pub memo_count: usize,
    pub pool_count: usize,
    pub memo_pct: f64,
    pub pool_pct: f64,
    pub diff_pct: f64,
}

/// Which memo awards count toward the yearly memo total.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Denominator {
    /// Only awards of entities present in the pool.
    #[default]
    PoolEntities,
    /// Every memo award, including funders absent from the pool.
    AllFunders,
}

type YearCounts<'a> = BTreeMap<i32, BTreeMap<&'a str, usize>>;

fn count<'a>(awards: impl IntoIterator<Item = (&'a str, i32)>) -> YearCounts<'a> {
    let mut out: YearCounts<'a> = BTreeMap::new();
    for (entity, year) in awards {
        *out.entry(year).or_default().entry(entity).or_default() += 1;
    }
    out
}

/// Per-(entity, year) shares for every year in which both sets have awards.
///
/// Rows exist for each pool entity with an award in either set that year;
/// rows are ordered by entity, then year.
pub fn yearly_shares<'a, M, P>(
    memo_awards: M,
    pool_awards: P,
    denominator: Denominator,
) -> Result<Vec<FunderYearShare>, StatsError>
where
    M: IntoIterator<Item = (&'a str, i32)>,
    P: IntoIterator<Item = (&'a str, i32)>,
{
    let pool = count(pool_awards);
    if pool.is_empty() {
        return Err(StatsError::EmptyPool);
    }
    let universe: BTreeSet<&str> = pool.values().flat_map(|m| m.keys().copied()).collect();
    let memo = count(memo_awards);

    let mut rows = Vec::new();
    for (year, memo_counts) in &memo {
        let Some(pool_counts) = pool.get(year) else {
            continue;
        };
        let memo_total: usize = match denominator {
            Denominator::PoolEntities => memo_counts
                .iter()
                .filter(|(e, _)| universe.contains(*e))
                .map(|(_, n)| n)
                .sum(),
            Denominator::AllFunders => memo_counts.values().sum(),
        };
        let pool_total: usize = pool_counts.values().sum();
        if memo_total == 0 || pool_total == 0 {
            continue;
        }
        let entities: BTreeSet<&str> = pool_counts
            .keys()
            .chain(memo_counts.keys().filter(|e| universe.contains(*e)))
            .copied()
            .collect();
        for entity in entities {
            let m = memo_counts.get(entity).copied().unwrap_or(0);
            let p = pool_counts.get(entity).copied().unwrap_or(0);
            let memo_pct = 100.0 * m as f64 / memo_total as f64;
            let pool_pct = 100.0 * p as f64 / pool_total as f64;
            rows.push(FunderYearShare {
                entity: entity.into(),
                year: *year,
                memo_count: m,
                pool_count: p,
                memo_pct,
                pool_pct,
                diff_pct: memo_pct - pool_pct,
            });
        }
    }
    rows.sort_by(|a, b| (&a.entity, a.year).cmp(&(&b.entity, b.year)));
    Ok(rows)
}
