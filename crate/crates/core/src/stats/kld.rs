//! Concentration of support as divergence from the uniform distribution.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::StatsError;

/// Tolerance on the sum of proportions.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// `sum_i p_i ln(N p_i)` with `0 ln 0 = 0`; lies in [0, ln N].
pub fn kld(proportions: &[f64]) -> Result<f64, StatsError> {
    if proportions.is_empty() {
        return Err(StatsError::InsufficientData { needed: 1, got: 0 });
    }
    if proportions.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(StatsError::NonFinite);
    }
    let sum: f64 = proportions.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(StatsError::NotProbability { sum });
    }
    let n = proportions.len() as f64;
    let value: f64 = proportions
        .iter()
        .filter(|p| **p > 0.0)
        .map(|p| p * libm::log(n * p))
        .sum();
    // rounding can push the sum a few ulps outside the analytic bounds
    Ok(value.clamp(0.0, libm::log(n)))
}

/// Fractional entity weights for one memo.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityShares<K> {
    /// Entity -> summed fractional article counts.
    pub weights: BTreeMap<K, f64>,
    /// Articles with at least one entity.
    pub articles: usize,
}

impl<K: Ord + Clone> EntityShares<K> {
    /// Each article contributes weight 1 split evenly over its distinct
    /// entities; articles without entities are ignored.
    pub fn from_articles<'a, I, E>(articles: I) -> Self
    where
        I: IntoIterator<Item = E>,
        E: IntoIterator<Item = &'a K>,
        K: 'a,
    {
        let mut weights = BTreeMap::new();
        let mut count = 0;
        for entities in articles {
            let distinct: BTreeSet<&K> = entities.into_iter().collect();
            if distinct.is_empty() {
                continue;
            }
            count += 1;
            let share = 1.0 / distinct.len() as f64;
            for e in distinct {
                *weights.entry(e.clone()).or_insert(0.0) += share;
            }
        }
        EntityShares {
            weights,
            articles: count,
        }
    }

    pub fn proportions(&self) -> Vec<f64> {
        let n = self.articles as f64;
        self.weights.values().map(|w| w / n).collect()
    }

    pub fn n_entities(&self) -> usize {
        self.weights.len()
    }

    /// `None` when no article carries an entity.
    pub fn kld(&self) -> Option<f64> {
        if self.articles == 0 {
            return None;
        }
        kld(&self.proportions()).ok()
    }
}
