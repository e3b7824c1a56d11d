//! One-sample Wilcoxon signed-rank test.
//!
//! Observations equal to `mu` are discarded. Absolute deviations get
//! midranks when tied. Small tie-free samples use the exact null
//! distribution of W+ (the number of sign patterns reaching each value);
//! everything else uses a normal approximation with tie-corrected variance,
//! continuity correction and a fourth-cumulant Edgeworth term.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{normal, StatsError};

/// Largest effective sample size for which the exact distribution is used.
pub const EXACT_MAX_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Observations left after discarding zeros.
    pub n: usize,
    pub zeros_discarded: usize,
    pub ties: bool,
    /// Sum of ranks of positive deviations.
    pub w_plus: f64,
    pub p_value: f64,
    pub method: PValueMethod,
}

/// Signed-rank data after zero removal: midranks of |x - mu| and signs.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedRanks {
    pub ranks: Vec<f64>,
    pub positive: Vec<bool>,
    pub zeros: usize,
    pub ties: bool,
}

impl SignedRanks {
    pub fn new(xs: &[f64], mu: f64) -> Result<Self, StatsError> {
        if xs.iter().any(|x| !x.is_finite()) || !mu.is_finite() {
            return Err(StatsError::NonFinite);
        }
        let devs: Vec<f64> = xs.iter().map(|x| x - mu).filter(|d| *d != 0.0).collect();
        let zeros = xs.len() - devs.len();
        let mut order: Vec<usize> = (0..devs.len()).collect();
        order.sort_by(|&a, &b| libm::fabs(devs[a]).total_cmp(&libm::fabs(devs[b])));
        let mut ranks = vec![0.0; devs.len()];
        let mut ties = false;
        let mut i = 0;
        while i < order.len() {
            let mut j = i + 1;
            let v = libm::fabs(devs[order[i]]);
            while j < order.len() && libm::fabs(devs[order[j]]) == v {
                j += 1;
            }
            if j - i > 1 {
                ties = true;
            }
            // positions i..j hold ranks i+1..=j
            let mid = (i + 1 + j) as f64 / 2.0;
            for &k in &order[i..j] {
                ranks[k] = mid;
            }
            i = j;
        }
        Ok(SignedRanks {
            positive: devs.iter().map(|d| *d > 0.0).collect(),
            ranks,
            zeros,
            ties,
        })
    }

    pub fn n(&self) -> usize {
        self.ranks.len()
    }

    pub fn w_plus(&self) -> f64 {
        self.ranks
            .iter()
            .zip(&self.positive)
            .filter(|(_, p)| **p)
            .map(|(r, _)| r)
            .sum()
    }
}

/// Number of sign patterns of ranks 1..=n giving each W+ value 0..=n(n+1)/2.
pub fn null_counts(n: usize) -> Vec<u64> {
    assert!(n < 64, "exact signed-rank counts overflow beyond n = 63");
    let max = n * (n + 1) / 2;
    let mut counts = vec![0u64; max + 1];
    counts[0] = 1;
    for k in 1..=n {
        for w in (k..=max).rev() {
            counts[w] += counts[w - k];
        }
    }
    counts
}

/// Exact two-sided p-value for an integer W+ on `n` tie-free ranks:
/// twice the smaller tail count over 2^n, capped at one.
pub fn exact_p_value(n: usize, w_plus: usize) -> f64 {
    let counts = null_counts(n);
    exact_p_from_counts(&counts, n, w_plus)
}

pub(crate) fn exact_p_from_counts(counts: &[u64], n: usize, w_plus: usize) -> f64 {
    let w = w_plus.min(counts.len() - 1);
    let lower: u64 = counts[..=w].iter().sum();
    let upper: u64 = counts[w..].iter().sum();
    let total = 1u128 << n;
    let tail = 2 * lower.min(upper) as u128;
    (tail.min(total) as f64) / total as f64
}

/// Normal approximation of the two-sided p-value for W+ over `ranks`.
pub fn approx_p_value(ranks: &[f64], w_plus: f64) -> f64 {
    let mean: f64 = ranks.iter().sum::<f64>() / 2.0;
    let var: f64 = ranks.iter().map(|r| r * r).sum::<f64>() / 4.0;
    let k4: f64 = -ranks.iter().map(|r| r * r * r * r).sum::<f64>() / 8.0;
    let sd = libm::sqrt(var);
    let excess = k4 / (var * var);
    let cdf = |x: f64| {
        let z = (x - mean) / sd;
        normal::cdf(z) - normal::pdf(z) * excess / 24.0 * (z * z * z - 3.0 * z)
    };
    let lower = cdf(w_plus + 0.5);
    let upper = 1.0 - cdf(w_plus - 0.5);
    (2.0 * lower.min(upper)).clamp(0.0, 1.0)
}

pub fn wilcoxon_signed_rank(xs: &[f64], mu: f64) -> Result<WilcoxonResult, StatsError> {
    let sr = SignedRanks::new(xs, mu)?;
    if sr.n() == 0 {
        return Err(StatsError::DegenerateSample);
    }
    let w_plus = sr.w_plus();
    let (p_value, method) = if sr.n() <= EXACT_MAX_N && !sr.ties {
        // tie-free ranks are integers, so W+ is exact
        (exact_p_value(sr.n(), w_plus as usize), PValueMethod::Exact)
    } else {
        (approx_p_value(&sr.ranks, w_plus), PValueMethod::NormalApprox)
    };
    Ok(WilcoxonResult {
        n: sr.n(),
        zeros_discarded: sr.zeros,
        ties: sr.ties,
        w_plus,
        p_value,
        method,
    })
}
