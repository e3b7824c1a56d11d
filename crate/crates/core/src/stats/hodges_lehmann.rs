//! Hodges-Lehmann pseudo-median with a signed-rank confidence interval.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::wilcoxon::{null_counts, PValueMethod, EXACT_MAX_N};
use super::{normal, StatsError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HodgesLehmann {
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
    pub method: PValueMethod,
}

/// All pairwise means (x_i + x_j) / 2 with i <= j, ascending.
pub fn walsh_averages(xs: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len() * (xs.len() + 1) / 2);
    for i in 0..xs.len() {
        for j in i..xs.len() {
            out.push((xs[i] + xs[j]) / 2.0);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// 1-based rank of the lower interval endpoint among the Walsh averages:
/// one more than the largest c with P(W+ <= c) <= alpha / 2.
fn lower_rank(n: usize, level: f64) -> (usize, PValueMethod) {
    let half_alpha = (1.0 - level) / 2.0;
    if n <= EXACT_MAX_N {
        let counts = null_counts(n);
        let total = (1u64 << n) as f64;
        let mut cum = 0u64;
        let mut k = 0;
        for (c, &cnt) in counts.iter().enumerate() {
            cum += cnt;
            if cum as f64 / total <= half_alpha {
                k = c + 1;
            } else {
                break;
            }
        }
        (k, PValueMethod::Exact)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let sd = libm::sqrt(nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0);
        let c = libm::floor(mean - 0.5 + normal::quantile(half_alpha) * sd);
        let k = if c < 0.0 { 0 } else { c as usize + 1 };
        (k, PValueMethod::NormalApprox)
    }
}

pub fn hodges_lehmann_ci(xs: &[f64], level: f64) -> Result<HodgesLehmann, StatsError> {
    if xs.len() < 2 {
        return Err(StatsError::InsufficientData {
            needed: 2,
            got: xs.len(),
        });
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(StatsError::InvalidLevel(level));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let walsh = walsh_averages(xs);
    let m = walsh.len();
    let (k, method) = lower_rank(xs.len(), level);
    let k = k.clamp(1, m.div_ceil(2));
    let estimate = if m % 2 == 1 {
        walsh[m / 2]
    } else {
        (walsh[m / 2 - 1] + walsh[m / 2]) / 2.0
    };
    Ok(HodgesLehmann {
        estimate,
        lo: walsh[k - 1],
        hi: walsh[m - k],
        level,
        method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn constant_sample() {
        let hl = hodges_lehmann_ci(&[4.2, 4.2, 4.2], 0.95).unwrap();
        assert_eq!((hl.estimate, hl.lo, hl.hi), (4.2, 4.2, 4.2));
    }

    #[test]
    fn two_points() {
        assert_eq!(walsh_averages(&[1.0, 3.0]), vec![1.0, 2.0, 3.0]);
        let hl = hodges_lehmann_ci(&[1.0, 3.0], 0.95).unwrap();
        assert_eq!(hl.estimate, 2.0);
        assert_eq!((hl.lo, hl.hi), (1.0, 3.0));
    }

    #[test]
    fn one_to_five_pseudo_median() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        // brute force: median of the 15 Walsh averages
        let mut w = vec![];
        for i in 0..5 {
            for j in i..5 {
                w.push((xs[i] + xs[j]) / 2.0);
            }
        }
        w.sort_by(f64::total_cmp);
        assert_eq!(w.len(), 15);
        let hl = hodges_lehmann_ci(&xs, 0.95).unwrap();
        assert_eq!(hl.estimate, w[7]);
        assert_eq!(hl.estimate, 3.0);
        // n = 5: P(W+ <= 0) = 1/32 > 0.025, so the interval is the full range
        assert_eq!((hl.lo, hl.hi), (1.0, 5.0));
    }

    #[test]
    fn exact_rank_matches_textbook_critical_values() {
        // two-sided 95%: lower critical values of W+ are 8 at n=10, 52 at n=20
        assert_eq!(lower_rank(10, 0.95).0, 9);
        assert_eq!(lower_rank(20, 0.95).0, 53);
    }

    #[test]
    fn normal_rank_close_to_exact_at_boundary() {
        let nf = 20.0f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let sd = libm::sqrt(nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0);
        let approx = libm::floor(mean - 0.5 - 1.959_963_984_540_054 * sd) as i64 + 1;
        assert!((approx - lower_rank(20, 0.95).0 as i64).abs() <= 1);
        assert_eq!(lower_rank(21, 0.95).1, PValueMethod::NormalApprox);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            hodges_lehmann_ci(&[1.0], 0.95),
            Err(StatsError::InsufficientData { .. })
        ));
        assert!(matches!(
            hodges_lehmann_ci(&[1.0, 2.0], 1.0),
            Err(StatsError::InvalidLevel(_))
        ));
    }

    proptest::proptest! {
        #[test]
        fn translation_equivariant(
            xs in proptest::collection::vec(-100.0f64..100.0, 2..30),
            c in -50.0f64..50.0,
        ) {
            let a = hodges_lehmann_ci(&xs, 0.95).unwrap();
            let shifted: Vec<f64> = xs.iter().map(|x| x + c).collect();
            let b = hodges_lehmann_ci(&shifted, 0.95).unwrap();
            proptest::prop_assert!((b.estimate - a.estimate - c).abs() < 1e-9);
            proptest::prop_assert!((b.lo - a.lo - c).abs() < 1e-9);
            proptest::prop_assert!((b.hi - a.hi - c).abs() < 1e-9);
            proptest::prop_assert!(a.lo <= a.estimate && a.estimate <= a.hi);
        }
    }
}
