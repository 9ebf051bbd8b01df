//! Gating of motion estimates before volume alignment.

use super::search::MotionEstimate;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReliabilityConfig {
    /// Bound on the largest mean error per decision-area sample.
    pub t_abs: f64,
    /// Bound on the spread of the estimation errors relative to their mean.
    pub t_rel: f64,
}

impl Default for ReliabilityConfig {
    fn default() -> Self {
        Self {
            t_abs: 10.0,
            t_rel: 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReliabilityVerdict {
    pub reliable: bool,
    /// `max_κ sqrt(E_κ / |M|)`.
    pub max_mean_error: f64,
    /// `(max_κ sqrt(E_κ) - min_κ sqrt(E_κ)) / mean_κ sqrt(E_κ)`, 0 when all errors vanish.
    pub spread: f64,
}

/// Accepts a set of estimates only if both the absolute error and the
/// error spread across reference frames stay within their thresholds.
///
/// The mean in the spread statistic runs over the estimates actually given.
pub fn check_reliability(estimates: &[MotionEstimate], area_size: usize, cfg: &ReliabilityConfig) -> ReliabilityVerdict {
    if estimates.is_empty() || area_size == 0 {
        return ReliabilityVerdict {
            reliable: false,
            max_mean_error: f64::INFINITY,
            spread: f64::INFINITY,
        };
    }
    let roots: Vec<f64> = estimates.iter().map(|e| e.error.max(0.0).sqrt()).collect();
    let max = roots.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = roots.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = roots.iter().sum::<f64>() / roots.len() as f64;
    let max_mean_error = max / (area_size as f64).sqrt();
    let spread = if mean > 0.0 { (max - min) / mean } else { 0.0 };
    ReliabilityVerdict {
        reliable: max_mean_error <= cfg.t_abs && spread <= cfg.t_rel,
        max_mean_error,
        spread,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn est(error: f64) -> MotionEstimate {
        MotionEstimate {
            error,
            ..MotionEstimate::zero(-1, 1)
        }
    }

    #[test]
    fn zero_errors_are_reliable() {
        let v = check_reliability(&[est(0.0), est(0.0)], 256, &ReliabilityConfig::default());
        assert!(v.reliable);
        assert_eq!((v.max_mean_error, v.spread), (0.0, 0.0));
    }

    #[test]
    fn large_mean_error_is_rejected() {
        // sqrt(E / 256) = 20
        let v = check_reliability(&[est(400.0 * 256.0)], 256, &ReliabilityConfig::default());
        assert!((v.max_mean_error - 20.0).abs() < 1e-12);
        assert!(!v.reliable);
    }

    #[test]
    fn spread_of_one_and_hundred() {
        let v = check_reliability(&[est(1.0), est(10_000.0)], 1_000_000, &ReliabilityConfig::default());
        assert!((v.spread - 99.0 / 50.5).abs() < 1e-12);
        assert!(v.spread <= 3.0);
        // absolute test: sqrt(10000 / 1e6) = 0.1
        assert!(v.reliable);
        let strict = ReliabilityConfig { t_abs: 0.05, t_rel: 3.0 };
        assert!(!check_reliability(&[est(1.0), est(10_000.0)], 1_000_000, &strict).reliable);
    }

    proptest! {
        #[test]
        fn raising_thresholds_never_rejects(
            errors in prop::collection::vec(0.0f64..1e6, 1..4),
            t_abs in 0.1f64..50.0, t_rel in 0.1f64..5.0, bump in 0.0f64..10.0,
        ) {
            let ests: Vec<_> = errors.iter().map(|&e| est(e)).collect();
            let lo = check_reliability(&ests, 256, &ReliabilityConfig { t_abs, t_rel });
            let hi = check_reliability(&ests, 256, &ReliabilityConfig { t_abs: t_abs + bump, t_rel: t_rel + bump });
            prop_assert!(!lo.reliable || hi.reliable);
        }
    }
}
