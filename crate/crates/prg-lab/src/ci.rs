//! Exact binomial (Clopper-Pearson) confidence intervals.
//!
//! Bound experiments compare the interval's upper limit against a one-sided
//! upper bound on a probability, so the exact interval is the right tool.

use statrs::distribution::{Beta, ContinuousCDF};

/// Two-sided Clopper-Pearson interval for `successes` out of `trials` at the
/// given confidence level.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(trials > 0, "interval needs at least one trial");
    assert!(successes <= trials);
    assert!((0.0..1.0).contains(&(1.0 - confidence)));
    let alpha = 1.0 - confidence;
    let (x, n) = (successes as f64, trials as f64);
    let lower = if successes == 0 {
        0.0
    } else {
        Beta::new(x, n - x + 1.0).expect("valid shape").inverse_cdf(alpha / 2.0)
    };
    let upper = if successes == trials {
        1.0
    } else {
        Beta::new(x + 1.0, n - x).expect("valid shape").inverse_cdf(1.0 - alpha / 2.0)
    };
    (lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_successes_closed_form() {
        // upper = 1 - (alpha/2)^(1/n), an independent closed form.
        let (lo, hi) = clopper_pearson(0, 100, 0.99);
        assert_eq!(lo, 0.0);
        let expect = 1.0 - (0.005f64).powf(1.0 / 100.0);
        assert!((hi - expect).abs() < 1e-9, "{hi} vs {expect}");
    }

    #[test]
    fn all_successes_closed_form() {
        let (lo, hi) = clopper_pearson(100, 100, 0.99);
        assert_eq!(hi, 1.0);
        let expect = (0.005f64).powf(1.0 / 100.0);
        assert!((lo - expect).abs() < 1e-9);
    }

    #[test]
    fn interval_contains_point_estimate() {
        for &(x, n) in &[(1u64, 10u64), (5, 10), (250, 1000), (999, 1000)] {
            let (lo, hi) = clopper_pearson(x, n, 0.99);
            let p = x as f64 / n as f64;
            assert!(lo <= p && p <= hi, "({x},{n}) -> [{lo},{hi}]");
            assert!(lo >= 0.0 && hi <= 1.0);
        }
    }

    #[test]
    fn narrower_at_lower_confidence() {
        let (lo99, hi99) = clopper_pearson(50, 200, 0.99);
        let (lo95, hi95) = clopper_pearson(50, 200, 0.95);
        assert!(lo95 > lo99 && hi95 < hi99);
    }
}
