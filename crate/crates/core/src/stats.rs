//! Binomial helpers for statistical gates.

use statrs::distribution::{Beta, ContinuousCDF};

/// Standard deviation of an empirical frequency over `n` Bernoulli(p) trials.
pub fn binomial_sigma(p: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    (p * (1.0 - p)).max(0.0).sqrt() / (n as f64).sqrt()
}

/// Whether `observed` lies within `k` binomial standard deviations of `p`.
pub fn within_sigma(observed: f64, p: f64, n: u64, k: f64) -> bool {
    (observed - p).abs() <= k * binomial_sigma(p, n)
}

/// One-sided Clopper-Pearson upper bound on a binomial proportion at `level`.
pub fn clopper_pearson_upper(successes: u64, trials: u64, level: f64) -> f64 {
    assert!(successes <= trials);
    assert!(level > 0.0 && level < 1.0);
    if trials == 0 || successes == trials {
        return 1.0;
    }
    if successes == 0 {
        return 1.0 - (1.0 - level).powf(1.0 / trials as f64);
    }
    beta_quantile(successes as f64 + 1.0, (trials - successes) as f64, level)
}

/// One-sided Clopper-Pearson lower bound on a binomial proportion at `level`.
pub fn clopper_pearson_lower(successes: u64, trials: u64, level: f64) -> f64 {
    assert!(successes <= trials);
    if successes == 0 {
        return 0.0;
    }
    if successes == trials {
        return (1.0 - level).powf(1.0 / trials as f64);
    }
    beta_quantile(successes as f64, (trials - successes) as f64 + 1.0, 1.0 - level)
}

fn beta_quantile(a: f64, b: f64, q: f64) -> f64 {
    let dist = Beta::new(a, b).expect("beta parameters are positive");
    // statrs inverts by bisection; refine so bounds are stable to ~1e-14.
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let guess = dist.inverse_cdf(q);
    if guess.is_finite() {
        let step = 1e-6;
        if dist.cdf((guess - step).max(0.0)) <= q {
            lo = (guess - step).max(0.0);
        }
        if dist.cdf((guess + step).min(1.0)) >= q {
            hi = (guess + step).min(1.0);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dist.cdf(mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Total-variation distance between two distributions on the same outcomes.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
