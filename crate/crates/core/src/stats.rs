//! Small statistical utilities: Kolmogorov-Smirnov distances and summary
//! statistics for Monte Carlo estimates.

/// Sample mean and standard error of the mean.
///
/// The standard error uses the unbiased sample variance; it is 0 for fewer
/// than two values.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// One-sample Kolmogorov-Smirnov statistic: the sup-norm distance between
/// the empirical CDF of `samples` and the given analytic CDF.
pub fn ks_statistic_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    assert!(!samples.is_empty(), "KS statistic of an empty sample");
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite sample"));
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        // The empirical CDF jumps from i/n to (i+1)/n at x; the sup distance
        // is attained on one side of the jump.
        d = d.max((f - i as f64 / n).abs());
        d = d.max((f - (i as f64 + 1.0) / n).abs());
    }
    d
}

/// Two-sample Kolmogorov-Smirnov statistic: the sup-norm distance between
/// the empirical CDFs of `a` and `b`.
pub fn ks_statistic_two_sample(a: &[f64], b: &[f64]) -> f64 {
    assert!(
        !a.is_empty() && !b.is_empty(),
        "KS statistic of an empty sample"
    );
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).expect("non-finite sample"));
    ys.sort_by(|p, q| p.partial_cmp(q).expect("non-finite sample"));
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let t = xs[i].min(ys[j]);
        // Advance past every sample equal to t in both arrays before
        // measuring, so ties contribute a single comparison point.
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mean_stderr_hand_values() {
        let (m, se) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-15);
        // var = (2.25+0.25+0.25+2.25)/3 = 5/3; se = sqrt(5/12)
        assert!((se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        let (m1, se1) = mean_stderr(&[7.0]);
        assert_eq!(m1, 7.0);
        assert_eq!(se1, 0.0);
    }

    #[test]
    fn one_sample_ks_on_centered_grid() {
        // Points at (i + 0.5)/n against the U(0,1) CDF sit exactly half a
        // step from both sides of each jump: D = 1/(2n).
        let n = 50usize;
        let samples: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic_one_sample(&samples, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn one_sample_ks_detects_wrong_cdf() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let samples: Vec<f64> = (0..10_000).map(|_| rng.gen::<f64>()).collect();
        let d_right = ks_statistic_one_sample(&samples, |x| x.clamp(0.0, 1.0));
        assert!(d_right < 0.02, "uniform draws vs uniform CDF: {d_right}");
        // Same draws against a quadratic CDF must be far off.
        let d_wrong = ks_statistic_one_sample(&samples, |x| (x * x).clamp(0.0, 1.0));
        assert!(d_wrong > 0.2, "uniform draws vs quadratic CDF: {d_wrong}");
    }

    #[test]
    fn two_sample_ks_hand_values() {
        assert_eq!(ks_statistic_two_sample(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_eq!(ks_statistic_two_sample(&[0.0, 0.1], &[5.0, 6.0]), 1.0);
        let d = ks_statistic_two_sample(&[1.0, 2.0], &[1.5]);
        assert!((d - 0.5).abs() < 1e-15);
        // With ties: F_a steps 2/3 at 1, F_b steps 1/2 at 1.
        let d = ks_statistic_two_sample(&[1.0, 1.0, 2.0], &[1.0, 3.0]);
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn two_sample_ks_same_distribution_is_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a: Vec<f64> = (0..20_000).map(|_| rng.gen::<f64>()).collect();
        let b: Vec<f64> = (0..20_000).map(|_| rng.gen::<f64>()).collect();
        assert!(ks_statistic_two_sample(&a, &b) < 0.02);
    }
}
