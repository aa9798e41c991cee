//! Reservoir-pole distributions and samplers.
//!
//! When the target pole is uniform on `(-alpha0, alpha0)`, the pole density
//! that equalizes the leading error term across nearest-neighbor
//! neighborhoods is
//!
//! ```text
//! p*(beta) = (1/C) / (1 - beta^2),   C = log((1 + alpha0)/(1 - alpha0))
//! ```
//!
//! a bathtub shape that concentrates poles near the edges of the design
//! range. This module provides the density, its closed-form CDF, a rejection
//! sampler with the analytic uniform envelope, an exact inverse-CDF sampler
//! (kept as an independent oracle for the rejection path), and the
//! generalization to a non-uniform target prior `q(beta) ~ prior/(1-beta^2)`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::lti::Pole;

/// Per-draw iteration cap for rejection loops. The acceptance rate of every
/// sampler here is bounded well away from zero, so hitting the cap indicates
/// a defect rather than bad luck.
const MAX_REJECTION_ITERS: u32 = 1_000_000;

/// Uniform target-pole prior on the open interval `(-alpha0, alpha0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformPrior {
    alpha0: f64,
}

impl UniformPrior {
    pub fn new(alpha0: f64) -> Result<Self> {
        if alpha0 > 0.0 && alpha0 < 1.0 {
            Ok(UniformPrior { alpha0 })
        } else {
            Err(Error::InvalidConfig(format!(
                "design range alpha0 must lie in (0, 1), got {alpha0}"
            )))
        }
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    /// `1/(2 alpha0)` on the support, 0 outside.
    pub fn density(&self, x: f64) -> f64 {
        if x.abs() < self.alpha0 {
            0.5 / self.alpha0
        } else {
            0.0
        }
    }

    /// One draw, strictly inside the open interval.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Pole {
        for _ in 0..MAX_REJECTION_ITERS {
            let x = rng.gen_range(-self.alpha0..self.alpha0);
            if x.abs() < self.alpha0 {
                return Pole::new(x).expect("uniform draw inside (-1, 1)");
            }
        }
        unreachable!("uniform sampler failed to produce an interior point");
    }

    /// `n` i.i.d. draws.
    pub fn sample_n<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<Pole> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

/// The edge-concentrating pole density `(1/C)/(1 - beta^2)` on
/// `(-alpha0, alpha0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalPoleDistribution {
    alpha0: f64,
    c: f64,
}

impl OptimalPoleDistribution {
    pub fn new(alpha0: f64) -> Result<Self> {
        if !(alpha0 > 0.0 && alpha0 < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "design range alpha0 must lie in (0, 1), got {alpha0}"
            )));
        }
        let c = ((1.0 + alpha0) / (1.0 - alpha0)).ln();
        Ok(OptimalPoleDistribution { alpha0, c })
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    /// The normalization constant `C = log((1+alpha0)/(1-alpha0))`,
    /// equivalently `2 artanh(alpha0)`.
    pub fn normalizer(&self) -> f64 {
        self.c
    }

    /// Density at `beta`; 0 outside the open support interval.
    pub fn pdf(&self, beta: f64) -> f64 {
        if beta.abs() < self.alpha0 {
            1.0 / (self.c * (1.0 - beta * beta))
        } else {
            0.0
        }
    }

    /// Closed-form CDF `(artanh(beta) + artanh(alpha0)) / C`, clamped to
    /// [0, 1] outside the support.
    pub fn cdf(&self, beta: f64) -> f64 {
        if beta <= -self.alpha0 {
            0.0
        } else if beta >= self.alpha0 {
            1.0
        } else {
            ((beta.atanh() + 0.5 * self.c) / self.c).clamp(0.0, 1.0)
        }
    }

    /// `n` i.i.d. draws by rejection against the uniform envelope whose
    /// height is the density supremum at the support edges.
    ///
    /// A proposal `x` is accepted with probability
    /// `pdf(x)/pdf(edge) = (1 - alpha0^2)/(1 - x^2)`, so the acceptance rate
    /// is at least `1 - alpha0^2` and the loop terminates quickly. Draws
    /// landing exactly on an endpoint are rejected to keep every returned
    /// pole strictly inside the interval.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<Pole> {
        let a = self.alpha0;
        let edge_ratio = 1.0 - a * a;
        (0..n)
            .map(|_| {
                for _ in 0..MAX_REJECTION_ITERS {
                    let x = rng.gen_range(-a..a);
                    if x.abs() >= a {
                        continue;
                    }
                    let u: f64 = rng.gen();
                    if u * (1.0 - x * x) <= edge_ratio {
                        return Pole::new(x).expect("draw inside (-1, 1)");
                    }
                }
                unreachable!("rejection sampler exceeded {MAX_REJECTION_ITERS} iterations");
            })
            .collect()
    }

    /// `n` exact inverse-CDF draws: `beta = tanh(C (u - 1/2))` for
    /// `u ~ U(0, 1)`.
    ///
    /// This is a second, independent sampling path used to validate the
    /// rejection sampler distributionally.
    pub fn sample_inverse_cdf<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<Pole> {
        (0..n)
            .map(|_| {
                for _ in 0..MAX_REJECTION_ITERS {
                    let u: f64 = rng.gen();
                    let x = (self.c * (u - 0.5)).tanh();
                    // u = 0 maps exactly onto -alpha0; redraw boundary hits.
                    if x.abs() < self.alpha0 {
                        return Pole::new(x).expect("tanh output inside (-1, 1)");
                    }
                }
                unreachable!("inverse-CDF sampler kept hitting the support boundary");
            })
            .collect()
    }
}

/// A pole density `prior(beta)/(1 - beta^2)`, normalized over
/// `(-alpha0, alpha0)`: the generalization of [`OptimalPoleDistribution`]
/// to a non-uniform target prior.
pub struct ReweightedDistribution {
    alpha0: f64,
    prior: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    normalizer: f64,
    envelope: f64,
}

impl std::fmt::Debug for ReweightedDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReweightedDistribution")
            .field("alpha0", &self.alpha0)
            .field("normalizer", &self.normalizer)
            .field("envelope", &self.envelope)
            .finish()
    }
}

/// Number of grid points used to bound the reweighted density from above
/// when building the rejection envelope.
const ENVELOPE_GRID: usize = 10_000;

/// Safety factor applied to the grid supremum of the reweighted density.
const ENVELOPE_SLACK: f64 = 1.05;

/// Builds the reweighted distribution for a caller-supplied prior density.
///
/// The normalizer is computed by adaptive quadrature to relative `1e-8`; a
/// prior with no mass on the interval is rejected, as is one that goes
/// negative anywhere on the envelope grid.
pub fn reweighted<F>(dist: &OptimalPoleDistribution, prior: F) -> Result<ReweightedDistribution>
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    let a = dist.alpha0();
    let normalizer = adaptive_simpson(&|x| prior(x) / (1.0 - x * x), -a, a, 1e-8);
    if !normalizer.is_finite() || normalizer <= 0.0 {
        return Err(Error::ZeroMassPrior);
    }
    let mut sup = 0.0f64;
    for i in 0..ENVELOPE_GRID {
        // Midpoint grid: stays strictly inside the open interval.
        let x = -a + 2.0 * a * (i as f64 + 0.5) / ENVELOPE_GRID as f64;
        let p = prior(x);
        if p < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "prior density is negative at beta = {x}"
            )));
        }
        sup = sup.max(p / (1.0 - x * x));
    }
    Ok(ReweightedDistribution {
        alpha0: a,
        prior: Box::new(prior),
        normalizer,
        envelope: sup / normalizer * ENVELOPE_SLACK,
    })
}

impl ReweightedDistribution {
    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Normalized density at `beta`; 0 outside the support interval.
    pub fn density(&self, beta: f64) -> f64 {
        if beta.abs() < self.alpha0 {
            (self.prior)(beta) / ((1.0 - beta * beta) * self.normalizer)
        } else {
            0.0
        }
    }

    /// `n` i.i.d. draws by rejection against the gridded-supremum envelope.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<Pole> {
        let a = self.alpha0;
        (0..n)
            .map(|_| {
                for _ in 0..MAX_REJECTION_ITERS {
                    let x = rng.gen_range(-a..a);
                    if x.abs() >= a {
                        continue;
                    }
                    let u: f64 = rng.gen();
                    if u * self.envelope <= self.density(x) {
                        return Pole::new(x).expect("draw inside (-1, 1)");
                    }
                }
                unreachable!("rejection sampler exceeded {MAX_REJECTION_ITERS} iterations");
            })
            .collect()
    }
}

/// Adaptive Simpson quadrature with a relative tolerance, used only for
/// normalizing reweighted densities.
fn adaptive_simpson<F: Fn(f64) -> f64 + ?Sized>(f: &F, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64 + ?Sized>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let refined = left + right;
        if depth == 0 || (refined - whole).abs() <= 15.0 * tol {
            return refined + (refined - whole) / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }

    let m = 0.5 * (lo + hi);
    let (fa, fm, fb) = (f(lo), f(m), f(hi));
    let whole = simpson(lo, hi, fa, fm, fb);
    // Two passes: the first estimate sets the absolute tolerance scale.
    let scale = whole.abs().max(1e-300);
    recurse(f, lo, hi, fa, fm, fb, whole, rel_tol * scale, 48)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{ks_statistic_one_sample, ks_statistic_two_sample, mean_stderr};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn normalizer_closed_form() {
        let d = OptimalPoleDistribution::new(0.95).unwrap();
        // C = log(1.95/0.05) = log(39)
        assert!((d.normalizer() - 39.0f64.ln()).abs() < 1e-12);
        assert!((d.normalizer() - 3.6636).abs() < 5e-4);
        // and equals 2 artanh(alpha0)
        assert!((d.normalizer() - 2.0 * 0.95f64.atanh()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_design_range() {
        assert!(OptimalPoleDistribution::new(0.0).is_err());
        assert!(OptimalPoleDistribution::new(1.0).is_err());
        assert!(UniformPrior::new(-0.5).is_err());
    }

    #[test]
    fn pdf_reference_values() {
        let d = OptimalPoleDistribution::new(0.95).unwrap();
        assert!((d.pdf(0.0) - 0.273).abs() < 1e-3);
        let d = OptimalPoleDistribution::new(0.8).unwrap();
        assert!((d.pdf(0.0) - 1.0 / 9.0f64.ln()).abs() < 1e-12);
        assert!((d.pdf(0.0) - 0.4551).abs() < 1e-4);
        // out of support
        assert_eq!(d.pdf(0.81), 0.0);
        assert_eq!(d.pdf(-2.0), 0.0);
    }

    #[test]
    fn pdf_is_even_and_bathtub_shaped() {
        let d = OptimalPoleDistribution::new(0.95).unwrap();
        let mut prev = d.pdf(0.0);
        for i in 1..200 {
            let b = 0.94 * i as f64 / 199.0;
            assert_eq!(d.pdf(b), d.pdf(-b));
            let cur = d.pdf(b);
            assert!(cur > prev, "density must increase away from 0");
            prev = cur;
        }
    }

    #[test]
    fn pdf_integrates_to_one() {
        for &a in &[0.5, 0.8, 0.95, 0.99] {
            let d = OptimalPoleDistribution::new(a).unwrap();
            let integral = adaptive_simpson(&|x| d.pdf(x), -a, a, 1e-11);
            assert!((integral - 1.0).abs() < 1e-9, "alpha0={a}: {integral}");
        }
    }

    #[test]
    fn cdf_properties() {
        let d = OptimalPoleDistribution::new(0.95).unwrap();
        assert_eq!(d.cdf(-0.95), 0.0);
        assert_eq!(d.cdf(0.95), 1.0);
        assert!((d.cdf(0.0) - 0.5).abs() < 1e-15);
        // CDF is the integral of the pdf.
        for &b in &[-0.9, -0.4, 0.2, 0.7] {
            let integral = adaptive_simpson(&|x| d.pdf(x), -0.95, b, 1e-11);
            assert!((d.cdf(b) - integral).abs() < 1e-9);
        }
    }

    #[test]
    fn rejection_sampler_basics() {
        let d = OptimalPoleDistribution::new(0.95).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(d.sample(&mut rng, 0).is_empty());
        let draws = d.sample(&mut rng, 30_000);
        assert_eq!(draws.len(), 30_000);
        let vals: Vec<f64> = draws.iter().map(|p| p.value()).collect();
        assert!(vals.iter().all(|v| v.abs() < 0.95));
        // symmetric density: mean compatible with 0
        let (mean, stderr) = mean_stderr(&vals);
        assert!(mean.abs() < 3.0 * stderr, "mean {mean}, stderr {stderr}");
    }

    #[test]
    fn rejection_draws_match_analytic_cdf() {
        let d = OptimalPoleDistribution::new(0.95).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let vals: Vec<f64> = d
            .sample(&mut rng, 30_000)
            .iter()
            .map(|p| p.value())
            .collect();
        let ks = ks_statistic_one_sample(&vals, |x| d.cdf(x));
        assert!(ks < 0.015, "KS distance {ks}");
    }

    #[test]
    fn inverse_cdf_sampler_pointwise_and_distribution() {
        let d = OptimalPoleDistribution::new(0.95).unwrap();
        // u = 1/2 is the median of the symmetric density.
        assert_eq!((d.normalizer() * (0.5 - 0.5)).tanh(), 0.0);
        // u near 1 approaches the support edge from below.
        let near_edge = (d.normalizer() * (1.0 - 1e-12 - 0.5)).tanh();
        assert!(near_edge < 0.95 && near_edge > 0.9499);

        let mut rng_a = ChaCha8Rng::seed_from_u64(5);
        let mut rng_b = ChaCha8Rng::seed_from_u64(6);
        let a: Vec<f64> = d
            .sample(&mut rng_a, 20_000)
            .iter()
            .map(|p| p.value())
            .collect();
        let b: Vec<f64> = d
            .sample_inverse_cdf(&mut rng_b, 20_000)
            .iter()
            .map(|p| p.value())
            .collect();
        let ks = ks_statistic_two_sample(&a, &b);
        assert!(ks < 0.025, "two-sample KS {ks}");
    }

    #[test]
    fn samplers_are_deterministic() {
        let d = OptimalPoleDistribution::new(0.95).unwrap();
        let one = d.sample(&mut ChaCha8Rng::seed_from_u64(7), 100);
        let two = d.sample(&mut ChaCha8Rng::seed_from_u64(7), 100);
        assert_eq!(one, two);
        let one = d.sample_inverse_cdf(&mut ChaCha8Rng::seed_from_u64(8), 100);
        let two = d.sample_inverse_cdf(&mut ChaCha8Rng::seed_from_u64(8), 100);
        assert_eq!(one, two);
    }

    #[test]
    fn reweighted_uniform_prior_recovers_base_density() {
        let d = OptimalPoleDistribution::new(0.95).unwrap();
        // Any constant works; normalization absorbs it.
        let rw = reweighted(&d, |_| 1.0).unwrap();
        for i in 0..101 {
            let x = -0.94 + 1.88 * i as f64 / 100.0;
            assert!(
                (rw.density(x) - d.pdf(x)).abs() < 1e-8,
                "x={x}: {} vs {}",
                rw.density(x),
                d.pdf(x)
            );
        }
    }

    #[test]
    fn reweighted_triangular_prior_matches_analytic_normalizer() {
        let a = 0.95f64;
        let d = OptimalPoleDistribution::new(a).unwrap();
        let rw = reweighted(&d, move |x| 1.0 - x.abs() / a).unwrap();
        // Z = 2[artanh(a) + ln(1 - a^2)/(2a)] by splitting the integrand.
        let z = 2.0 * (a.atanh() + (1.0 - a * a).ln() / (2.0 * a));
        assert!((rw.normalizer() - z).abs() < 1e-7 * z);
        let x = 0.3;
        let expected = (1.0 - x / a) / ((1.0 - x * x) * z);
        assert!((rw.density(x) - expected).abs() < 1e-6 * expected);
    }

    #[test]
    fn reweighted_half_support_prior_yields_positive_draws() {
        let d = OptimalPoleDistribution::new(0.95).unwrap();
        let rw = reweighted(&d, |x| if x > 0.0 { 1.0 } else { 0.0 }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let draws = rw.sample(&mut rng, 2000);
        assert!(draws.iter().all(|p| p.value() > 0.0));
    }

    #[test]
    fn reweighted_rejects_bad_priors() {
        let d = OptimalPoleDistribution::new(0.95).unwrap();
        assert_eq!(reweighted(&d, |_| 0.0).unwrap_err(), Error::ZeroMassPrior);
        // positive total mass, but negative on part of the interval
        assert!(matches!(
            reweighted(&d, |x| x + 0.4).unwrap_err(),
            Error::InvalidConfig(_)
        ));
    }

    #[test]
    fn quadrature_sanity() {
        // smooth closed forms
        let i = adaptive_simpson(&|x: f64| x.cos(), 0.0, 1.0, 1e-10);
        assert!((i - 1.0f64.sin()).abs() < 1e-10);
        let i = adaptive_simpson(&|x: f64| 1.0 / (1.0 - x * x), -0.9, 0.9, 1e-10);
        assert!((i - 2.0 * 0.9f64.atanh()).abs() < 1e-9);
    }
}
