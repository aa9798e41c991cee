//! Discrete-time all-pole IIR systems.
//!
//! A first-order system with pole `a` has impulse response `a^n u[n]` and
//! transfer function `1 / (1 - a z^-1)`. Higher-order systems are built from
//! a set of real poles by expanding the denominator polynomial
//! `1 + sum_k a_k z^-k = prod_i (1 - p_i z^-1)`. Filtering runs the causal
//! difference equation from zero initial conditions.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// A real pole strictly inside the unit interval `(-1, 1)`.
///
/// This is both the parameter of a first-order IIR target system and the
/// recurrent weight of a single linear reservoir neuron.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Pole(f64);

impl Pole {
    /// Validates `|value| < 1` (strict stability).
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value.abs() < 1.0 {
            Ok(Pole(value))
        } else {
            Err(Error::UnstablePole(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for Pole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Impulse response of the single-pole system at sample `n`: `pole^n`
/// (with `0^0 = 1`).
///
/// Computed as a sequential product so it is bit-identical to iterating the
/// one-neuron state recursion `x[n] = pole * x[n-1]`.
pub fn impulse_response(pole: Pole, n: usize) -> f64 {
    let mut h = 1.0;
    for _ in 0..n {
        h *= pole.value();
    }
    h
}

/// A stable all-pole rational transfer function
/// `H(z) = 1 / (1 + a_1 z^-1 + ... + a_K z^-K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalIir {
    /// Denominator coefficients `a_1 .. a_K` (the leading 1 is implicit).
    denominator: Vec<f64>,
}

impl RationalIir {
    /// Builds a system from raw denominator coefficients, rejecting any
    /// system with a root on or outside the unit circle.
    pub fn new(denominator: Vec<f64>) -> Result<Self> {
        let sys = RationalIir { denominator };
        if let Some(rho) = sys.root_magnitudes().into_iter().find(|&m| m >= 1.0) {
            return Err(Error::UnstableSystem(rho));
        }
        Ok(sys)
    }

    /// Expands `prod_i (1 - p_i z^-1)` into denominator coefficients.
    ///
    /// The empty pole list yields the identity system `H(z) = 1`.
    pub fn from_poles(poles: &[Pole]) -> Self {
        // Iterated convolution with (1, -p_i) in powers of z^-1; the
        // leading coefficient stays 1 and is dropped from storage.
        let mut coeffs = vec![1.0];
        for p in poles {
            coeffs.push(0.0);
            for k in (1..coeffs.len()).rev() {
                coeffs[k] -= p.value() * coeffs[k - 1];
            }
        }
        RationalIir {
            denominator: coeffs[1..].to_vec(),
        }
    }

    /// Convenience constructor for `H(z) = 1 / (1 - a z^-1)`.
    pub fn first_order(pole: Pole) -> Self {
        RationalIir::from_poles(&[pole])
    }

    /// Denominator coefficients `a_1 .. a_K`.
    pub fn denominator(&self) -> &[f64] {
        &self.denominator
    }

    /// Denominator order `K`.
    pub fn order(&self) -> usize {
        self.denominator.len()
    }

    /// Roots of `1 + sum_k a_k z^-k`, i.e. the system poles, computed as
    /// companion-matrix eigenvalues.
    pub fn roots(&self) -> Vec<Complex<f64>> {
        let k = self.order();
        if k == 0 {
            return Vec::new();
        }
        let companion = DMatrix::from_fn(k, k, |i, j| {
            if i == 0 {
                -self.denominator[j]
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        companion.complex_eigenvalues().iter().copied().collect()
    }

    fn root_magnitudes(&self) -> Vec<f64> {
        self.roots().into_iter().map(|r| r.norm()).collect()
    }

    /// Runs the causal difference equation
    /// `y[n] = x[n] - sum_k a_k y[n-k]` from zero initial conditions.
    pub fn filter(&self, input: &Signal) -> Signal {
        let x = input.samples();
        let mut y = vec![0.0; x.len()];
        for n in 0..x.len() {
            let mut acc = x[n];
            for (k, &a) in self.denominator.iter().enumerate() {
                if n > k {
                    acc -= a * y[n - k - 1];
                }
            }
            y[n] = acc;
        }
        Signal { samples: y }
    }

    /// Squared l2 norm of the impulse response, accumulated until the tail
    /// contribution is negligible.
    ///
    /// Poles very close to the unit circle converge slowly; accumulation is
    /// capped at 2^22 samples, which is ample for magnitudes up to ~0.999.
    pub fn impulse_energy(&self) -> f64 {
        let k = self.order();
        if k == 0 {
            return 1.0;
        }
        let mut history = vec![0.0; k];
        let mut energy = 0.0;
        let mut n = 0usize;
        const BLOCK: usize = 256;
        const CAP: usize = 1 << 22;
        loop {
            let mut block_sum = 0.0;
            for _ in 0..BLOCK {
                let mut h = if n == 0 { 1.0 } else { 0.0 };
                for (j, &a) in self.denominator.iter().enumerate() {
                    if n > j {
                        h -= a * history[j];
                    }
                }
                history.rotate_right(1);
                history[0] = h;
                block_sum += h * h;
                n += 1;
            }
            energy += block_sum;
            if block_sum <= 1e-30 * energy || n >= CAP {
                return energy;
            }
        }
    }
}

/// A finite real-valued sample sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
}

impl Signal {
    /// Wraps a sample vector, rejecting non-finite entries.
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if let Some(idx) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::NonFiniteSample(idx));
        }
        Ok(Signal { samples })
    }

    /// `[1, 0, 0, ...]` of the given length.
    pub fn unit_impulse(len: usize) -> Self {
        let mut samples = vec![0.0; len];
        if len > 0 {
            samples[0] = 1.0;
        }
        Signal { samples }
    }

    pub fn zeros(len: usize) -> Self {
        Signal {
            samples: vec![0.0; len],
        }
    }

    /// I.i.d. standard normal samples drawn from `rng`.
    pub fn white_noise<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Signal {
            samples: (0..len).map(|_| rng.sample(StandardNormal)).collect(),
        }
    }

    #[inline]
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Elementwise `a*self + b*other`; lengths must match.
    pub fn axpby(&self, a: f64, other: &Signal, b: f64) -> Result<Signal> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "axpby over lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Signal {
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    /// Squared l2 distance to another signal of the same length.
    pub fn squared_distance(&self, other: &Signal) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(x, y)| (x - y) * (x - y))
            .sum()
    }

    /// Scales every sample in place.
    pub fn scale(&mut self, factor: f64) {
        for s in &mut self.samples {
            *s *= factor;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pole(v: f64) -> Pole {
        Pole::new(v).unwrap()
    }

    #[test]
    fn pole_rejects_unit_magnitude() {
        assert!(Pole::new(1.0).is_err());
        assert!(Pole::new(-1.0).is_err());
        assert!(Pole::new(f64::NAN).is_err());
        assert!(Pole::new(0.999999).is_ok());
    }

    #[test]
    fn impulse_response_powers() {
        assert_eq!(impulse_response(pole(0.5), 0), 1.0);
        assert_eq!(impulse_response(pole(0.5), 3), 0.125);
        // direct power evaluation oracle
        assert!((impulse_response(pole(-0.9), 2) - 0.81).abs() < 1e-15);
        assert_eq!(impulse_response(pole(0.0), 0), 1.0);
    }

    #[test]
    fn from_poles_expands_denominator() {
        let sys = RationalIir::from_poles(&[pole(0.5)]);
        assert_eq!(sys.denominator(), &[-0.5]);

        // (1 - 0.5 z^-1)(1 + 0.5 z^-1) = 1 - 0.25 z^-2
        let sys = RationalIir::from_poles(&[pole(0.5), pole(-0.5)]);
        assert_eq!(sys.order(), 2);
        assert!((sys.denominator()[0] - 0.0).abs() < 1e-15);
        assert!((sys.denominator()[1] + 0.25).abs() < 1e-15);

        let identity = RationalIir::from_poles(&[]);
        assert!(identity.denominator().is_empty());
    }

    #[test]
    fn new_rejects_unstable_denominator() {
        // Root at z = 1.25.
        assert!(RationalIir::new(vec![-1.25]).is_err());
        assert!(RationalIir::new(vec![-0.5]).is_ok());
    }

    #[test]
    fn filter_first_order_matches_impulse_response() {
        let sys = RationalIir::first_order(pole(0.5));
        let out = sys.filter(&Signal::unit_impulse(4));
        assert_eq!(out.samples(), &[1.0, 0.5, 0.25, 0.125]);

        let sys = RationalIir::first_order(pole(-0.73));
        let out = sys.filter(&Signal::unit_impulse(64));
        for (n, &y) in out.samples().iter().enumerate() {
            assert!((y - impulse_response(pole(-0.73), n)).abs() < 1e-12);
        }
    }

    #[test]
    fn filter_identity_passes_input_through() {
        let identity = RationalIir::from_poles(&[]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Signal::white_noise(32, &mut rng);
        assert_eq!(identity.filter(&x), x);
    }

    #[test]
    fn filter_second_order_hand_recursion() {
        // poles {0.3, 0.2} -> denominator [-0.5, 0.06];
        // y[2] = 0 - (-0.5 * 0.5) - (0.06 * 1) = 0.19
        let sys = RationalIir::from_poles(&[pole(0.3), pole(0.2)]);
        assert!((sys.denominator()[0] + 0.5).abs() < 1e-15);
        assert!((sys.denominator()[1] - 0.06).abs() < 1e-15);
        let out = sys.filter(&Signal::unit_impulse(3));
        assert!((out.samples()[0] - 1.0).abs() < 1e-15);
        assert!((out.samples()[1] - 0.5).abs() < 1e-15);
        assert!((out.samples()[2] - 0.19).abs() < 1e-15);
    }

    #[test]
    fn roots_recover_pole_multiset() {
        let given = [0.9, -0.7, 0.3, 0.05, -0.2];
        for k in 1..=given.len() {
            let poles: Vec<Pole> = given[..k].iter().map(|&v| pole(v)).collect();
            let sys = RationalIir::from_poles(&poles);
            let mut recovered: Vec<f64> = sys
                .roots()
                .into_iter()
                .map(|r| {
                    assert!(r.im.abs() < 1e-8, "expected real root, got {r}");
                    r.re
                })
                .collect();
            recovered.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut expected: Vec<f64> = given[..k].to_vec();
            expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (r, e) in recovered.iter().zip(&expected) {
                assert!((r - e).abs() < 1e-8, "k={k}: {r} vs {e}");
            }
        }
    }

    #[test]
    fn impulse_energy_first_order_closed_form() {
        for &a in &[0.0, 0.5, -0.9, 0.95] {
            let sys = RationalIir::first_order(pole(a));
            let expected = 1.0 / (1.0 - a * a);
            assert!(
                (sys.impulse_energy() - expected).abs() < 1e-9 * expected,
                "pole {a}"
            );
        }
    }

    #[test]
    fn impulse_energy_matches_long_simulation() {
        let sys = RationalIir::from_poles(&[pole(0.9), pole(-0.8), pole(0.4)]);
        let h = sys.filter(&Signal::unit_impulse(4000));
        let brute: f64 = h.samples().iter().map(|v| v * v).sum();
        assert!((sys.impulse_energy() - brute).abs() < 1e-9 * brute);
    }

    #[test]
    fn signal_rejects_non_finite() {
        assert!(Signal::new(vec![0.0, f64::INFINITY]).is_err());
        assert!(Signal::new(vec![0.0, 1.0]).is_ok());
    }

    proptest! {
        // filter is linear: filter(a*x + b*y) = a*filter(x) + b*filter(y)
        #[test]
        fn filter_linearity(
            seed in 0u64..1000,
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
            p1 in -0.9f64..0.9,
            p2 in -0.9f64..0.9,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = Signal::white_noise(50, &mut rng);
            let y = Signal::white_noise(50, &mut rng);
            let sys = RationalIir::from_poles(&[pole(p1), pole(p2)]);
            let lhs = sys.filter(&x.axpby(a, &y, b).unwrap());
            let rhs = sys.filter(&x).axpby(a, &sys.filter(&y), b).unwrap();
            for (l, r) in lhs.samples().iter().zip(rhs.samples()) {
                prop_assert!((l - r).abs() < 1e-10);
            }
        }
    }
}
