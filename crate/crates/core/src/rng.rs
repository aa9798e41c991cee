//! Deterministic seed derivation for Monte Carlo substreams.
//!
//! Every random quantity in an experiment is drawn from its own generator,
//! seeded by mixing the experiment base seed with the trial index and a
//! purpose tag. Trials are therefore independent of execution order, so a
//! parallel run produces bit-identical results to a serial one, and the
//! stream for trial `i` never changes when the trial count grows.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a substream is used for within one trial.
///
/// Distinct tags keep the draws for different quantities decoupled: e.g.
/// changing how many poles are sampled must not shift the test input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    /// Target system parameters (first-order pole or denominator roots).
    Target,
    /// Reservoir pole / weight sampling.
    Poles,
    /// Dense reservoir entries (sparsity mask and values).
    Reservoir,
    /// Training input sequence.
    TrainInput,
    /// Test input sequence.
    TestInput,
}

impl StreamKind {
    fn tag(self) -> u64 {
        match self {
            StreamKind::Target => 0x5441_5247,
            StreamKind::Poles => 0x504f_4c45,
            StreamKind::Reservoir => 0x5245_5356,
            StreamKind::TrainInput => 0x5452_494e,
            StreamKind::TestInput => 0x5445_5354,
        }
    }
}

/// SplitMix64 finalizer; a single mixing round with good avalanche behavior.
#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed for one substream by chaining the mixer over
/// `(base_seed, trial, kind)`.
pub fn substream_seed(base_seed: u64, trial: u64, kind: StreamKind) -> u64 {
    let mut s = splitmix64(base_seed);
    s = splitmix64(s.wrapping_add(trial));
    splitmix64(s.wrapping_add(kind.tag()))
}

/// A fresh generator for the given substream.
pub fn substream(base_seed: u64, trial: u64, kind: StreamKind) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(base_seed, trial, kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn substreams_are_reproducible() {
        let mut a = substream(42, 7, StreamKind::Poles);
        let mut b = substream(42, 7, StreamKind::Poles);
        for _ in 0..32 {
            assert_eq!(a.gen::<u64>(), b.gen::<u64>());
        }
    }

    #[test]
    fn distinct_coordinates_give_distinct_streams() {
        let base: u64 = substream(42, 7, StreamKind::Poles).gen();
        let others = [
            substream(43, 7, StreamKind::Poles).gen::<u64>(),
            substream(42, 8, StreamKind::Poles).gen::<u64>(),
            substream(42, 7, StreamKind::TrainInput).gen::<u64>(),
        ];
        for o in others {
            assert_ne!(base, o);
        }
    }

    #[test]
    fn mixing_is_not_commutative() {
        // Chained mixing: swapping base seed and trial index must land on a
        // different stream, unlike a plain additive combination.
        assert_ne!(
            substream_seed(3, 11, StreamKind::Target),
            substream_seed(11, 3, StreamKind::Target),
        );
    }

    #[test]
    fn seeds_spread_over_small_trial_range() {
        let mut seen = std::collections::HashSet::new();
        for trial in 0..1000u64 {
            assert!(seen.insert(substream_seed(5, trial, StreamKind::TestInput)));
        }
    }
}
