//! Seed derivation and counter-based uniform streams.
//!
//! Every random quantity in the crate is derived from a single 64-bit seed.
//! Sub-seeds are produced with the SplitMix64 finalizer so that a run is
//! portable across machines and independent of thread scheduling.
//!
//! Per-node randomness (failure draws, thresholds) comes from a
//! [`NodeStream`]: the `i`-th uniform is a pure function of `(seed, i)`, so
//! changing the rule applied to one node never perturbs another node's draw.

/// SplitMix64 increment (odd approximation of 2^64 / φ).
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `base` and an ordered list of integer labels.
///
/// `derive_seed(s, &[point, trial])` is the per-trial seed used by the sweep
/// harness.
pub fn derive_seed(base: u64, labels: &[u64]) -> u64 {
    let mut h = mix64(base.wrapping_add(GOLDEN_GAMMA));
    for &label in labels {
        h = mix64(h ^ mix64(label.wrapping_add(GOLDEN_GAMMA)).wrapping_add(GOLDEN_GAMMA));
    }
    h
}

/// Domain tags keep streams for different purposes apart under one seed.
pub(crate) mod tag {
    pub const POINTS: u64 = 0x706f_696e_7473; // "points"
    pub const FAILURES: u64 = 0x6661_696c; // "fail"
    pub const THRESHOLDS: u64 = 0x70_7369; // "psi"
    pub const SEEDING: u64 = 0x7365_6564; // "seed"
    pub const MARKS: u64 = 0x6d61_726b; // "mark"
}

/// Maps the top 53 bits of `bits` to `[0, 1)`.
#[inline]
pub fn unit_closed_open(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Maps the top 53 bits of `bits` to `(0, 1]`.
#[inline]
pub fn unit_open_closed(bits: u64) -> f64 {
    ((bits >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A counter-based stream of 64-bit words indexed by node id.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeStream {
    key: u64,
}

impl NodeStream {
    pub fn new(seed: u64, domain: u64) -> Self {
        Self {
            key: derive_seed(seed, &[domain]),
        }
    }

    #[inline]
    pub fn word(&self, index: usize) -> u64 {
        mix64(
            self.key
                .wrapping_add((index as u64).wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)),
        )
    }

    /// Uniform on `[0, 1)` for node `index`.
    #[inline]
    pub fn uniform(&self, index: usize) -> f64 {
        unit_closed_open(self.word(index))
    }

    /// Uniform on `(0, 1]` for node `index`.
    #[inline]
    pub fn uniform_positive(&self, index: usize) -> f64 {
        unit_open_closed(self.word(index))
    }
}
