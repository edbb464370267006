//! Shared fixtures for the pipeline benchmarks.

use fst_core::synth::{rng_from_seed, structured_pair};
use fst_core::tensor::FeatureMap;

/// Deterministic content/style pair at the requested size.
pub fn bench_pair(channels: usize, height: usize, width: usize) -> (FeatureMap, FeatureMap) {
    let mut rng = rng_from_seed(0xBE7C);
    structured_pair(channels, height, width, &mut rng)
}
