//! Shared fixtures for the benchmarks.

use fatou_core::Ordinal;

/// Stages exercised by the construction benchmarks.
pub fn bench_stages() -> Vec<Ordinal> {
    ["1", "3", "6", "w", "w+1", "w*2", "w^2"].iter().map(|s| s.parse().expect("valid notation")).collect()
}
