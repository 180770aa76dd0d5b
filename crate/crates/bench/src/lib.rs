//! Shared inputs for the benchmarks under `benches/`.

use rwalk_core::{GenChi2Params, GridSpec, WalkConfig};

/// Walks used across benchmarks: the two-step case, a small recursion
/// case, and a many-step case.
pub fn walks() -> Vec<(&'static str, WalkConfig)> {
    vec![
        ("n2_a0.5", WalkConfig::new(2, 0.5).unwrap()),
        ("n3_a0.85", WalkConfig::new(3, 0.85).unwrap()),
        ("n30_a0.5", WalkConfig::new(30, 0.5).unwrap()),
    ]
}

/// Grid small enough to propagate inside a benchmark loop.
pub fn small_grid() -> GridSpec {
    GridSpec::new(80, 80, 16).unwrap()
}

pub fn mixed_genchi2() -> GenChi2Params {
    GenChi2Params::new(vec![2.0, -1.0, 0.5], vec![2, 3, 1], vec![0.5, 2.0, 0.0], 0.7, 1.0).unwrap()
}
