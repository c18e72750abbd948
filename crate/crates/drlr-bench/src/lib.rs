//! Shared fixtures for the criterion benchmarks.

use drlr::{generate, BetaTrue, Dataset, SyntheticSpec};

pub fn fixture(n: usize, count: usize, seed: u64) -> Dataset {
    let spec = SyntheticSpec::new(n, BetaTrue::UniformSphere, seed).expect("valid spec");
    generate(&spec, count).expect("generation succeeds")
}
