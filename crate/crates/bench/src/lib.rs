//! Fixtures shared by the criterion benchmarks.

use aero_core::generator::{BatchKind, Generator, GeneratorConfig};
use aero_core::ProblemInstance;

/// A generated instance of the given regime.
pub fn instance(kind: BatchKind, seed: u64) -> ProblemInstance {
    Generator::new(GeneratorConfig::preset(kind).with_seed(seed))
        .and_then(|g| g.generate(0))
        .expect("preset generation succeeds")
}
