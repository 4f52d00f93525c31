//! Shared fixtures for the benchmarks.

use gfr_core::{make_example, sample_dataset, DesignMatrix, Example, ResponseVector, SimulationSpec};

/// One Example 1 draw at `R^2 = 0.9`.
pub fn ex1_instance(n: usize, p: usize, seed: u64) -> (DesignMatrix, ResponseVector) {
    let spec = SimulationSpec {
        example: Example::Ex1,
        n,
        p,
        r2: 0.9,
        seed,
        replications: 1,
    };
    let model = make_example(&spec).expect("valid example");
    sample_dataset(&model, &spec, 0).expect("sampling succeeds")
}
