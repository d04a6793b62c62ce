//! Shared fixtures for the benchmarks.

use roughvol::fbm;
use roughvol::model::euler_paths;
use roughvol::{GridSpec, ModelBatch, ModelParams, Scheme, SeedSpec};

/// A simulated SPX-like batch on `[0, 1]`.
pub fn spx_batch(paths: usize, steps: usize) -> ModelBatch {
    let params = ModelParams::spx();
    let grid = GridSpec::unit(steps).expect("valid grid");
    let batch = fbm::simulate(Scheme::Hybrid, &grid, params.hurst, paths, SeedSpec::new(1, 0)).expect("simulation");
    euler_paths(&batch, &params).expect("finite paths")
}
