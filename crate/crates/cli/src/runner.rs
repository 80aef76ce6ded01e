//! Deterministic parallel driving of the core's per-index estimators.
//!
//! Every estimator sample is a pure function of `(seed, index)`, so workers
//! can split the index range arbitrarily; results are collected by index
//! and folded in index order, which makes every output bit independent of
//! the worker count.

use lorentz_core::analysis::{EmptyBoundary, EscapeEstimate, EscapeOutcome, EscapeRunner};
use lorentz_core::dynamics::Guards;
use lorentz_core::ensemble::EscapeEstimator;
use lorentz_core::world::{CellIndex, World};
use rayon::prelude::*;

pub const WORKERS_ENV: &str = "LORENTZ_WORKERS";

/// Resolves the worker count: explicit flag, else environment, else 1.
pub fn resolve_workers(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(1)
    .max(1)
}

/// Maps `f` over `0..n`, preserving index order in the output.
pub fn map_indexed<T: Send>(workers: usize, n: u64, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    if workers <= 1 {
        (0..n).map(f).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("worker pool");
        pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}

/// Index-parallel escape estimator for the eta-block construction; folds
/// outcomes in index order, so it matches the sequential estimator bit for
/// bit.
pub struct ParallelEscape {
    pub workers: usize,
}

impl EscapeEstimator for ParallelEscape {
    fn estimate(
        &self,
        world: &World,
        center: CellIndex,
        rho1: u64,
        rho2: u64,
        n: usize,
        seed: u64,
        guards: Guards,
        max_collisions: usize,
    ) -> Result<EscapeEstimate, EmptyBoundary> {
        let runner = EscapeRunner::new(world, center, rho1, rho2, seed, guards, max_collisions)?;
        let outcomes: Vec<EscapeOutcome> =
            map_indexed(self.workers, n as u64, |i| runner.run_sample(i));
        Ok(EscapeEstimate::from_outcomes(outcomes, rho1, rho2))
    }
}
