//! `lorentz lyapunov`: mean tangent-cocycle expansion rate per collision,
//! with a 95% confidence interval over orbits.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use lorentz_core::analysis::{LyapunovError, LyapunovRunner, MapDirection};
use lorentz_core::world::CellIndex;

use super::{guard_err, load_world_checked, validation_err, Artifacts, CsvWriter, RunResult};
use crate::runner::map_indexed;

#[derive(Debug, Clone, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct LyapunovParams {
    #[arg(long)]
    pub world: PathBuf,
    /// Orbits start from the invariant measure on this cell.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub cell_x: i64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub cell_y: i64,
    #[arg(long)]
    pub orbits: usize,
    #[arg(long)]
    pub steps: usize,
    #[arg(long)]
    pub seed: u64,
    /// Estimate the reversed map (time-reversal conjugate) instead.
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    pub reversed: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub guards: super::GuardArgs,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(p: &LyapunovParams, workers: usize) -> RunResult {
    let world = load_world_checked(&p.world)?;
    let direction = if p.reversed {
        MapDirection::Reversed
    } else {
        MapDirection::Forward
    };
    let runner = LyapunovRunner::new(
        &world,
        &[CellIndex::new(p.cell_x, p.cell_y)],
        p.steps,
        p.seed,
        p.guards.guards(),
        direction,
    )
    .map_err(|e| validation_err(anyhow::anyhow!("{e}")))?;

    let samples = map_indexed(workers, p.orbits as u64, |i| runner.run_sample(i));
    let est = runner.collect(samples, p.orbits).map_err(|e| match e {
        LyapunovError::InsufficientOrbits { .. } => guard_err(anyhow::anyhow!("{e}")),
        other => validation_err(anyhow::anyhow!("{other}")),
    })?;

    let mut csv = CsvWriter::create(&p.out, &["orbit", "rate"])?;
    for (i, r) in est.per_orbit.iter().enumerate() {
        csv.row(&[&i, r])?;
    }
    csv.finish()?;
    println!(
        "lambda_hat = {} (95% CI [{}, {}]), {} orbits x {} steps, resampled {}",
        est.lambda_hat,
        est.ci_low,
        est.ci_high,
        est.per_orbit.len(),
        est.n_steps,
        est.resampled
    );
    Ok(Artifacts::default().input(&p.world).output(&p.out))
}
