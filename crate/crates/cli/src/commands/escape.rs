//! `lorentz escape`: Monte Carlo escape probabilities from an inner circle
//! of cells to an outer one, optionally swept over the outer radius.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use lorentz_core::analysis::{EscapeEstimate, EscapeRunner};
use lorentz_core::world::CellIndex;

use super::{guard_err, load_world_checked, validation_err, Artifacts, CsvWriter, RunResult};
use crate::runner::map_indexed;

#[derive(Debug, Clone, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct EscapeParams {
    #[arg(long)]
    pub world: PathBuf,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub center_x: i64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub center_y: i64,
    /// Inner radius: samples start on this circle of cells.
    #[arg(long)]
    pub rho1: u64,
    /// Outer radius (first value when sweeping).
    #[arg(long)]
    pub rho2: u64,
    /// Sweep the outer radius up to this value inclusive.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rho2_to: Option<u64>,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    /// Collision budget per orbit; exhaustion counts as escape.
    #[arg(long, default_value_t = 100_000)]
    pub max_collisions: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub guards: super::GuardArgs,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(p: &EscapeParams, workers: usize) -> RunResult {
    let world = load_world_checked(&p.world)?;
    let center = CellIndex::new(p.center_x, p.center_y);
    let hi = p.rho2_to.unwrap_or(p.rho2);
    if hi < p.rho2 {
        return Err(validation_err(anyhow::anyhow!(
            "--rho2-to must be at least --rho2"
        )));
    }

    let mut csv = CsvWriter::create(
        &p.out,
        &["rho2", "p_hat", "se", "n", "escaped", "terminated"],
    )?;
    let mut all_starved = true;
    for rho2 in p.rho2..=hi {
        let runner = EscapeRunner::new(
            &world,
            center,
            p.rho1,
            rho2,
            p.seed,
            p.guards.guards(),
            p.max_collisions,
        )
        .map_err(|e| validation_err(anyhow::anyhow!("{e}")))?;
        let outcomes = map_indexed(workers, p.n as u64, |i| runner.run_sample(i));
        let est = EscapeEstimate::from_outcomes(outcomes, p.rho1, rho2);
        all_starved &= est.terminated as usize == est.n && est.n > 0;
        csv.row(&[&rho2, &est.p_hat, &est.se, &est.n, &est.escaped, &est.terminated])?;
        println!(
            "rho2 = {rho2}: p_hat = {} (se {}), terminated = {}",
            est.p_hat, est.se, est.terminated
        );
    }
    csv.finish()?;
    if all_starved {
        return Err(guard_err(anyhow::anyhow!(
            "every sample hit the guards; no escape decision was reached"
        )));
    }
    Ok(Artifacts::default().input(&p.world).output(&p.out))
}
