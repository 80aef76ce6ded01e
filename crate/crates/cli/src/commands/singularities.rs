//! `lorentz singularities`: count distinct singularity sources approached
//! by orbits from the origin cell, against the exact gap-profile bound.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use lorentz_core::analysis::singularity_growth;
use lorentz_core::world::{gap_profile, GapError};

use super::{guard_err, load_world_checked, validation_err, Artifacts, CsvWriter, RunResult};

#[derive(Debug, Clone, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct SingularitiesParams {
    /// World file (must be a tube).
    #[arg(long)]
    pub world: PathBuf,
    /// Collision horizons at which to report c(t).
    #[arg(long, value_delimiter = ',', required = true)]
    pub t_values: Vec<usize>,
    /// Approach distance identifying a source.
    #[arg(long, default_value_t = 1e-4)]
    pub delta: f64,
    #[arg(long)]
    pub orbits: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub scan_limit: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub guards: super::GuardArgs,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(p: &SingularitiesParams) -> RunResult {
    let world = load_world_checked(&p.world)?;
    let t_max = p.t_values.iter().copied().max().unwrap_or(0);
    let profile = gap_profile(&world, t_max + 1, p.scan_limit).map_err(|e| match e {
        GapError::UnboundedSearch { .. } => guard_err(anyhow::anyhow!("{e}")),
        other => validation_err(anyhow::anyhow!("{other}")),
    })?;

    let growth = singularity_growth(
        &world,
        &profile,
        &p.t_values,
        p.delta,
        p.orbits,
        p.seed,
        p.guards.guards(),
    )
    .map_err(|e| validation_err(anyhow::anyhow!("{e}")))?;

    let mut csv = CsvWriter::create(&p.out, &["t", "count", "bound"])?;
    for ((t, c), b) in growth
        .t_values
        .iter()
        .zip(&growth.counts)
        .zip(&growth.bounds)
    {
        csv.row(&[t, c, b])?;
    }
    csv.finish()?;
    println!("log-log slope = {}", growth.slope);
    Ok(Artifacts::default().input(&p.world).output(&p.out))
}
