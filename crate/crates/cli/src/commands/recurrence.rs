//! `lorentz recurrence`: return-fraction curve r(t) over a sample of orbits
//! started in one cell, with the exact gap-profile confinement check for
//! tubes.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use lorentz_core::analysis::RecurrenceRunner;
use lorentz_core::world::{gap_profile, CellIndex, GapError, WorldKind};

use super::{guard_err, load_world_checked, validation_err, Artifacts, CsvWriter, RunResult};
use crate::runner::map_indexed;

#[derive(Debug, Clone, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct RecurrenceParams {
    #[arg(long)]
    pub world: PathBuf,
    /// Start cell (tubes use the shift-normalized origin when confinement
    /// checking is on).
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub cell_x: i64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub cell_y: i64,
    #[arg(long)]
    pub orbits: usize,
    #[arg(long)]
    pub t_max: usize,
    #[arg(long)]
    pub seed: u64,
    /// Check every collision against the exact [f_t^-, f_t^+] envelope
    /// (tube worlds only).
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    pub confinement: bool,
    #[arg(long, default_value_t = 1_000_000)]
    pub scan_limit: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub guards: super::GuardArgs,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(p: &RecurrenceParams, workers: usize) -> RunResult {
    let world = load_world_checked(&p.world)?;
    let profile = if p.confinement {
        if world.kind() != WorldKind::Tube {
            return Err(validation_err(anyhow::anyhow!(
                "confinement checking needs a tube world"
            )));
        }
        Some(
            gap_profile(&world, p.t_max, p.scan_limit).map_err(|e| match e {
                GapError::UnboundedSearch { .. } => guard_err(anyhow::anyhow!("{e}")),
                other => validation_err(anyhow::anyhow!("{other}")),
            })?,
        )
    } else {
        None
    };

    let runner = RecurrenceRunner::new(
        &world,
        CellIndex::new(p.cell_x, p.cell_y),
        profile.as_ref(),
        p.t_max,
        p.seed,
        p.guards.guards(),
    )
    .map_err(|e| validation_err(anyhow::anyhow!("{e}")))?;

    let outcomes = map_indexed(workers, p.orbits as u64, |i| runner.run_sample(i));
    let stats = runner.collect(outcomes);

    let mut csv = CsvWriter::create(&p.out, &["t", "returned", "fraction"])?;
    for t in 0..=stats.t_max {
        csv.row(&[&t, &stats.returned_by[t], &stats.return_fraction(t)])?;
    }
    csv.finish()?;
    println!(
        "start cell ({}, {}): r({}) = {}, confinement violations = {}, early terminations = {}",
        stats.start_cell.x,
        stats.start_cell.y,
        stats.t_max,
        stats.return_fraction(stats.t_max),
        stats.confinement_violations,
        stats.terminated_early
    );
    Ok(Artifacts::default().input(&p.world).output(&p.out))
}
