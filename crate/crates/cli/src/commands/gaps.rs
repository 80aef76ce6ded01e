//! `lorentz gaps`: gap sequences g_j and the confinement envelope f_j of a
//! tube word, with the power-law witness K.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use lorentz_core::world::{gap_profile, GapError};

use super::{guard_err, load_world_checked, validation_err, Artifacts, CsvWriter, RunResult};

#[derive(Debug, Clone, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct GapsParams {
    /// World file (must be a tube).
    #[arg(long)]
    pub world: PathBuf,
    /// Number of gap indices to compute.
    #[arg(long)]
    pub j: usize,
    /// Cells scanned per blocking-cell search before reporting an
    /// all-non-blocking tail.
    #[arg(long, default_value_t = 1_000_000)]
    pub scan_limit: u64,
    /// Output CSV of (j, g_plus, g_minus, f_plus, f_minus).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(p: &GapsParams) -> RunResult {
    let world = load_world_checked(&p.world)?;
    let profile = gap_profile(&world, p.j, p.scan_limit).map_err(|e| match e {
        GapError::NotATube => validation_err(anyhow::anyhow!("{e}")),
        GapError::UnboundedSearch { .. } => guard_err(anyhow::anyhow!("{e}")),
    })?;

    let mut csv = CsvWriter::create(&p.out, &["j", "g_plus", "g_minus", "f_plus", "f_minus"])?;
    for j in 0..=p.j {
        csv.row(&[
            &j,
            &profile.g_plus[j],
            &profile.g_minus[j],
            &profile.f_plus[j],
            &profile.f_minus[j],
        ])?;
    }
    csv.finish()?;
    println!(
        "origin_shift = {}, K = {}",
        profile.origin_shift, profile.k_witness
    );
    Ok(Artifacts::default().input(&p.world).output(&p.out))
}
