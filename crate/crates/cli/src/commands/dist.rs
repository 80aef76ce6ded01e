//! `lorentz dist`: truncated word-metric bounds between two worlds, one row
//! per truncation radius.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use lorentz_core::world::dist_truncated;

use super::{load_world_checked, validation_err, Artifacts, CsvWriter, RunResult};

#[derive(Debug, Clone, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct DistParams {
    #[arg(long)]
    pub world_a: PathBuf,
    #[arg(long)]
    pub world_b: PathBuf,
    /// Largest truncation radius; the CSV sweeps 0..=radius.
    #[arg(long)]
    pub radius: u64,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(p: &DistParams) -> RunResult {
    let a = load_world_checked(&p.world_a)?;
    let b = load_world_checked(&p.world_b)?;
    let mut csv = CsvWriter::create(&p.out, &["radius", "lower", "upper"])?;
    let mut last = None;
    for r in 0..=p.radius {
        let d = dist_truncated(&a, &b, r).map_err(|e| validation_err(anyhow::anyhow!("{e}")))?;
        csv.row(&[&r, &d.lower, &d.upper])?;
        last = Some(d);
    }
    csv.finish()?;
    if let Some(d) = last {
        println!("dist in [{}, {}] at radius {}", d.lower, d.upper, p.radius);
    }
    Ok(Artifacts::default()
        .input(&p.world_a)
        .input(&p.world_b)
        .output(&p.out))
}
