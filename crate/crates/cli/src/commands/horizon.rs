//! `lorentz horizon`: directed-line sweep for the longest scatterer-free
//! chord in a finite window, and for full untouched lines.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use lorentz_core::analysis::horizon_scan;

use super::{load_world_checked, Artifacts, CsvWriter, RunResult};

#[derive(Debug, Clone, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct HorizonParams {
    #[arg(long)]
    pub world: PathBuf,
    /// Window radius in cells.
    #[arg(long)]
    pub window: u64,
    #[arg(long, default_value_t = 512)]
    pub n_angles: usize,
    #[arg(long, default_value_t = 512)]
    pub n_offsets: usize,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(p: &HorizonParams) -> RunResult {
    let world = load_world_checked(&p.world)?;
    let scan = horizon_scan(&world, p.window, p.n_angles, p.n_offsets);

    let mut csv = CsvWriter::create(
        &p.out,
        &["record", "origin_x", "origin_y", "dir_x", "dir_y", "t0", "t1", "length"],
    )?;
    if let Some(w) = &scan.witness {
        csv.row(&[
            &"max_chord",
            &w.origin.x,
            &w.origin.y,
            &w.dir.x(),
            &w.dir.y(),
            &w.t0,
            &w.t1,
            &w.length(),
        ])?;
    }
    if let Some(w) = &scan.full_line {
        csv.row(&[
            &"full_line",
            &w.origin.x,
            &w.origin.y,
            &w.dir.x(),
            &w.dir.y(),
            &w.t0,
            &w.t1,
            &w.length(),
        ])?;
    }
    csv.finish()?;
    match &scan.full_line {
        Some(_) => println!(
            "max free chord {} and a full line exceeds the window",
            scan.max_free_chord
        ),
        None => println!("max free chord {}", scan.max_free_chord),
    }
    Ok(Artifacts::default().input(&p.world).output(&p.out))
}
