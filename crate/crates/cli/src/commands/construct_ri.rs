//! `lorentz construct-ri`: run the nested blocking-annulus construction and
//! emit the resulting gas window as a world file, plus a per-stage table.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use lorentz_core::dynamics::Guards;
use lorentz_core::ensemble::{construct_ri_window, EnsembleError, EtaOptions};
use lorentz_core::world::verify_blocking_circles;

use super::{
    guard_err, io_err, load_catalog_checked, validation_err, Artifacts, CsvWriter, RunResult,
};
use crate::formats::{load_ri_spec, save_world_file, WorldFile};
use crate::runner::ParallelEscape;

#[derive(Debug, Clone, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct ConstructRiParams {
    /// Construction spec file; alternatively give the parameters inline.
    #[arg(long, conflicts_with_all = ["catalog", "i", "schedule", "seed", "window"])]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spec: Option<PathBuf>,
    #[arg(long, requires_all = ["i", "schedule", "seed", "window"])]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub catalog: Option<PathBuf>,
    /// Blocking circles D_j exist for j >= i.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub i: Option<u64>,
    /// Strictly increasing escape-budget schedule (1/k bounds).
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub schedule: Option<Vec<u64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    /// Square window radius of the emitted world.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub window: Option<u64>,
    /// Monte Carlo samples per candidate annulus.
    #[arg(long, default_value_t = 100_000)]
    pub n_samples: usize,
    /// Collision budget per escape orbit.
    #[arg(long, default_value_t = 100_000)]
    pub max_collisions: usize,
    /// Largest annulus radius tried before giving up.
    #[arg(long, default_value_t = 64)]
    pub rho2_cap: u64,
    /// Emitted world file; the stage table lands next to it.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub stages_out: PathBuf,
}

struct Resolved {
    catalog_path: PathBuf,
    i: u64,
    schedule: Vec<u64>,
    seed: u64,
    window: u64,
    n_samples: usize,
    max_collisions: usize,
    rho2_cap: u64,
}

fn resolve(p: &ConstructRiParams) -> Result<Resolved, super::CliError> {
    if let Some(spec_path) = &p.spec {
        if !spec_path.exists() {
            return Err(io_err(anyhow::anyhow!(
                "spec file {} not found",
                spec_path.display()
            )));
        }
        let spec = load_ri_spec(spec_path).map_err(validation_err)?;
        let catalog_path =
            crate::formats::resolve(&spec.catalog, spec_path.parent()).map_err(io_err)?;
        return Ok(Resolved {
            catalog_path,
            i: spec.i,
            schedule: spec.schedule,
            seed: spec.seed,
            window: spec.window,
            n_samples: spec.n_samples,
            max_collisions: spec.max_collisions,
            rho2_cap: spec.rho2_cap,
        });
    }
    match (&p.catalog, p.i, &p.schedule, p.seed, p.window) {
        (Some(c), Some(i), Some(s), Some(seed), Some(w)) => Ok(Resolved {
            catalog_path: c.clone(),
            i,
            schedule: s.clone(),
            seed,
            window: w,
            n_samples: p.n_samples,
            max_collisions: p.max_collisions,
            rho2_cap: p.rho2_cap,
        }),
        _ => Err(validation_err(anyhow::anyhow!(
            "give either --spec or all of --catalog --i --schedule --seed --window"
        ))),
    }
}

pub fn run(p: &ConstructRiParams, workers: usize) -> RunResult {
    let r = resolve(p)?;
    let catalog = std::sync::Arc::new(load_catalog_checked(&r.catalog_path)?);
    if catalog.kind() != lorentz_core::world::WorldKind::Gas {
        return Err(validation_err(anyhow::anyhow!(
            "the construction needs a gas catalog"
        )));
    }
    let opts = EtaOptions {
        n_samples: r.n_samples,
        seed: r.seed,
        guards: Guards::default(),
        max_collisions: r.max_collisions,
        rho2_cap: r.rho2_cap,
    };
    let estimator = ParallelEscape { workers };
    let ri = construct_ri_window(
        catalog.clone(),
        r.i,
        &r.schedule,
        None,
        r.window,
        &opts,
        &estimator,
    )
    .map_err(|e| match e {
        EnsembleError::BudgetExceeded { .. } => guard_err(anyhow::anyhow!("{e}")),
        other => validation_err(anyhow::anyhow!("{other}")),
    })?;

    verify_blocking_circles(&ri.world, r.i, r.window).map_err(|v| {
        validation_err(anyhow::anyhow!(
            "constructed world violates blocking circle D_{} at ({}, {})",
            v.j,
            v.at.x,
            v.at.y
        ))
    })?;

    let mut csv = CsvWriter::create(
        &p.stages_out,
        &["stage", "k", "rho1", "rho2", "rho", "p_hat", "se", "n_samples"],
    )?;
    for (idx, stage) in ri.stages.iter().enumerate() {
        let (p_hat, se, n): (f64, f64, usize) = match &stage.escape {
            Some(e) => (e.p_hat, e.se, e.n),
            None => (f64::NAN, f64::NAN, 0),
        };
        csv.row(&[&idx, &stage.k, &stage.rho1, &stage.rho2, &stage.rho, &p_hat, &se, &n])?;
        println!(
            "stage {idx}: k = {}, rho1 = {}, rho2 = {}, rho = {}",
            stage.k, stage.rho1, stage.rho2, stage.rho
        );
    }
    csv.finish()?;

    let file = WorldFile::from_world(&ri.world, r.catalog_path.clone());
    save_world_file(&file, &p.out).map_err(io_err)?;
    println!("world written to {}", p.out.display());

    let mut artifacts = Artifacts::default()
        .input(&r.catalog_path)
        .output(&p.out)
        .output(&p.stages_out);
    if let Some(spec) = &p.spec {
        artifacts = artifacts.input(spec);
    }
    Ok(artifacts)
}
