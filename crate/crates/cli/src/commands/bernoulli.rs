//! `lorentz bernoulli`: validate a product-measure spec against a catalog
//! and emit the seeded world file.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use lorentz_core::ensemble::{bernoulli_world, BernoulliSpec};

use super::{io_err, load_catalog_checked, validation_err, Artifacts, RunResult};
use crate::formats::{save_world_file, KindField, SourceRecord, WorldFile};

#[derive(Debug, Clone, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct BernoulliParams {
    /// Catalog file the world draws cells from.
    #[arg(long)]
    pub catalog: PathBuf,
    /// Probability of each configuration id, in catalog order.
    #[arg(long, value_delimiter = ',', required = true)]
    pub probs: Vec<f64>,
    #[arg(long)]
    pub seed: u64,
    /// Optional torus period for finite-measure approximants.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wrap: Option<i64>,
    /// Emitted world file.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(p: &BernoulliParams) -> RunResult {
    let catalog = load_catalog_checked(&p.catalog)?;
    let kind = catalog.kind();
    // Validate the spec before emitting anything.
    bernoulli_world(
        &BernoulliSpec::new(p.probs.clone(), p.seed),
        std::sync::Arc::new(catalog),
    )
    .map_err(|e| validation_err(anyhow::anyhow!("{e}")))?;

    let file = WorldFile {
        schema: crate::formats::WORLD_SCHEMA.into(),
        kind: KindField::from(kind),
        catalog: p.catalog.clone(),
        wrap: p.wrap,
        source: SourceRecord::Bernoulli {
            probs: p.probs.clone(),
            seed: p.seed,
        },
    };
    save_world_file(&file, &p.out).map_err(io_err)?;
    println!("world written to {}", p.out.display());
    Ok(Artifacts::default().input(&p.catalog).output(&p.out))
}
