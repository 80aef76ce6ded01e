//! `lorentz validate`: run the full hypothesis suite on a catalog file.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use lorentz_core::config::{validate_catalog, BlockingVerdict, ShadowVerdict};

use super::{load_catalog_checked, validation_err, Artifacts, CsvWriter, RunResult};

#[derive(Debug, Clone, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct ValidateParams {
    /// Catalog file to check.
    #[arg(long)]
    pub catalog: PathBuf,
    /// Entering-chord sweep density (angles) per gate.
    #[arg(long, default_value_t = 256)]
    pub n_angles: usize,
    /// Entering-chord sweep density (offsets) per gate.
    #[arg(long, default_value_t = 256)]
    pub n_offsets: usize,
    /// Wall sample count for the shadowing check.
    #[arg(long, default_value_t = 256)]
    pub n_shadow: usize,
    /// Per-cell report CSV.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(p: &ValidateParams) -> RunResult {
    let catalog = load_catalog_checked(&p.catalog)?;
    let reports = validate_catalog(&catalog, p.n_angles, p.n_offsets, p.n_shadow);

    let mut csv = CsvWriter::create(
        &p.out,
        &["id", "claimed_blocking", "verdict", "margin", "shadowed", "shadow_margin", "ok"],
    )?;
    let mut all_ok = true;
    for r in &reports {
        let (verdict, margin) = match &r.blocking {
            BlockingVerdict::Blocking { margin } => ("blocking", *margin),
            BlockingVerdict::NonBlocking { clearance, .. } => ("non_blocking", *clearance),
            BlockingVerdict::Inconclusive { min_clearance } => ("inconclusive", *min_clearance),
        };
        let (shadowed, shadow_margin) = match &r.shadowing {
            ShadowVerdict::Shadowed { min_margin, .. } => (true, *min_margin),
            ShadowVerdict::NotShadowed { .. } => (false, 0.0),
        };
        let ok = r.ok();
        all_ok &= ok;
        csv.row(&[
            &r.id,
            &r.claimed_blocking,
            &verdict,
            &margin,
            &shadowed,
            &shadow_margin,
            &ok,
        ])?;
        println!(
            "cell {}: claimed {} -> {} (margin {margin:.6}), shadowed: {shadowed}",
            r.id,
            if r.claimed_blocking { "blocking" } else { "non-blocking" },
            verdict,
        );
    }
    csv.finish()?;

    if !all_ok {
        return Err(validation_err(anyhow::anyhow!(
            "catalog {} failed validation; see {}",
            p.catalog.display(),
            p.out.display()
        )));
    }
    Ok(Artifacts::default().input(&p.catalog).output(&p.out))
}
