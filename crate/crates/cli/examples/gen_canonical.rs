//! Regenerates the shipped canonical catalog and world files under
//! `catalogs/` and `worlds/` at the workspace root:
//!
//! ```text
//! cargo run -p lorentz-cli --example gen_canonical
//! ```
//!
//! A test asserts the shipped files stay equal to the in-code canonical
//! catalogs, so regeneration is only needed when those change.

use std::path::Path;

use lorentz_cli::formats::{
    save_catalog, save_world_file, ExtendRecord, KindField, SourceRecord, WorldFile, WORLD_SCHEMA,
};
use lorentz_core::config::{canonical_gas_catalog, canonical_tube_catalog};

fn world(kind: KindField, catalog: &str, source: SourceRecord) -> WorldFile {
    WorldFile {
        schema: WORLD_SCHEMA.into(),
        kind,
        catalog: catalog.into(),
        wrap: None,
        source,
    }
}

fn main() -> anyhow::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let catalogs = root.join("catalogs");
    let worlds = root.join("worlds");
    std::fs::create_dir_all(&catalogs)?;
    std::fs::create_dir_all(&worlds)?;

    save_catalog(&canonical_tube_catalog(), &catalogs.join("tube.toml"))?;
    save_catalog(&canonical_gas_catalog(), &catalogs.join("gas.toml"))?;

    save_world_file(
        &world(
            KindField::Tube,
            "../catalogs/tube.toml",
            SourceRecord::Constant { id: 1 },
        ),
        &worlds.join("all_blocking_tube.toml"),
    )?;
    save_world_file(
        &world(
            KindField::Tube,
            "../catalogs/tube.toml",
            SourceRecord::Bernoulli {
                probs: vec![0.5, 0.5],
                seed: 7,
            },
        ),
        &worlds.join("bernoulli_tube.toml"),
    )?;
    // A straight corridor: ten non-blocking cells in an otherwise blocking
    // tube.
    save_world_file(
        &world(
            KindField::Tube,
            "../catalogs/tube.toml",
            SourceRecord::Explicit {
                origin: [0, 0],
                width: 10,
                height: 1,
                cells: vec![2; 10],
                extend: ExtendRecord::Constant { id: 1 },
            },
        ),
        &worlds.join("corridor_tube.toml"),
    )?;
    save_world_file(
        &world(
            KindField::Gas,
            "../catalogs/gas.toml",
            SourceRecord::Constant { id: 1 },
        ),
        &worlds.join("all_blocking_gas.toml"),
    )?;
    save_world_file(
        &world(
            KindField::Gas,
            "../catalogs/gas.toml",
            SourceRecord::Bernoulli {
                probs: vec![0.5, 0.5],
                seed: 7,
            },
        ),
        &worlds.join("bernoulli_gas.toml"),
    )?;
    println!("canonical files written under {}", root.display());
    Ok(())
}
