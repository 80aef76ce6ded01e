//! On-disk schemas: catalog files, world files and construction specs, all
//! strict TOML (unknown keys are errors).
//!
//! Paths inside a file (a world file naming its catalog) resolve relative
//! to the file's own directory first, then to the working directory.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use lorentz_core::config::{
    build_local_config, Catalog, ConfigId, Disc, GateSpec, LocalConfiguration, Side,
};
use lorentz_core::world::{CellIndex, CellSource, ExplicitWindow, Extension, World, WorldKind};

pub const CATALOG_SCHEMA: &str = "lorentz-catalog/1";
pub const WORLD_SCHEMA: &str = "lorentz-world/1";
pub const RI_SCHEMA: &str = "lorentz-ri/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindField {
    Tube,
    Gas,
}

impl From<KindField> for WorldKind {
    fn from(k: KindField) -> WorldKind {
        match k {
            KindField::Tube => WorldKind::Tube,
            KindField::Gas => WorldKind::Gas,
        }
    }
}

impl From<WorldKind> for KindField {
    fn from(k: WorldKind) -> KindField {
        match k {
            WorldKind::Tube => KindField::Tube,
            WorldKind::Gas => KindField::Gas,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideField {
    Left,
    Right,
    Bottom,
    Top,
}

impl From<SideField> for Side {
    fn from(s: SideField) -> Side {
        match s {
            SideField::Left => Side::Left,
            SideField::Right => Side::Right,
            SideField::Bottom => Side::Bottom,
            SideField::Top => Side::Top,
        }
    }
}

impl From<Side> for SideField {
    fn from(s: Side) -> SideField {
        match s {
            Side::Left => SideField::Left,
            Side::Right => SideField::Right,
            Side::Bottom => SideField::Bottom,
            Side::Top => SideField::Top,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateRecord {
    pub side: SideField,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellRecord {
    pub id: ConfigId,
    pub blocking: bool,
    /// Disc list as (cx, cy, r) triples.
    pub discs: Vec<[f64; 3]>,
}

/// A cell catalog on disk: shared gates plus one record per cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogFile {
    pub schema: String,
    pub kind: KindField,
    pub gates: Vec<GateRecord>,
    pub cells: Vec<CellRecord>,
}

impl CatalogFile {
    pub fn from_catalog(catalog: &Catalog) -> CatalogFile {
        CatalogFile {
            schema: CATALOG_SCHEMA.into(),
            kind: catalog.kind().into(),
            gates: catalog
                .gates()
                .iter()
                .map(|g| GateRecord {
                    side: g.side.into(),
                    lo: g.lo,
                    hi: g.hi,
                })
                .collect(),
            cells: catalog
                .cells()
                .iter()
                .map(|c| CellRecord {
                    id: c.id,
                    blocking: c.blocking,
                    discs: c
                        .discs()
                        .iter()
                        .map(|d| [d.center.x, d.center.y, d.radius])
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn build(&self) -> Result<Catalog> {
        if self.schema != CATALOG_SCHEMA {
            bail!("unsupported catalog schema {:?}", self.schema);
        }
        let gates: Vec<GateSpec> = self
            .gates
            .iter()
            .map(|g| GateSpec::new(g.side.into(), g.lo, g.hi))
            .collect();
        let mut cells: Vec<LocalConfiguration> = Vec::with_capacity(self.cells.len());
        for rec in &self.cells {
            let discs: Vec<Disc> = rec.discs.iter().map(|d| Disc::new(d[0], d[1], d[2])).collect();
            let cfg = build_local_config(rec.id, discs, gates.clone(), rec.blocking)
                .map_err(|e| anyhow!("cell {}: {e}", rec.id))?;
            cells.push(cfg);
        }
        Catalog::new(self.kind.into(), cells).map_err(|e| anyhow!("catalog: {e}"))
    }
}

pub fn load_catalog(path: &Path) -> Result<Catalog> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading catalog {}", path.display()))?;
    let file: CatalogFile =
        toml::from_str(&text).with_context(|| format!("parsing catalog {}", path.display()))?;
    file.build()
        .with_context(|| format!("building catalog {}", path.display()))
}

pub fn save_catalog(catalog: &Catalog, path: &Path) -> Result<()> {
    let file = CatalogFile::from_catalog(catalog);
    // The minimum meeting angle and curvature bounds are artifact choices,
    // fixed library-wide; echoed here so a catalog is self-describing.
    let header = format!(
        "# Validated against: eps_angle = {} rad, eps_clear = {}, disc radius in [{}, {}].\n# See docs/FORMATS.md for the schema.\n",
        lorentz_core::config::EPS_ANGLE,
        lorentz_core::config::EPS_CLEAR,
        lorentz_core::config::R_MIN,
        lorentz_core::config::R_MAX,
    );
    let text = toml::to_string_pretty(&file)?;
    std::fs::write(path, header + &text)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceRecord {
    Constant {
        id: ConfigId,
    },
    Explicit {
        origin: [i64; 2],
        width: usize,
        height: usize,
        cells: Vec<ConfigId>,
        extend: ExtendRecord,
    },
    Bernoulli {
        probs: Vec<f64>,
        seed: u64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExtendRecord {
    Constant { id: ConfigId },
    Periodic,
}

/// A world on disk: the catalog it draws cells from, the word source, and
/// an optional torus wrap for finite-measure approximants.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldFile {
    pub schema: String,
    pub kind: KindField,
    pub catalog: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wrap: Option<i64>,
    pub source: SourceRecord,
}

impl WorldFile {
    pub fn build(&self, base_dir: Option<&Path>) -> Result<World> {
        if self.schema != WORLD_SCHEMA {
            bail!("unsupported world schema {:?}", self.schema);
        }
        let catalog_path = resolve(&self.catalog, base_dir)?;
        let catalog = Arc::new(load_catalog(&catalog_path)?);
        if WorldKind::from(self.kind) != catalog.kind() {
            bail!(
                "world kind {:?} does not match catalog kind {:?}",
                self.kind,
                catalog.kind()
            );
        }
        let source = match &self.source {
            SourceRecord::Constant { id } => CellSource::Constant(*id),
            SourceRecord::Explicit {
                origin,
                width,
                height,
                cells,
                extend,
            } => CellSource::Explicit(ExplicitWindow {
                origin: CellIndex::new(origin[0], origin[1]),
                width: *width,
                height: *height,
                cells: cells.clone(),
                extend: match extend {
                    ExtendRecord::Constant { id } => Extension::Constant(*id),
                    ExtendRecord::Periodic => Extension::Periodic,
                },
            }),
            SourceRecord::Bernoulli { probs, seed } => {
                // Validate through the ensemble contract (positivity, sum).
                let spec = lorentz_core::ensemble::BernoulliSpec::new(probs.clone(), *seed);
                return lorentz_core::ensemble::bernoulli_world(&spec, catalog)
                    .map_err(|e| anyhow!("bernoulli source: {e}"))
                    .and_then(|w| match self.wrap {
                        Some(p) if p >= 1 => Ok(w.with_wrap(p)),
                        Some(p) => bail!("wrap period {p} must be at least 1"),
                        None => Ok(w),
                    });
            }
        };
        let world = World::new(catalog, source, None).map_err(|e| anyhow!("world: {e}"))?;
        match self.wrap {
            Some(p) if p >= 1 => Ok(world.with_wrap(p)),
            Some(p) => bail!("wrap period {p} must be at least 1"),
            None => Ok(world),
        }
    }

    /// Snapshot of an in-memory world; `catalog` is recorded as given.
    pub fn from_world(world: &World, catalog: PathBuf) -> WorldFile {
        let source = match world.source() {
            CellSource::Constant(id) => SourceRecord::Constant { id: *id },
            CellSource::Explicit(w) => SourceRecord::Explicit {
                origin: [w.origin.x, w.origin.y],
                width: w.width,
                height: w.height,
                cells: w.cells.clone(),
                extend: match w.extend {
                    Extension::Constant(id) => ExtendRecord::Constant { id },
                    Extension::Periodic => ExtendRecord::Periodic,
                },
            },
            CellSource::Bernoulli { .. } => unreachable!("bernoulli worlds are emitted via specs"),
        };
        WorldFile {
            schema: WORLD_SCHEMA.into(),
            kind: world.kind().into(),
            catalog,
            wrap: world.wrap(),
            source,
        }
    }
}

pub fn load_world(path: &Path) -> Result<World> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading world {}", path.display()))?;
    let file: WorldFile =
        toml::from_str(&text).with_context(|| format!("parsing world {}", path.display()))?;
    file.build(path.parent())
        .with_context(|| format!("building world {}", path.display()))
}

pub fn save_world_file(file: &WorldFile, path: &Path) -> Result<()> {
    let text = toml::to_string_pretty(file)?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Construction spec for the nested recurrent-gas windows.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiSpecFile {
    pub schema: String,
    pub catalog: PathBuf,
    pub i: u64,
    pub schedule: Vec<u64>,
    pub seed: u64,
    pub window: u64,
    #[serde(default = "default_n_samples")]
    pub n_samples: usize,
    #[serde(default = "default_max_collisions")]
    pub max_collisions: usize,
    #[serde(default = "default_rho2_cap")]
    pub rho2_cap: u64,
}

fn default_n_samples() -> usize {
    100_000
}

fn default_max_collisions() -> usize {
    100_000
}

fn default_rho2_cap() -> u64 {
    64
}

pub fn load_ri_spec(path: &Path) -> Result<RiSpecFile> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading spec {}", path.display()))?;
    let file: RiSpecFile =
        toml::from_str(&text).with_context(|| format!("parsing spec {}", path.display()))?;
    if file.schema != RI_SCHEMA {
        bail!("unsupported spec schema {:?}", file.schema);
    }
    Ok(file)
}

/// Resolves a possibly relative path against a base directory, falling back
/// to the working directory.
pub fn resolve(path: &Path, base_dir: Option<&Path>) -> Result<PathBuf> {
    if path.is_absolute() || path.exists() {
        return Ok(path.to_path_buf());
    }
    if let Some(base) = base_dir {
        let joined = base.join(path);
        if joined.exists() {
            return Ok(joined);
        }
    }
    Ok(path.to_path_buf())
}
