//! Subcommand implementations. Each parameter struct doubles as the clap
//! argument set and the serialized form stored in run manifests, so a
//! replay dispatches on exactly what the original run resolved.

use std::fmt::Display;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub mod bernoulli;
pub mod construct_ri;
pub mod dist;
pub mod escape;
pub mod gaps;
pub mod horizon;
pub mod lyapunov;
pub mod orbit;
pub mod recurrence;
pub mod singularities;
pub mod validate;

/// Failure classes mapped to distinct exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or inconsistent inputs: bad files, failed catalog checks,
    /// degenerate specifications. Exit 3.
    Validation(anyhow::Error),
    /// Guards exhausted before the requested product existed: unbounded
    /// blocking-cell searches, annulus budgets, starved estimators. Exit 4.
    Guard(anyhow::Error),
    /// Filesystem trouble. Exit 5.
    Io(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 3,
            CliError::Guard(_) => 4,
            CliError::Io(_) => 5,
        }
    }

    pub fn message(&self) -> &anyhow::Error {
        match self {
            CliError::Validation(e) | CliError::Guard(e) | CliError::Io(e) => e,
        }
    }
}

pub type RunResult = std::result::Result<Artifacts, CliError>;

/// What a run touched and produced, for the manifest.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
}

impl Artifacts {
    pub fn input(mut self, p: &Path) -> Self {
        self.inputs.push(p.to_path_buf());
        self
    }

    pub fn output(mut self, p: &Path) -> Self {
        self.outputs.push(p.to_path_buf());
        self
    }
}

/// Every runnable subcommand with its full parameter set.
#[derive(Debug, Clone, Serialize, Deserialize, clap::Subcommand)]
#[serde(tag = "subcommand", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Command {
    /// Check a catalog: static hypotheses, blocking verdicts, shadowing.
    Validate(validate::ValidateParams),
    /// Gap sequences and confinement envelope of a tube word.
    Gaps(gaps::GapsParams),
    /// Truncated word-metric bounds between two worlds.
    Dist(dist::DistParams),
    /// Emit a seeded i.i.d. world file.
    Bernoulli(bernoulli::BernoulliParams),
    /// Build a nested recurrent-gas window and emit it as a world file.
    ConstructRi(construct_ri::ConstructRiParams),
    /// Iterate one orbit and log every collision.
    Orbit(orbit::OrbitParams),
    /// Return-time statistics with the exact confinement check.
    Recurrence(recurrence::RecurrenceParams),
    /// Monte Carlo escape probabilities through a cell annulus.
    Escape(escape::EscapeParams),
    /// Lyapunov surrogate from the tangent cocycle.
    Lyapunov(lyapunov::LyapunovParams),
    /// Sweep for the longest free chord in a window.
    Horizon(horizon::HorizonParams),
    /// Singularity-approach counting against the gap-profile bound.
    Singularities(singularities::SingularitiesParams),
}

impl Command {
    pub fn run(&self, workers: usize) -> RunResult {
        match self {
            Command::Validate(p) => validate::run(p),
            Command::Gaps(p) => gaps::run(p),
            Command::Dist(p) => dist::run(p),
            Command::Bernoulli(p) => bernoulli::run(p),
            Command::ConstructRi(p) => construct_ri::run(p, workers),
            Command::Orbit(p) => orbit::run(p),
            Command::Recurrence(p) => recurrence::run(p, workers),
            Command::Escape(p) => escape::run(p, workers),
            Command::Lyapunov(p) => lyapunov::run(p, workers),
            Command::Horizon(p) => horizon::run(p),
            Command::Singularities(p) => singularities::run(p),
        }
    }

    /// The primary output path, used to derive the default manifest path.
    pub fn out_path(&self) -> &Path {
        match self {
            Command::Validate(p) => &p.out,
            Command::Gaps(p) => &p.out,
            Command::Dist(p) => &p.out,
            Command::Bernoulli(p) => &p.out,
            Command::ConstructRi(p) => &p.out,
            Command::Orbit(p) => &p.out,
            Command::Recurrence(p) => &p.out,
            Command::Escape(p) => &p.out,
            Command::Lyapunov(p) => &p.out,
            Command::Horizon(p) => &p.out,
            Command::Singularities(p) => &p.out,
        }
    }
}

/// Plain comma-separated writer; floats print in Rust's shortest
/// round-trip form, so equal values always produce equal bytes.
pub struct CsvWriter {
    w: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> std::result::Result<CsvWriter, CliError> {
        let file = File::create(path)
            .map_err(|e| CliError::Io(anyhow::anyhow!("creating {}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "{}", header.join(","))
            .map_err(|e| CliError::Io(anyhow::anyhow!("writing {}: {e}", path.display())))?;
        Ok(CsvWriter { w })
    }

    pub fn row(&mut self, fields: &[&dyn Display]) -> std::result::Result<(), CliError> {
        let mut line = String::new();
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&f.to_string());
        }
        writeln!(self.w, "{line}").map_err(|e| CliError::Io(anyhow::anyhow!("writing row: {e}")))
    }

    pub fn finish(mut self) -> std::result::Result<(), CliError> {
        self.w
            .flush()
            .map_err(|e| CliError::Io(anyhow::anyhow!("flushing: {e}")))
    }
}

pub fn io_err(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Io(e.into())
}

pub fn validation_err(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Validation(e.into())
}

pub fn guard_err(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Guard(e.into())
}

/// Loads a world file, classifying missing files as IO errors and schema
/// or semantic problems as validation errors.
pub fn load_world_checked(path: &Path) -> std::result::Result<lorentz_core::World, CliError> {
    if !path.exists() {
        return Err(CliError::Io(anyhow::anyhow!(
            "world file {} not found",
            path.display()
        )));
    }
    crate::formats::load_world(path).map_err(CliError::Validation)
}

pub fn load_catalog_checked(
    path: &Path,
) -> std::result::Result<lorentz_core::Catalog, CliError> {
    if !path.exists() {
        return Err(CliError::Io(anyhow::anyhow!(
            "catalog file {} not found",
            path.display()
        )));
    }
    crate::formats::load_catalog(path).map_err(CliError::Validation)
}

/// Shared guard flags for orbit-driving commands.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct GuardArgs {
    /// Cells a single free flight may traverse before it is reported.
    #[arg(long, default_value_t = 10_000)]
    pub max_cells: u64,
    /// Length a single free flight may reach before it is reported.
    #[arg(long, default_value_t = 10_000.0)]
    pub max_length: f64,
}

impl GuardArgs {
    pub fn guards(&self) -> lorentz_core::dynamics::Guards {
        lorentz_core::dynamics::Guards {
            max_cells: self.max_cells,
            max_length: self.max_length,
        }
    }
}
