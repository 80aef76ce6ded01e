//! Billiard dynamics on aperiodic Lorentz tubes and gases.
//!
//! The crate builds unit-square scatterer cells from discs, chains them into
//! infinite tubes (indexed by `Z`) or planar gases (indexed by `Z^2`) under a
//! lazily evaluated, deterministic cell assignment, and iterates the exact
//! collision map together with its tangent cocycle. On top of the map sit the
//! estimators used to probe recurrence, hyperbolicity, horizon structure,
//! escape probabilities and singularity growth.
//!
//! Everything here is pure computation: no IO, no global state, no
//! platform-dependent behavior. All randomness flows from explicit seeds
//! through counter-based streams, so any estimate is reproducible and
//! independent of evaluation order. File formats and the command-line
//! frontend live in the companion `lorentz-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod angles;
pub mod config;
pub mod dynamics;
pub mod ensemble;
pub mod geometry;
pub mod rng;
pub mod stats;
pub mod world;

pub use config::{Catalog, ConfigError, GateSpec, LocalConfiguration, Side};
pub use dynamics::{CollisionEvent, LineElement, StepError};
pub use geometry::{ArcPiece, Point, UnitVector, Vec2};
pub use world::{CellIndex, GapProfile, World, WorldKind};
