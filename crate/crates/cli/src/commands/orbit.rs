//! `lorentz orbit`: iterate one orbit and log every collision event,
//! terminating reason included.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use lorentz_core::analysis::MuSampler;
use lorentz_core::dynamics::{iterate_orbit, LineElement, SingularKind, StepError};
use lorentz_core::world::CellIndex;

use super::{load_world_checked, validation_err, Artifacts, CsvWriter, RunResult};

#[derive(Debug, Clone, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct OrbitParams {
    #[arg(long)]
    pub world: PathBuf,
    /// Starting cell.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub cell_x: i64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub cell_y: i64,
    /// Explicit start: arc index plus position/angle, or a sample seed.
    #[arg(long, requires_all = ["u", "phi"], conflicts_with = "sample_seed")]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub arc: Option<usize>,
    /// Position along the arc in (0, 1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub u: Option<f64>,
    /// Signed incidence angle in (-pi/2, pi/2).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub phi: Option<f64>,
    /// Draw the start from the invariant measure on the starting cell.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sample_seed: Option<u64>,
    #[arg(long)]
    pub steps: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub guards: super::GuardArgs,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(p: &OrbitParams) -> RunResult {
    let world = load_world_checked(&p.world)?;
    let cell = CellIndex::new(p.cell_x, p.cell_y);
    let start: LineElement = match (p.arc, p.u, p.phi, p.sample_seed) {
        (Some(arc), Some(u), Some(phi), None) => {
            let arcs = world.config_at(cell).arcs();
            if arc >= arcs.len() {
                return Err(validation_err(anyhow::anyhow!(
                    "cell ({}, {}) has {} arcs, index {arc} is out of range",
                    cell.x,
                    cell.y,
                    arcs.len()
                )));
            }
            if !(0.0..1.0).contains(&u) || phi.abs() >= core::f64::consts::FRAC_PI_2 {
                return Err(validation_err(anyhow::anyhow!(
                    "need 0 <= u < 1 and |phi| < pi/2"
                )));
            }
            let piece = &arcs[arc];
            LineElement::from_arc(&world, cell, arc, piece.theta0 + piece.span * u, phi)
        }
        (None, None, None, Some(seed)) => {
            let sampler = MuSampler::new(&world, &[cell])
                .map_err(|e| validation_err(anyhow::anyhow!("{e}")))?;
            sampler.sample(&world, seed, 0)
        }
        _ => {
            return Err(validation_err(anyhow::anyhow!(
                "give either --arc/--u/--phi or --sample-seed"
            )))
        }
    };

    let result = iterate_orbit(&world, start, p.steps, p.guards.guards());

    let mut csv = CsvWriter::create(
        &p.out,
        &["step", "cell_x", "cell_y", "arc", "qx", "qy", "vx", "vy", "tau", "singular_flag"],
    )?;
    let mut last = start;
    for (i, ev) in result.events.iter().enumerate() {
        let step = i + 1;
        csv.row(&[
            &step,
            &ev.to.cell.x,
            &ev.to.cell.y,
            &ev.to.arc,
            &ev.to.q.x,
            &ev.to.q.y,
            &ev.to.v.x(),
            &ev.to.v.y(),
            &ev.tau,
            &"none",
        ])?;
        last = ev.to;
    }
    if let Some(err) = &result.termination {
        let (flag, at) = match err {
            StepError::Singular { kind, at } => (
                match kind {
                    SingularKind::Tangential => "tangential",
                    SingularKind::Corner => "corner",
                    SingularKind::GateGraze => "gate_graze",
                },
                *at,
            ),
            StepError::WallHit { at, .. } => ("wall", *at),
            StepError::GuardExceeded { .. } => ("guard", last.q),
        };
        let step = result.events.len() + 1;
        csv.row(&[
            &step,
            &last.cell.x,
            &last.cell.y,
            &last.arc,
            &at.x,
            &at.y,
            &last.v.x(),
            &last.v.y(),
            &0.0,
            &flag,
        ])?;
        println!("orbit stopped after {} events: {err}", result.events.len());
    } else {
        println!("orbit ran {} events", result.events.len());
    }
    csv.finish()?;
    Ok(Artifacts::default().input(&p.world).output(&p.out))
}
