//! Quenched-disorder generators: Bernoulli measures on the word space, and
//! the recurrent-gas constructions built from blocking annuli.
//!
//! The gas construction wraps a seed window `xi` in a blocking annulus wide
//! enough that the Monte Carlo escape estimate (plus two standard errors)
//! drops below `1/k`, then pads it with a non-blocking annulus of thickness
//! `k`, skipping the blocking circles `D_j` which stay type 1. Iterating
//! over an increasing schedule of `k` nests these blocks and produces a
//! world that lies in every scheduled escape class.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::analysis::{escape_measure, EmptyBoundary, EscapeEstimate};
use crate::config::{Catalog, ConfigId};
use crate::dynamics::Guards;
use crate::world::{on_blocking_circle, CellIndex, CellSource, ExplicitWindow, Extension, World};

#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleError {
    /// Bernoulli weights must all be strictly positive.
    DegenerateSpec { index: usize },
    ProbsLengthMismatch { expected: usize, got: usize },
    /// Weights must sum to 1.
    BadProbabilities { sum: f64 },
    /// Xi assigns a cell outside its declared support ball.
    XiOutsideSupport { at: CellIndex },
    /// Xi contradicts a blocking circle (those cells are forced type 1).
    XiOnBlockingCircle { at: CellIndex },
    /// The annulus search passed the cap before meeting the escape bound.
    BudgetExceeded { k: u64, rho2_cap: u64, best_bound: f64 },
    ScheduleNotIncreasing,
    WindowTooSmall { needed: u64, window: u64 },
    EmptyBoundary,
}

impl core::fmt::Display for EnsembleError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EnsembleError::DegenerateSpec { index } => {
                write!(f, "probability {index} is zero (all must be positive)")
            }
            EnsembleError::ProbsLengthMismatch { expected, got } => {
                write!(f, "{got} probabilities for a catalog of {expected}")
            }
            EnsembleError::BadProbabilities { sum } => {
                write!(f, "probabilities sum to {sum}, expected 1")
            }
            EnsembleError::XiOutsideSupport { at } => {
                write!(f, "xi assigns ({}, {}) outside its ball", at.x, at.y)
            }
            EnsembleError::XiOnBlockingCircle { at } => {
                write!(f, "xi contradicts the blocking circle at ({}, {})", at.x, at.y)
            }
            EnsembleError::BudgetExceeded {
                k,
                rho2_cap,
                best_bound,
            } => write!(
                f,
                "no annulus up to rho2 = {rho2_cap} meets 1/{k} (best bound {best_bound})"
            ),
            EnsembleError::ScheduleNotIncreasing => write!(f, "schedule must strictly increase"),
            EnsembleError::WindowTooSmall { needed, window } => {
                write!(f, "window {window} smaller than the final block radius {needed}")
            }
            EnsembleError::EmptyBoundary => write!(f, "no boundary to sample"),
        }
    }
}

impl From<EmptyBoundary> for EnsembleError {
    fn from(_: EmptyBoundary) -> Self {
        EnsembleError::EmptyBoundary
    }
}

/// A Bernoulli product measure on the word space.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliSpec {
    pub probs: Vec<f64>,
    pub seed: u64,
}

impl BernoulliSpec {
    pub fn new(probs: Vec<f64>, seed: u64) -> BernoulliSpec {
        BernoulliSpec { probs, seed }
    }

    /// Total blocking mass `p_B` for a catalog with `m_prime` blocking cells.
    pub fn p_blocking(&self, m_prime: usize) -> f64 {
        self.probs.iter().take(m_prime).sum()
    }
}

/// World whose word is i.i.d. with law `probs`, reproducible from the seed.
pub fn bernoulli_world(
    spec: &BernoulliSpec,
    catalog: Arc<Catalog>,
) -> Result<World, EnsembleError> {
    if spec.probs.len() != catalog.len() {
        return Err(EnsembleError::ProbsLengthMismatch {
            expected: catalog.len(),
            got: spec.probs.len(),
        });
    }
    for (i, &p) in spec.probs.iter().enumerate() {
        if p <= 0.0 {
            return Err(EnsembleError::DegenerateSpec { index: i });
        }
    }
    let sum: f64 = spec.probs.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(EnsembleError::BadProbabilities { sum });
    }
    let mut cumulative = Vec::with_capacity(spec.probs.len());
    let mut acc = 0.0;
    for &p in &spec.probs {
        acc += p;
        cumulative.push(acc);
    }
    *cumulative.last_mut().unwrap() = 1.0;
    Ok(World::new(
        catalog,
        CellSource::Bernoulli {
            cumulative,
            seed: spec.seed,
        },
        None,
    )
    .expect("bernoulli source is always in range"))
}

/// A finite gas assignment supported on a taxicab ball intersected with
/// `Z_i` (blocking-circle cells are forced type 1); unassigned cells
/// default to type 1.
#[derive(Debug, Clone, PartialEq)]
pub struct XiWindow {
    radius: u64,
    cells: BTreeMap<CellIndex, ConfigId>,
}

impl XiWindow {
    /// All-blocking seed window of the given support radius.
    pub fn blocking(radius: u64) -> XiWindow {
        XiWindow {
            radius,
            cells: BTreeMap::new(),
        }
    }

    pub fn radius(&self) -> u64 {
        self.radius
    }

    /// Assigns a cell, validating support and the `Z_i` constraint.
    pub fn set(&mut self, i: u64, n: CellIndex, id: ConfigId) -> Result<(), EnsembleError> {
        if n.norm() > self.radius {
            return Err(EnsembleError::XiOutsideSupport { at: n });
        }
        if on_blocking_circle(n, i).is_some() && id != 1 {
            return Err(EnsembleError::XiOnBlockingCircle { at: n });
        }
        self.cells.insert(n, id);
        Ok(())
    }

    pub fn get(&self, n: CellIndex) -> ConfigId {
        self.cells.get(&n).copied().unwrap_or(1)
    }

    /// Validates every stored cell against `Z_i`; used when a window built
    /// elsewhere is adopted as a construction seed.
    pub fn check_zi(&self, i: u64) -> Result<(), EnsembleError> {
        for (&n, &id) in &self.cells {
            if n.norm() > self.radius {
                return Err(EnsembleError::XiOutsideSupport { at: n });
            }
            if on_blocking_circle(n, i).is_some() && id != 1 {
                return Err(EnsembleError::XiOnBlockingCircle { at: n });
            }
        }
        Ok(())
    }
}

/// One constructed block: `xi` inside `rho1`, a blocking annulus out to
/// `rho2` whose escape estimate meets `1/k`, and a non-blocking annulus of
/// thickness `k` out to `rho` (blocking circles excepted).
#[derive(Debug, Clone, PartialEq)]
pub struct EtaBlock {
    pub i: u64,
    pub k: u64,
    pub rho1: u64,
    pub rho2: u64,
    pub rho: u64,
    /// Complete assignment on the ball of radius `rho`.
    cells: BTreeMap<CellIndex, ConfigId>,
    /// The accepted estimate; `None` when the `1/k` bound was vacuous.
    pub escape: Option<EscapeEstimate>,
}

impl EtaBlock {
    pub fn cell(&self, n: CellIndex) -> ConfigId {
        self.cells.get(&n).copied().unwrap_or(1)
    }

    /// Checks the structural invariants exactly on the block's window.
    pub fn verify_invariants(&self, m: ConfigId) -> Result<(), CellIndex> {
        if !(self.rho1 < self.rho2 && self.rho2 < self.rho) {
            return Err(CellIndex::ORIGIN);
        }
        if self.rho - self.rho2 < self.k {
            return Err(CellIndex::ORIGIN);
        }
        for (&n, &id) in &self.cells {
            let s = n.norm();
            let expected = if on_blocking_circle(n, self.i).is_some() {
                1
            } else if s <= self.rho1 {
                id // xi region: free
            } else if s <= self.rho2 {
                1
            } else {
                m
            };
            if id != expected {
                return Err(n);
            }
        }
        Ok(())
    }

    /// Materializes the block as a world: the block on its ball, type 1
    /// everywhere else, out to a square window of the given radius.
    pub fn to_world(&self, catalog: Arc<Catalog>, window: u64) -> Result<World, EnsembleError> {
        if window < self.rho {
            return Err(EnsembleError::WindowTooSmall {
                needed: self.rho,
                window,
            });
        }
        Ok(materialize(catalog, window, |n| self.cell(n)))
    }
}

fn materialize(catalog: Arc<Catalog>, window: u64, id_at: impl Fn(CellIndex) -> ConfigId) -> World {
    let w = window as i64;
    let width = (2 * w + 1) as usize;
    let mut cells = Vec::with_capacity(width * width);
    for y in -w..=w {
        for x in -w..=w {
            cells.push(id_at(CellIndex::new(x, y)));
        }
    }
    World::new(
        catalog,
        CellSource::Explicit(ExplicitWindow {
            origin: CellIndex::new(-w, -w),
            width,
            height: width,
            cells,
            extend: Extension::Constant(1),
        }),
        None,
    )
    .expect("materialized window is in range")
}

/// Knobs for the annulus search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaOptions {
    /// Monte Carlo sample size per candidate annulus.
    pub n_samples: usize,
    pub seed: u64,
    pub guards: Guards,
    /// Collision budget per escape orbit; exhaustion counts as escape.
    pub max_collisions: usize,
    /// Largest annulus radius tried before giving up.
    pub rho2_cap: u64,
}

impl Default for EtaOptions {
    fn default() -> Self {
        EtaOptions {
            n_samples: 100_000,
            seed: 0,
            guards: Guards::default(),
            max_collisions: 100_000,
            rho2_cap: 64,
        }
    }
}

/// Escape estimation hook: the core runs sequentially; a driver may
/// substitute an index-parallel implementation (the stream-splitting
/// contract makes the results identical).
pub trait EscapeEstimator {
    #[allow(clippy::too_many_arguments)]
    fn estimate(
        &self,
        world: &World,
        center: CellIndex,
        rho1: u64,
        rho2: u64,
        n: usize,
        seed: u64,
        guards: Guards,
        max_collisions: usize,
    ) -> Result<EscapeEstimate, EmptyBoundary>;
}

/// Default sequential estimator.
pub struct SequentialEscape;

impl EscapeEstimator for SequentialEscape {
    fn estimate(
        &self,
        world: &World,
        center: CellIndex,
        rho1: u64,
        rho2: u64,
        n: usize,
        seed: u64,
        guards: Guards,
        max_collisions: usize,
    ) -> Result<EscapeEstimate, EmptyBoundary> {
        escape_measure(world, center, rho1, rho2, n, seed, guards, max_collisions)
    }
}

/// The id the eta construction assigns at `n`, given the accepted radii.
fn eta_id(xi: &XiWindow, i: u64, rho2: u64, rho: u64, m: ConfigId, n: CellIndex) -> ConfigId {
    let s = n.norm();
    if on_blocking_circle(n, i).is_some() {
        return 1;
    }
    if s <= xi.radius() {
        xi.get(n)
    } else if s <= rho2 {
        1
    } else if s <= rho {
        m
    } else {
        1
    }
}

/// Builds the block around `xi`: searches `rho2` incrementally until the
/// escape estimate plus two standard errors drops to `1/k` (vacuously
/// accepted at `k = 1`), then adds the non-blocking annulus of thickness
/// `k`.
pub fn construct_eta(
    catalog: Arc<Catalog>,
    i: u64,
    k: u64,
    xi: &XiWindow,
    opts: &EtaOptions,
    estimator: &impl EscapeEstimator,
) -> Result<EtaBlock, EnsembleError> {
    assert!(k >= 1);
    xi.check_zi(i)?;
    let m = catalog.len() as ConfigId;
    let rho1 = xi.radius();
    let bound = 1.0 / k as f64;

    let mut accepted: Option<(u64, Option<EscapeEstimate>)> = None;
    let mut best_seen = f64::INFINITY;
    if bound >= 1.0 {
        // Escape probabilities never exceed 1: accept immediately.
        accepted = Some((rho1 + 1, None));
    } else {
        for rho2 in (rho1 + 1)..=opts.rho2_cap {
            // Candidate world: xi plus the blocking annulus; everything
            // beyond rho2 is irrelevant to the estimate (orbits stop at the
            // outer circle) and stays type 1.
            let candidate = materialize(catalog.clone(), rho2, |n| {
                eta_id(xi, i, rho2, rho2, m, n)
            });
            let est = estimator.estimate(
                &candidate,
                CellIndex::ORIGIN,
                rho1,
                rho2,
                opts.n_samples,
                crate::rng::mix3(opts.seed, k, rho2),
                opts.guards,
                opts.max_collisions,
            )?;
            best_seen = best_seen.min(est.p_hat + 2.0 * est.se);
            if est.p_hat + 2.0 * est.se <= bound {
                accepted = Some((rho2, Some(est)));
                break;
            }
        }
    }

    let Some((rho2, escape)) = accepted else {
        return Err(EnsembleError::BudgetExceeded {
            k,
            rho2_cap: opts.rho2_cap,
            best_bound: best_seen,
        });
    };
    let rho = rho2 + k;
    let mut cells = BTreeMap::new();
    for n in crate::analysis::taxicab_ball(CellIndex::ORIGIN, rho) {
        cells.insert(n, eta_id(xi, i, rho2, rho, m, n));
    }
    Ok(EtaBlock {
        i,
        k,
        rho1,
        rho2,
        rho,
        cells,
        escape,
    })
}

/// Nested construction over an increasing schedule: each stage's whole ball
/// becomes the next stage's seed window.
#[derive(Debug, Clone)]
pub struct RiConstruction {
    pub i: u64,
    pub stages: Vec<EtaBlock>,
    pub world: World,
}

/// Runs the schedule and materializes the final block as a world (type 1
/// outside the support), on a square window of radius `window`.
pub fn construct_ri_window(
    catalog: Arc<Catalog>,
    i: u64,
    k_schedule: &[u64],
    xi0: Option<XiWindow>,
    window: u64,
    opts: &EtaOptions,
    estimator: &impl EscapeEstimator,
) -> Result<RiConstruction, EnsembleError> {
    if k_schedule.is_empty() || k_schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EnsembleError::ScheduleNotIncreasing);
    }
    let mut xi = xi0.unwrap_or_else(|| XiWindow::blocking(1));
    let mut stages: Vec<EtaBlock> = Vec::with_capacity(k_schedule.len());
    for (stage, &k) in k_schedule.iter().enumerate() {
        let stage_opts = EtaOptions {
            seed: crate::rng::mix2(opts.seed, stage as u64),
            ..*opts
        };
        let block = construct_eta(catalog.clone(), i, k, &xi, &stage_opts, estimator)?;
        // The whole block becomes the next seed window.
        xi = XiWindow {
            radius: block.rho,
            cells: block.cells.clone(),
        };
        stages.push(block);
    }
    let last = stages.last().unwrap();
    if window < last.rho {
        return Err(EnsembleError::WindowTooSmall {
            needed: last.rho,
            window,
        });
    }
    let world = last.to_world(catalog, window)?;
    Ok(RiConstruction {
        i,
        stages,
        world,
    })
}
