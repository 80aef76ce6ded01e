//! Measure sampling and the headline statistics: invariant-measure
//! sampling, escape probabilities, return statistics with the exact
//! confinement check, Lyapunov estimation, horizon scans and
//! singularity-approach counting.
//!
//! Every estimator is counter-seeded per sample (see [`crate::rng`]): sample
//! `i` is a pure function of `(seed, i)`, so estimates are reproducible and
//! independent of evaluation order or worker count. The `*_sample` functions
//! expose that per-index granularity for parallel drivers; the aggregate
//! functions fold them sequentially.

// Inherent float methods cover this when std is linked (tests); the trait
// provides them in the no_std build.
#[allow(unused_imports)]
use num_traits::Float;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::dynamics::{
    self, CollisionEvent, Guards, LineElement, Orbit, StepError, TangentError,
};
use crate::geometry::{Point, UnitVector, Vec2};
use crate::rng;
use crate::stats;
use crate::world::{CellIndex, GapProfile, World, WorldKind};

/// Cells at taxicab distance exactly `rho` from `center`.
pub fn taxicab_circle(center: CellIndex, rho: u64) -> Vec<CellIndex> {
    let r = rho as i64;
    if r == 0 {
        return alloc::vec![center];
    }
    let mut out = Vec::with_capacity(4 * rho as usize);
    for dx in -r..=r {
        let rem = r - dx.abs();
        out.push(center.offset(dx, rem));
        if rem != 0 {
            out.push(center.offset(dx, -rem));
        }
    }
    out
}

/// Cells at taxicab distance at most `rho` from `center`.
pub fn taxicab_ball(center: CellIndex, rho: u64) -> Vec<CellIndex> {
    let mut out = Vec::new();
    for s in 0..=rho {
        out.extend(taxicab_circle(center, s));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmptyBoundary;

impl core::fmt::Display for EmptyBoundary {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "boundary set has no arc length")
    }
}

/// Samples the invariant measure `cos(phi) dr dphi` restricted to the arcs
/// of a fixed cell set: positions uniform in arclength, angles with density
/// `cos(phi)/2` on `(-pi/2, pi/2)`.
///
/// Sample `i` depends only on `(seed, i)`.
pub struct MuSampler {
    entries: Vec<(CellIndex, usize)>,
    cumulative: Vec<f64>,
    total: f64,
}

impl MuSampler {
    pub fn new(world: &World, cells: &[CellIndex]) -> Result<MuSampler, EmptyBoundary> {
        let mut entries = Vec::new();
        let mut cumulative = Vec::new();
        let mut total = 0.0;
        for &cell in cells {
            let cfg = world.config_at(cell);
            for (ai, arc) in cfg.arcs().iter().enumerate() {
                total += arc.arc_length();
                entries.push((cell, ai));
                cumulative.push(total);
            }
        }
        if total <= 0.0 {
            return Err(EmptyBoundary);
        }
        Ok(MuSampler {
            entries,
            cumulative,
            total,
        })
    }

    pub fn total_length(&self) -> f64 {
        self.total
    }

    /// Entries as (cell, arc index) with their arclength weights.
    pub fn entries(&self) -> impl Iterator<Item = ((CellIndex, usize), f64)> + '_ {
        self.entries.iter().enumerate().map(|(i, &e)| {
            let prev = if i == 0 { 0.0 } else { self.cumulative[i - 1] };
            (e, self.cumulative[i] - prev)
        })
    }

    pub fn sample(&self, world: &World, seed: u64, index: u64) -> LineElement {
        let mut r = rng::stream(seed, index);
        let u = rng::uniform_f64(&mut r) * self.total;
        let k = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.entries.len() - 1);
        let (cell, ai) = self.entries[k];
        let arc = &world.config_at(cell).arcs()[ai];
        let theta = arc.theta0 + arc.span * rng::uniform_f64(&mut r);
        // Inverse CDF of cos(phi)/2 on (-pi/2, pi/2).
        let phi = (2.0 * rng::uniform_f64(&mut r) - 1.0).asin();
        LineElement::from_arc(world, cell, ai, theta, phi)
    }
}

/// An i.i.d. sample of line elements from the restricted invariant measure.
pub struct MuSample {
    pub elements: Vec<LineElement>,
    pub seed: u64,
}

pub fn sample_mu(
    world: &World,
    cells: &[CellIndex],
    n: usize,
    seed: u64,
) -> Result<MuSample, EmptyBoundary> {
    let sampler = MuSampler::new(world, cells)?;
    Ok(MuSample {
        elements: (0..n as u64).map(|i| sampler.sample(world, seed, i)).collect(),
        seed,
    })
}

/// How one escape trial ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EscapeOutcome {
    Returned,
    Escaped,
    /// Guard exhaustion or singular termination before a decision; counted
    /// conservatively as an escape, reported separately.
    Terminated,
}

/// Monte Carlo escape probability estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeEstimate {
    pub p_hat: f64,
    pub se: f64,
    pub n: usize,
    pub escaped: u64,
    pub terminated: u64,
    pub rho1: u64,
    pub rho2: u64,
}

impl EscapeEstimate {
    pub fn from_outcomes(
        outcomes: impl IntoIterator<Item = EscapeOutcome>,
        rho1: u64,
        rho2: u64,
    ) -> EscapeEstimate {
        let mut n = 0usize;
        let mut escaped = 0u64;
        let mut terminated = 0u64;
        for o in outcomes {
            n += 1;
            match o {
                EscapeOutcome::Returned => {}
                EscapeOutcome::Escaped => escaped += 1,
                EscapeOutcome::Terminated => {
                    escaped += 1;
                    terminated += 1;
                }
            }
        }
        let p = escaped as f64 / n.max(1) as f64;
        EscapeEstimate {
            p_hat: p,
            se: (p * (1.0 - p) / n.max(1) as f64).sqrt(),
            n,
            escaped,
            terminated,
            rho1,
            rho2,
        }
    }
}

/// Escape estimator: elements start on the arcs of the circle of cells at
/// taxicab radius `rho1` around `center`, and escape when a collision lands
/// at radius `>= rho2` before one lands back at radius `<= rho1`.
pub struct EscapeRunner<'w> {
    world: &'w World,
    sampler: MuSampler,
    center: CellIndex,
    pub rho1: u64,
    pub rho2: u64,
    pub seed: u64,
    pub guards: Guards,
    pub max_collisions: usize,
}

impl<'w> EscapeRunner<'w> {
    pub fn new(
        world: &'w World,
        center: CellIndex,
        rho1: u64,
        rho2: u64,
        seed: u64,
        guards: Guards,
        max_collisions: usize,
    ) -> Result<EscapeRunner<'w>, EmptyBoundary> {
        let cells = taxicab_circle(center, rho1);
        let sampler = MuSampler::new(world, &cells)?;
        Ok(EscapeRunner {
            world,
            sampler,
            center,
            rho1,
            rho2,
            seed,
            guards,
            max_collisions,
        })
    }

    pub fn run_sample(&self, index: u64) -> EscapeOutcome {
        if self.rho2 <= self.rho1 {
            return EscapeOutcome::Escaped; // degenerate annulus
        }
        let x0 = self.sampler.sample(self.world, self.seed, index);
        let mut orbit = Orbit::new(self.world, x0, self.guards);
        for _ in 0..self.max_collisions {
            match orbit.next() {
                Some(ev) => {
                    let s = CellIndex::new(
                        ev.to.cell.x - self.center.x,
                        ev.to.cell.y - self.center.y,
                    )
                    .norm();
                    if s >= self.rho2 {
                        return EscapeOutcome::Escaped;
                    }
                    if s <= self.rho1 {
                        return EscapeOutcome::Returned;
                    }
                }
                None => return EscapeOutcome::Terminated,
            }
        }
        EscapeOutcome::Terminated
    }

    pub fn estimate(&self, n: usize) -> EscapeEstimate {
        EscapeEstimate::from_outcomes(
            (0..n as u64).map(|i| self.run_sample(i)),
            self.rho1,
            self.rho2,
        )
    }
}

/// Convenience wrapper matching the one-shot estimator contract.
#[allow(clippy::too_many_arguments)]
pub fn escape_measure(
    world: &World,
    center: CellIndex,
    rho1: u64,
    rho2: u64,
    n: usize,
    seed: u64,
    guards: Guards,
    max_collisions: usize,
) -> Result<EscapeEstimate, EmptyBoundary> {
    Ok(EscapeRunner::new(world, center, rho1, rho2, seed, guards, max_collisions)?.estimate(n))
}

/// Outcome of one recurrence orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceOutcome {
    /// Collision index (1-based) of the first return to the start cell.
    pub first_return: Option<u64>,
    /// Exact confinement violations `cell - origin outside [f_t^-, f_t^+]`.
    pub violations: u64,
    /// Collisions completed before termination.
    pub completed: u64,
    pub terminated_early: bool,
}

/// Return-time statistics over a sample of orbits started in one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceStats {
    /// `returned_by[t]` = number of orbits whose first return happened
    /// within `t` collisions (index 0 unused).
    pub returned_by: Vec<u64>,
    pub n_orbits: usize,
    pub t_max: usize,
    pub confinement_violations: u64,
    pub terminated_early: u64,
    /// Start cell after the shift convention (equals the requested cell
    /// when no profile is supplied).
    pub start_cell: CellIndex,
}

impl RecurrenceStats {
    /// The return fraction r(t), non-decreasing in t.
    pub fn return_fraction(&self, t: usize) -> f64 {
        self.returned_by[t.min(self.t_max)] as f64 / self.n_orbits as f64
    }
}

pub struct RecurrenceRunner<'w> {
    world: &'w World,
    sampler: MuSampler,
    start: CellIndex,
    profile: Option<&'w GapProfile>,
    pub t_max: usize,
    pub seed: u64,
    pub guards: Guards,
}

impl<'w> RecurrenceRunner<'w> {
    /// When `profile` is given the start cell is the profile's shifted
    /// origin (it must come from this world) and every collision is checked
    /// against the exact confinement interval `[f_t^-, f_t^+]`.
    pub fn new(
        world: &'w World,
        start: CellIndex,
        profile: Option<&'w GapProfile>,
        t_max: usize,
        seed: u64,
        guards: Guards,
    ) -> Result<RecurrenceRunner<'w>, EmptyBoundary> {
        let start = match profile {
            Some(p) => {
                debug_assert_eq!(world.kind(), WorldKind::Tube);
                debug_assert!(p.len() >= t_max);
                CellIndex::tube(p.origin_shift)
            }
            None => start,
        };
        let sampler = MuSampler::new(world, &[start])?;
        Ok(RecurrenceRunner {
            world,
            sampler,
            start,
            profile,
            t_max,
            seed,
            guards,
        })
    }

    pub fn start_cell(&self) -> CellIndex {
        self.start
    }

    /// One orbit: collisions inside the start cell before ever leaving it
    /// do not count as returns; the return clock starts once the orbit has
    /// collided in some other cell.
    pub fn run_sample(&self, index: u64) -> RecurrenceOutcome {
        let x0 = self.sampler.sample(self.world, self.seed, index);
        let mut orbit = Orbit::new(self.world, x0, self.guards);
        let mut first_return = None;
        let mut left = false;
        let mut violations = 0u64;
        let mut completed = 0u64;
        for t in 1..=self.t_max as u64 {
            let Some(ev) = orbit.next() else { break };
            completed = t;
            if ev.to.cell != self.start {
                left = true;
            } else if left && first_return.is_none() {
                first_return = Some(t);
                if self.profile.is_none() {
                    break; // nothing else to measure
                }
            }
            if let Some(p) = self.profile {
                let rel = ev.to.cell.x - self.start.x;
                let ti = t as usize;
                if rel < p.f_minus[ti] || rel > p.f_plus[ti] {
                    violations += 1;
                }
            }
        }
        let terminated_early =
            completed < self.t_max as u64 && (first_return.is_none() || self.profile.is_some());
        RecurrenceOutcome {
            first_return,
            violations,
            completed,
            terminated_early,
        }
    }

    pub fn collect(&self, outcomes: impl IntoIterator<Item = RecurrenceOutcome>) -> RecurrenceStats {
        let mut returned_by = alloc::vec![0u64; self.t_max + 1];
        let mut n = 0usize;
        let mut violations = 0u64;
        let mut terminated = 0u64;
        for o in outcomes {
            n += 1;
            violations += o.violations;
            if o.terminated_early {
                terminated += 1;
            }
            if let Some(t) = o.first_return {
                returned_by[t as usize] += 1;
            }
        }
        // Cumulative.
        for t in 1..=self.t_max {
            returned_by[t] += returned_by[t - 1];
        }
        RecurrenceStats {
            returned_by,
            n_orbits: n,
            t_max: self.t_max,
            confinement_violations: violations,
            terminated_early: terminated,
            start_cell: self.start,
        }
    }

    pub fn stats(&self, n_orbits: usize) -> RecurrenceStats {
        self.collect((0..n_orbits as u64).map(|i| self.run_sample(i)))
    }
}

/// Whether a Lyapunov orbit runs the map forward or its time-reversal
/// conjugate `i T i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapDirection {
    Forward,
    Reversed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovEstimate {
    pub lambda_hat: f64,
    /// 95% normal confidence interval over per-orbit rates.
    pub ci_low: f64,
    pub ci_high: f64,
    pub per_orbit: Vec<f64>,
    /// Extra draws used to replace singular-terminated orbits.
    pub resampled: u64,
    pub n_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LyapunovError {
    /// More than half of the orbit slots failed even after resampling.
    InsufficientOrbits { completed: usize, requested: usize },
    EmptyBoundary,
}

impl core::fmt::Display for LyapunovError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LyapunovError::InsufficientOrbits { completed, requested } => {
                write!(f, "only {completed} of {requested} orbits completed")
            }
            LyapunovError::EmptyBoundary => write!(f, "no arcs to start orbits from"),
        }
    }
}

const LYAPUNOV_RESAMPLE_CAP: u64 = 24;

pub struct LyapunovRunner<'w> {
    world: &'w World,
    sampler: MuSampler,
    pub n_steps: usize,
    pub seed: u64,
    pub guards: Guards,
    pub direction: MapDirection,
}

impl<'w> LyapunovRunner<'w> {
    pub fn new(
        world: &'w World,
        cells: &[CellIndex],
        n_steps: usize,
        seed: u64,
        guards: Guards,
        direction: MapDirection,
    ) -> Result<LyapunovRunner<'w>, EmptyBoundary> {
        Ok(LyapunovRunner {
            world,
            sampler: MuSampler::new(world, cells)?,
            n_steps,
            seed,
            guards,
            direction,
        })
    }

    /// Mean log-expansion rate of one full-length orbit, with the number of
    /// resample attempts spent; `None` when the resample cap is exhausted.
    pub fn run_sample(&self, index: u64) -> (Option<f64>, u64) {
        for attempt in 0..LYAPUNOV_RESAMPLE_CAP {
            let stream_seed = rng::mix2(self.seed, attempt);
            let mut x = self.sampler.sample(self.world, stream_seed, index);
            if self.direction == MapDirection::Reversed {
                match dynamics::reverse(self.world, &x) {
                    Ok(r) => x = r,
                    Err(_) => continue,
                }
            }
            let mut state = dynamics::CocycleState::identity();
            let mut orbit = Orbit::new(self.world, x, self.guards);
            let mut ok = true;
            for _ in 0..self.n_steps {
                let Some(ev) = orbit.next() else {
                    ok = false;
                    break;
                };
                match dynamics::tangent_step(self.world, &ev, &state) {
                    Ok(s) => state = s,
                    Err(TangentError::NearTangency) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return (Some(state.rate()), attempt);
            }
        }
        (None, LYAPUNOV_RESAMPLE_CAP)
    }

    pub fn collect(
        &self,
        samples: impl IntoIterator<Item = (Option<f64>, u64)>,
        requested: usize,
    ) -> Result<LyapunovEstimate, LyapunovError> {
        let mut per_orbit = Vec::new();
        let mut resampled = 0u64;
        for (rate, attempts) in samples {
            resampled += attempts;
            if let Some(r) = rate {
                per_orbit.push(r);
            }
        }
        if per_orbit.len() * 2 < requested {
            return Err(LyapunovError::InsufficientOrbits {
                completed: per_orbit.len(),
                requested,
            });
        }
        let (mean, se) = stats::mean_and_se(&per_orbit);
        Ok(LyapunovEstimate {
            lambda_hat: mean,
            ci_low: mean - 1.96 * se,
            ci_high: mean + 1.96 * se,
            per_orbit,
            resampled,
            n_steps: self.n_steps,
        })
    }

    pub fn estimate(&self, n_orbits: usize) -> Result<LyapunovEstimate, LyapunovError> {
        self.collect((0..n_orbits as u64).map(|i| self.run_sample(i)), n_orbits)
    }
}

/// One-shot Lyapunov surrogate: mean cocycle log-norm growth per collision
/// over `n_orbits` orbits of `n_steps` collisions started from the
/// invariant measure on `cells`.
pub fn lyapunov_estimate(
    world: &World,
    cells: &[CellIndex],
    n_orbits: usize,
    n_steps: usize,
    seed: u64,
    guards: Guards,
) -> Result<LyapunovEstimate, LyapunovError> {
    LyapunovRunner::new(world, cells, n_steps, seed, guards, MapDirection::Forward)
        .map_err(|_| LyapunovError::EmptyBoundary)?
        .estimate(n_orbits)
}

/// A free chord found by the horizon sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineWitness {
    pub origin: Point,
    pub dir: UnitVector,
    pub t0: f64,
    pub t1: f64,
}

impl LineWitness {
    pub fn length(&self) -> f64 {
        self.t1 - self.t0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorizonScan {
    /// Longest scatterer-free chord among the sampled lines, clipped to
    /// the window.
    pub max_free_chord: f64,
    pub witness: Option<LineWitness>,
    /// Some sampled line crossed the whole window untouched: at window
    /// scale the horizon is not even locally finite.
    pub full_line: Option<LineWitness>,
}

/// Walks the lattice cells crossed by `origin + t dir` for `t` in
/// `[t0, t1]`, yielding each cell with its parameter interval.
fn walk_cells(
    origin: Point,
    dir: UnitVector,
    t0: f64,
    t1: f64,
    mut visit: impl FnMut(CellIndex, f64, f64),
) {
    let (dx, dy) = (dir.x(), dir.y());
    let mut t = t0;
    // Nudge inward so the starting cell is unambiguous.
    let eps = 1e-12;
    while t < t1 {
        let p = origin.offset(dir.as_vec().scale(t + eps));
        let cell = CellIndex::new(p.x.floor() as i64, p.y.floor() as i64);
        // Parameter at which the ray exits this cell.
        let mut t_next = t1;
        if dx > 0.0 {
            t_next = t_next.min((cell.x as f64 + 1.0 - origin.x) / dx);
        } else if dx < 0.0 {
            t_next = t_next.min((cell.x as f64 - origin.x) / dx);
        }
        if dy > 0.0 {
            t_next = t_next.min((cell.y as f64 + 1.0 - origin.y) / dy);
        } else if dy < 0.0 {
            t_next = t_next.min((cell.y as f64 - origin.y) / dy);
        }
        if t_next <= t + eps {
            t_next = t + 10.0 * eps; // degenerate tangency to a lattice line
        }
        visit(cell, t, t_next.min(t1));
        t = t_next;
    }
}

/// Blocked parameter intervals of a line against the scatterers of the
/// cells it crosses (each disc clipped to its owning cell).
fn blocked_intervals(
    world: &World,
    origin: Point,
    dir: UnitVector,
    t0: f64,
    t1: f64,
) -> Vec<(f64, f64)> {
    let mut blocked: Vec<(f64, f64)> = Vec::new();
    walk_cells(origin, dir, t0, t1, |cell, ct0, ct1| {
        let cfg = world.config_at(cell);
        let off = Vec2::new(cell.x as f64, cell.y as f64);
        for d in cfg.discs() {
            let c = Point::new(d.center.x + off.x, d.center.y + off.y);
            let oc = origin - c;
            let b = oc.dot(dir.as_vec());
            let c0 = oc.dot(oc) - d.radius * d.radius;
            let disc = b * b - c0;
            if disc <= 0.0 {
                continue;
            }
            let sq = disc.sqrt();
            let (lo, hi) = ((-b - sq).max(ct0), (-b + sq).min(ct1));
            if hi > lo {
                blocked.push((lo, hi));
            }
        }
    });
    blocked.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    blocked
}

/// Longest free gap of a line within `[t0, t1]`; `None` gap list means the
/// line is completely free.
fn longest_free_gap(blocked: &[(f64, f64)], t0: f64, t1: f64) -> (f64, f64, f64) {
    let mut best = (0.0, t0, t0);
    let mut cursor = t0;
    for &(lo, hi) in blocked {
        if lo > cursor {
            let len = lo - cursor;
            if len > best.0 {
                best = (len, cursor, lo);
            }
        }
        cursor = cursor.max(hi);
        if cursor >= t1 {
            break;
        }
    }
    if t1 > cursor {
        let len = t1 - cursor;
        if len > best.0 {
            best = (len, cursor, t1);
        }
    }
    best
}

/// Sweeps directed lines across a finite window (cells of taxicab radius
/// `window` for gases, `|x| <= window` for tubes) and reports the longest
/// scatterer-free chord, plus any sampled line that crosses the window
/// untouched.
pub fn horizon_scan(
    world: &World,
    window: u64,
    n_angles: usize,
    n_offsets: usize,
) -> HorizonScan {
    let w = window as f64;
    // Window box in position space.
    let (x0, x1, y0, y1) = match world.kind() {
        WorldKind::Tube => (-w, w + 1.0, 0.0, 1.0 - 1e-9),
        WorldKind::Gas => (-w, w + 1.0, -w, w + 1.0),
    };
    let cx = 0.5 * (x0 + x1);
    let cy = 0.5 * (y0 + y1);
    let half_diag = 0.5 * ((x1 - x0).hypot(y1 - y0));

    let mut result = HorizonScan {
        max_free_chord: 0.0,
        witness: None,
        full_line: None,
    };

    for ia in 0..n_angles {
        let theta = core::f64::consts::PI * (ia as f64 + 0.5) / n_angles as f64;
        let dir = UnitVector::from_angle(theta);
        let normal = dir.perp();
        for io in 0..n_offsets {
            let c = -half_diag + 2.0 * half_diag * (io as f64 + 0.5) / n_offsets as f64;
            let anchor = Point::new(cx + c * normal.x(), cy + c * normal.y());
            // Clip the line to the window box.
            let (mut t_lo, mut t_hi) = (-f64::INFINITY, f64::INFINITY);
            for (p, d, lo, hi) in [
                (anchor.x, dir.x(), x0, x1),
                (anchor.y, dir.y(), y0, y1),
            ] {
                if d.abs() < 1e-15 {
                    if p < lo || p > hi {
                        t_lo = f64::INFINITY;
                    }
                    continue;
                }
                let (a, b) = ((lo - p) / d, (hi - p) / d);
                t_lo = t_lo.max(a.min(b));
                t_hi = t_hi.min(a.max(b));
            }
            if t_hi <= t_lo {
                continue;
            }
            let blocked = blocked_intervals(world, anchor, dir, t_lo, t_hi);
            let (len, g0, g1) = longest_free_gap(&blocked, t_lo, t_hi);
            if len > result.max_free_chord {
                result.max_free_chord = len;
                result.witness = Some(LineWitness {
                    origin: anchor,
                    dir,
                    t0: g0,
                    t1: g1,
                });
            }
            if blocked.is_empty() && result.full_line.is_none() {
                result.full_line = Some(LineWitness {
                    origin: anchor,
                    dir,
                    t0: t_lo,
                    t1: t_hi,
                });
            }
        }
    }
    result
}

/// A singularity source: an oriented tangency to a disc, or an arc
/// endpoint (scatterer corner).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SingularitySource {
    Tangency {
        cell: CellIndex,
        disc: usize,
        /// Which side of the circle the passing chord runs.
        positive_side: bool,
    },
    Corner {
        cell: CellIndex,
        arc: usize,
        far_end: bool,
    },
}

/// Singularity-approach counts c(t) with the exact gap-profile bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularityGrowth {
    pub t_values: Vec<usize>,
    pub counts: Vec<u64>,
    /// `2 x (arcs within [f_(t+1)^-, f_(t+1)^+])`, from the gap profile.
    pub bounds: Vec<u64>,
    /// Log-log slope of counts vs t over the positive entries.
    pub slope: f64,
    pub n_orbits: usize,
    pub delta: f64,
}

/// Counts distinct singularity sources approached within `delta` by
/// `n_orbits` orbits from the (shift-normalized) origin cell of a tube
/// world, at each collision horizon in `t_values`.
pub fn singularity_growth(
    world: &World,
    profile: &GapProfile,
    t_values: &[usize],
    delta: f64,
    n_orbits: usize,
    seed: u64,
    guards: Guards,
) -> Result<SingularityGrowth, EmptyBoundary> {
    let t_max = t_values.iter().copied().max().unwrap_or(0);
    debug_assert!(profile.len() > t_max);
    let start = CellIndex::tube(profile.origin_shift);
    let sampler = MuSampler::new(world, &[start])?;

    // source -> earliest collision index that approached it.
    let mut first_seen: BTreeMap<SingularitySource, u64> = BTreeMap::new();

    for orbit_idx in 0..n_orbits as u64 {
        let x0 = sampler.sample(world, seed, orbit_idx);
        let mut orbit = Orbit::new(world, x0, guards);
        for t in 1..=t_max as u64 {
            let Some(ev) = orbit.next() else { break };
            record_sources(world, &ev, delta, t, &mut first_seen);
        }
    }

    let counts: Vec<u64> = t_values
        .iter()
        .map(|&t| first_seen.values().filter(|&&s| s <= t as u64).count() as u64)
        .collect();
    let bounds: Vec<u64> = t_values
        .iter()
        .map(|&t| {
            let lo = profile.f_minus[t + 1];
            let hi = profile.f_plus[t + 1];
            let arcs: usize = (lo..=hi)
                .map(|n| {
                    world
                        .config_at(CellIndex::tube(profile.origin_shift + n))
                        .arcs()
                        .len()
                })
                .sum();
            2 * arcs as u64
        })
        .collect();

    // Log-log regression over positive counts.
    let pts: Vec<(f64, f64)> = t_values
        .iter()
        .zip(&counts)
        .filter(|&(_, &c)| c > 0)
        .map(|(&t, &c)| ((t as f64).ln(), (c as f64).ln()))
        .collect();
    let slope = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    } else {
        f64::NAN
    };

    Ok(SingularityGrowth {
        t_values: t_values.to_vec(),
        counts,
        bounds,
        slope,
        n_orbits,
        delta,
    })
}

fn record_sources(
    world: &World,
    ev: &CollisionEvent,
    delta: f64,
    t: u64,
    first_seen: &mut BTreeMap<SingularitySource, u64>,
) {
    // Near-tangential passes of the flight against any disc of the cells
    // it crosses.
    walk_cells(ev.from.q, ev.from.v, 0.0, ev.tau, |cell, ct0, ct1| {
        let cfg = world.config_at(cell);
        let off = Vec2::new(cell.x as f64, cell.y as f64);
        for (di, d) in cfg.discs().iter().enumerate() {
            let c = Point::new(d.center.x + off.x, d.center.y + off.y);
            let oc = ev.from.q - c;
            let tstar = -oc.dot(ev.from.v.as_vec());
            if tstar < ct0 || tstar > ct1 {
                continue;
            }
            let closest = ev.from.q.offset(ev.from.v.as_vec().scale(tstar));
            let miss = closest.dist(c) - d.radius;
            if miss.abs() <= delta {
                // The tangency must belong to a visible piece of the circle.
                let local = Point::new(closest.x - off.x, closest.y - off.y);
                if (0.0..=1.0).contains(&local.x) && (0.0..=1.0).contains(&local.y) {
                    let side = oc.cross(ev.from.v.as_vec()) > 0.0;
                    first_seen
                        .entry(SingularitySource::Tangency {
                            cell,
                            disc: di,
                            positive_side: side,
                        })
                        .or_insert(t);
                }
            }
        }
    });
    // Collisions within delta (arclength) of an arc endpoint.
    let arc = &world.config_at(ev.to.cell).arcs()[ev.to.arc];
    let theta = arc.angle_of(Point::new(
        ev.to.q.x - ev.to.cell.x as f64,
        ev.to.q.y - ev.to.cell.y as f64,
    ));
    if !arc.is_full_circle() {
        let d = arc.arc_dist_to_endpoint(theta);
        if d <= delta {
            let off = arc.angle_offset(theta);
            first_seen
                .entry(SingularitySource::Corner {
                    cell: ev.to.cell,
                    arc: ev.to.arc,
                    far_end: off > 0.5 * arc.span,
                })
                .or_insert(t);
        }
    }
}

/// Pushforward check of the invariant measure on a torus-wrapped world:
/// sample mu over the fundamental domain, apply `T` `iterations` times, and
/// compare the final angle marginal and per-arc occupations against the
/// invariant law.
#[derive(Debug, Clone, PartialEq)]
pub struct MuPushforward {
    /// KS distance of the final `phi` sample to the `(1 + sin phi)/2` law.
    pub ks_phi: f64,
    pub surviving: usize,
    pub dropped: usize,
    /// Per (cell, arc): observed hits, expected fraction of arclength.
    pub occupancy: Vec<((CellIndex, usize), u64, f64)>,
}

pub fn mu_pushforward(
    world: &World,
    cells: &[CellIndex],
    n: usize,
    iterations: usize,
    seed: u64,
    guards: Guards,
) -> Result<MuPushforward, EmptyBoundary> {
    let sampler = MuSampler::new(world, cells)?;
    let mut phis = Vec::with_capacity(n);
    let mut occupancy: BTreeMap<(CellIndex, usize), u64> = BTreeMap::new();
    let mut dropped = 0usize;
    'outer: for i in 0..n as u64 {
        let mut x = sampler.sample(world, seed, i);
        for _ in 0..iterations {
            match dynamics::billiard_map(world, &x, guards) {
                Ok(next) => x = next,
                Err(StepError::GuardExceeded { .. }) | Err(StepError::WallHit { .. }) => {
                    dropped += 1;
                    continue 'outer;
                }
                Err(StepError::Singular { .. }) => {
                    dropped += 1;
                    continue 'outer;
                }
            }
        }
        phis.push(x.phi(world));
        *occupancy.entry((world.fold(x.cell), x.arc)).or_insert(0) += 1;
    }
    let ks_phi = stats::ks_statistic(&phis, |phi| 0.5 * (1.0 + phi.sin()));
    let total = sampler.total_length();
    let occupancy = sampler
        .entries()
        .map(|(key, len)| {
            let hits = occupancy.get(&key).copied().unwrap_or(0);
            (key, hits, len / total)
        })
        .collect();
    Ok(MuPushforward {
        ks_phi,
        surviving: phis.len(),
        dropped,
        occupancy,
    })
}
