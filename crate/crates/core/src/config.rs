//! Single-cell scatterer configurations and the cell catalog.
//!
//! A cell is the unit square with gates (open boundary segments shared by
//! every configuration in a catalog) and a scatterer built as a union of
//! discs. Disc centers may lie outside the square; what counts is the part
//! of each circle that survives clipping against the cell and against the
//! other discs. Validation covers: smooth pieces meeting only at endpoints,
//! gates untouched by scatterers, curvature within bounds, and transversal
//! (non-zero angle) meetings.
//!
//! The blocking property, "every straight chord entering through a gate
//! meets a scatterer before leaving", is not decided symbolically: it is
//! sampled over a dense family of entering chords and certified only when
//! every sampled penetration dominates the sampling gap, so refining the
//! sweep can never overturn a blocking verdict.

use alloc::vec::Vec;

// Inherent float methods cover this when std is linked (tests); the trait
// provides them in the no_std build.
#[allow(unused_imports)]
use num_traits::Float;
use crate::angles::{AngularSet, UnitIntervalSet};
use crate::geometry::{ArcPiece, Point, UnitVector, Vec2, WallSegment};
use crate::world::WorldKind;

/// Minimum meeting angle between boundary curves, radians.
pub const EPS_ANGLE: f64 = 1e-3;

/// Clearance band for the blocking/shadowing verdicts, cell units.
pub const EPS_CLEAR: f64 = 1e-6;

/// Disc radius bounds: curvature `1/r` stays in `[1, 1/R_MIN]`.
pub const R_MIN: f64 = 0.05;
pub const R_MAX: f64 = 1.0;

/// Configuration identifier; catalog indices are 1-based, blocking first.
pub type ConfigId = u32;

/// One side of the unit cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
            Side::Bottom => Side::Top,
            Side::Top => Side::Bottom,
        }
    }

    /// Point on the side at coordinate `u` in `[0, 1]` (y for vertical
    /// sides, x for horizontal ones), in cell-local coordinates.
    pub fn point_at(self, u: f64) -> Point {
        match self {
            Side::Left => Point::new(0.0, u),
            Side::Right => Point::new(1.0, u),
            Side::Bottom => Point::new(u, 0.0),
            Side::Top => Point::new(u, 1.0),
        }
    }

    /// Inward unit normal.
    pub fn inward_normal(self) -> UnitVector {
        match self {
            Side::Left => UnitVector::new(Vec2::new(1.0, 0.0)),
            Side::Right => UnitVector::new(Vec2::new(-1.0, 0.0)),
            Side::Bottom => UnitVector::new(Vec2::new(0.0, 1.0)),
            Side::Top => UnitVector::new(Vec2::new(0.0, -1.0)),
        }
    }
}

/// An open gate interval `(lo, hi)` along one side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateSpec {
    pub side: Side,
    pub lo: f64,
    pub hi: f64,
}

impl GateSpec {
    pub fn new(side: Side, lo: f64, hi: f64) -> GateSpec {
        GateSpec { side, lo, hi }
    }

    /// Full-side gate used by unvalidated test rigs.
    pub fn full(side: Side) -> GateSpec {
        GateSpec {
            side,
            lo: 0.0,
            hi: 1.0,
        }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, u: f64) -> bool {
        u > self.lo && u < self.hi
    }

    /// Distance from `u` to the nearer gate endpoint (negative outside).
    pub fn edge_margin(&self, u: f64) -> f64 {
        (u - self.lo).min(self.hi - u)
    }
}

/// A scatterer disc; the billiard domain is the outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc {
    pub center: Point,
    pub radius: f64,
}

impl Disc {
    pub const fn new(cx: f64, cy: f64, r: f64) -> Disc {
        Disc {
            center: Point::new(cx, cy),
            radius: r,
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.dist(self.center) <= self.radius
    }

    /// Signed depth of `p` inside the disc (positive inside).
    pub fn depth(&self, p: Point) -> f64 {
        self.radius - p.dist(self.center)
    }
}

/// Violations of the static cell hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// Two boundary circles coincide, so arcs overlap along a sub-arc.
    A1Violation { disc_a: usize, disc_b: usize },
    /// A gate intersects the scatterer.
    A2Violation { side: Side, disc: usize },
    /// Disc radius outside `[R_MIN, R_MAX]`.
    A3Violation { disc: usize, radius: f64 },
    /// Boundary curves meet at an angle below `EPS_ANGLE` (tangent discs,
    /// or a circle grazing the cell boundary).
    A4Violation { what: MeetingKind },
    NoDiscs,
    BadGate { side: Side },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeetingKind {
    DiscDisc { disc_a: usize, disc_b: usize },
    DiscSide { disc: usize, side: Side },
}

impl core::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ConfigError::A1Violation { disc_a, disc_b } => write!(
                f,
                "A1 violation: discs {disc_a} and {disc_b} share a boundary sub-arc"
            ),
            ConfigError::A2Violation { side, disc } => {
                write!(f, "A2 violation: gate on {side:?} intersects disc {disc}")
            }
            ConfigError::A3Violation { disc, radius } => write!(
                f,
                "A3 violation: disc {disc} radius {radius} outside [{R_MIN}, {R_MAX}]"
            ),
            ConfigError::A4Violation { what } => {
                write!(f, "A4 violation: near-tangential meeting {what:?}")
            }
            ConfigError::NoDiscs => write!(f, "configuration has no discs"),
            ConfigError::BadGate { side } => write!(f, "malformed gate on {side:?}"),
        }
    }
}

/// One cell's scatterer configuration: raw discs, the derived visible arcs
/// and wall segments, the gates, and the blocking tag.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalConfiguration {
    pub id: ConfigId,
    discs: Vec<Disc>,
    arcs: Vec<ArcPiece>,
    /// Owning disc of each arc, parallel to `arcs`.
    arc_disc: Vec<usize>,
    walls: Vec<WallSegment>,
    gates: Vec<GateSpec>,
    pub blocking: bool,
}

impl LocalConfiguration {
    pub fn discs(&self) -> &[Disc] {
        &self.discs
    }

    pub fn arcs(&self) -> &[ArcPiece] {
        &self.arcs
    }

    pub fn arc_owner(&self, arc_index: usize) -> usize {
        self.arc_disc[arc_index]
    }

    pub fn walls(&self) -> &[WallSegment] {
        &self.walls
    }

    pub fn gates(&self) -> &[GateSpec] {
        &self.gates
    }

    pub fn gate_on(&self, side: Side) -> Option<&GateSpec> {
        self.gates.iter().find(|g| g.side == side)
    }

    pub fn total_arc_length(&self) -> f64 {
        self.arcs.iter().map(|a| a.arc_length()).sum()
    }

    /// Builds without any hypothesis checks; for test rigs and synthetic
    /// worlds (e.g. bare central-disc cells with full-side gates).
    pub fn unchecked(
        id: ConfigId,
        discs: Vec<Disc>,
        gates: Vec<GateSpec>,
        blocking: bool,
    ) -> LocalConfiguration {
        let (arcs, arc_disc) = clip_arcs(&discs);
        let walls = derive_walls(&discs, &gates);
        LocalConfiguration {
            id,
            discs,
            arcs,
            arc_disc,
            walls,
            gates,
            blocking,
        }
    }
}

/// Builds and validates a configuration against (A1)-(A4).
///
/// The blocking flag is stored as claimed; `check_blocking` verifies it
/// separately (and the catalog validation pipeline insists they agree).
pub fn build_local_config(
    id: ConfigId,
    discs: Vec<Disc>,
    gates: Vec<GateSpec>,
    blocking_claim: bool,
) -> Result<LocalConfiguration, ConfigError> {
    if discs.is_empty() {
        return Err(ConfigError::NoDiscs);
    }
    for g in &gates {
        if !(g.lo >= 0.0 && g.lo < g.hi && g.hi <= 1.0 && g.len() > EPS_ANGLE) {
            return Err(ConfigError::BadGate { side: g.side });
        }
    }
    for (i, d) in discs.iter().enumerate() {
        if !(R_MIN..=R_MAX).contains(&d.radius) {
            return Err(ConfigError::A3Violation {
                disc: i,
                radius: d.radius,
            });
        }
    }

    // Pairwise circle relations: coincidence is an A1 violation, tangency
    // (internal or external) an A4 violation, transversal crossings must
    // open at an angle of at least EPS_ANGLE.
    for i in 0..discs.len() {
        for j in (i + 1)..discs.len() {
            let (a, b) = (&discs[i], &discs[j]);
            let d = a.center.dist(b.center);
            if d <= 1e-12 && (a.radius - b.radius).abs() <= 1e-12 {
                return Err(ConfigError::A1Violation {
                    disc_a: i,
                    disc_b: j,
                });
            }
            let (rsum, rdiff) = (a.radius + b.radius, (a.radius - b.radius).abs());
            if d < rsum && d > rdiff {
                // Crossing angle between the circles equals the angle
                // between the two radius vectors at the crossing point.
                let cosg = (a.radius * a.radius + b.radius * b.radius - d * d)
                    / (2.0 * a.radius * b.radius);
                if cosg.abs() > EPS_ANGLE.cos() {
                    return Err(ConfigError::A4Violation {
                        what: MeetingKind::DiscDisc {
                            disc_a: i,
                            disc_b: j,
                        },
                    });
                }
            } else if (d - rsum).abs() <= 1e-9 || (d - rdiff).abs() <= 1e-9 {
                return Err(ConfigError::A4Violation {
                    what: MeetingKind::DiscDisc {
                        disc_a: i,
                        disc_b: j,
                    },
                });
            }
        }
    }

    // Circle-vs-cell-side meetings: a circle crossing a side of the square
    // meets it at angle acos(h/r) where h is the center-to-line distance;
    // near-tangential crossings (h close to r) are rejected.
    for (i, disc) in discs.iter().enumerate() {
        for side in Side::ALL {
            let (h, crosses) = side_distance_and_crossing(disc, side);
            if crosses && h / disc.radius > EPS_ANGLE.cos() {
                return Err(ConfigError::A4Violation {
                    what: MeetingKind::DiscSide { disc: i, side },
                });
            }
        }
    }

    // Gates must not meet the scatterer: no disc shadow on a side may
    // overlap the open gate interval.
    for g in &gates {
        for (i, disc) in discs.iter().enumerate() {
            if let Some((lo, hi)) = side_shadow(disc, g.side) {
                let overlap = hi.min(g.hi) - lo.max(g.lo);
                if overlap > 1e-9 {
                    return Err(ConfigError::A2Violation { side: g.side, disc: i });
                }
            }
        }
    }

    Ok(LocalConfiguration::unchecked(id, discs, gates, blocking_claim))
}

/// Distance from a disc center to the line carrying `side`, plus whether the
/// circle crosses that side within the unit interval.
fn side_distance_and_crossing(disc: &Disc, side: Side) -> (f64, bool) {
    let (h, along) = match side {
        Side::Left => (disc.center.x.abs(), disc.center.y),
        Side::Right => ((disc.center.x - 1.0).abs(), disc.center.y),
        Side::Bottom => (disc.center.y.abs(), disc.center.x),
        Side::Top => ((disc.center.y - 1.0).abs(), disc.center.x),
    };
    if h >= disc.radius {
        return (h, false);
    }
    let w = (disc.radius * disc.radius - h * h).sqrt();
    let (lo, hi) = (along - w, along + w);
    (h, hi > 0.0 && lo < 1.0)
}

/// Interval of `side` covered by the closed disc, if any.
fn side_shadow(disc: &Disc, side: Side) -> Option<(f64, f64)> {
    let (h, along) = match side {
        Side::Left => (disc.center.x, disc.center.y),
        Side::Right => (disc.center.x - 1.0, disc.center.y),
        Side::Bottom => (disc.center.y, disc.center.x),
        Side::Top => (disc.center.y - 1.0, disc.center.x),
    };
    if h.abs() > disc.radius {
        return None;
    }
    let w = (disc.radius * disc.radius - h * h).sqrt();
    let (lo, hi) = ((along - w).max(0.0), (along + w).min(1.0));
    if hi <= lo {
        return None;
    }
    Some((lo, hi))
}

/// Clips every disc circle against the cell square and the other discs,
/// returning the visible arcs and their owning disc indices.
fn clip_arcs(discs: &[Disc]) -> (Vec<ArcPiece>, Vec<usize>) {
    let tau = core::f64::consts::TAU;
    let mut arcs = Vec::new();
    let mut owners = Vec::new();
    for (i, disc) in discs.iter().enumerate() {
        let mut set = AngularSet::full();
        let (cx, cy, r) = (disc.center.x, disc.center.y, disc.radius);

        // Outside-the-cell exclusions: for each half-plane constraint the
        // violating set is one angular interval.
        // x(t) = cx + r cos t < 0  <=>  cos t < -cx / r.
        subtract_cos_below(&mut set, -cx / r);
        // x(t) > 1  <=>  cos t > (1 - cx) / r.
        subtract_cos_above(&mut set, (1.0 - cx) / r);
        // y(t) < 0  <=>  sin t < -cy / r.
        subtract_sin_below(&mut set, -cy / r);
        // y(t) > 1  <=>  sin t > (1 - cy) / r.
        subtract_sin_above(&mut set, (1.0 - cy) / r);

        // Portions strictly inside other discs.
        for (j, other) in discs.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = disc.center.dist(other.center);
            if d >= r + other.radius {
                continue; // disjoint
            }
            if d + r <= other.radius {
                set = AngularSet::empty(); // fully swallowed
                break;
            }
            if d + other.radius <= r || d <= 1e-12 {
                continue; // the other disc is inside this one
            }
            // Angular half-width of the covered cap on circle i.
            let cosa = (d * d + r * r - other.radius * other.radius) / (2.0 * d * r);
            let alpha = cosa.clamp(-1.0, 1.0).acos();
            let dir = other.center - disc.center;
            let phi = dir.y.atan2(dir.x);
            set.subtract(phi - alpha, 2.0 * alpha);
        }

        set.prune(1e-12 / r);
        let mut ivals: Vec<(f64, f64)> = set.intervals().collect();
        // Merge a pair of intervals contiguous through the wrap point.
        if ivals.len() >= 2 {
            let first = ivals[0];
            let last = *ivals.last().unwrap();
            if first.0 <= 1e-12 && (last.0 + last.1 - tau).abs() <= 1e-12 {
                ivals[0] = (last.0, last.1 + first.1);
                ivals.pop();
            }
        }
        for (start, span) in ivals {
            arcs.push(ArcPiece::new(disc.center, r, start, span));
            owners.push(i);
        }
    }
    (arcs, owners)
}

// cos t < u on the circle: the excluded interval is (acos(u), 2pi - acos(u)).
fn subtract_cos_below(set: &mut AngularSet, u: f64) {
    if u <= -1.0 {
        return;
    }
    if u >= 1.0 {
        set.subtract(0.0, core::f64::consts::TAU);
        return;
    }
    let a = u.acos();
    set.subtract(a, core::f64::consts::TAU - 2.0 * a);
}

// cos t > u: excluded interval is (-acos(u), acos(u)).
fn subtract_cos_above(set: &mut AngularSet, u: f64) {
    if u >= 1.0 {
        return;
    }
    if u <= -1.0 {
        set.subtract(0.0, core::f64::consts::TAU);
        return;
    }
    let a = u.acos();
    set.subtract(-a, 2.0 * a);
}

// sin t < u: excluded interval is (pi - asin(u), asin(u) + 2pi).
fn subtract_sin_below(set: &mut AngularSet, u: f64) {
    if u <= -1.0 {
        return;
    }
    if u >= 1.0 {
        set.subtract(0.0, core::f64::consts::TAU);
        return;
    }
    let a = u.asin();
    let lo = core::f64::consts::PI - a;
    let hi = a + core::f64::consts::TAU;
    set.subtract(lo, hi - lo);
}

// sin t > u: excluded interval is (asin(u), pi - asin(u)).
fn subtract_sin_above(set: &mut AngularSet, u: f64) {
    if u >= 1.0 {
        return;
    }
    if u <= -1.0 {
        set.subtract(0.0, core::f64::consts::TAU);
        return;
    }
    let a = u.asin();
    set.subtract(a, core::f64::consts::PI - 2.0 * a);
}

/// Decomposes each side of the cell into wall segments: non-gate stretches,
/// tagged by whether discs cover them from inside the cell.
fn derive_walls(discs: &[Disc], gates: &[GateSpec]) -> Vec<WallSegment> {
    let mut walls = Vec::new();
    for side in Side::ALL {
        let mut non_gate = UnitIntervalSet::full();
        for g in gates.iter().filter(|g| g.side == side) {
            non_gate.remove(g.lo, g.hi);
        }
        let mut covered = UnitIntervalSet::new();
        for d in discs {
            if let Some((lo, hi)) = side_shadow(d, side) {
                covered.insert(lo, hi);
            }
        }
        for &(a, b) in non_gate.intervals() {
            // Covered sub-intervals...
            let mut cov = covered.clone();
            cov.remove(0.0, a);
            cov.remove(b, 1.0);
            let mut bare = UnitIntervalSet::new();
            bare.insert(a, b);
            for &(ca, cb) in cov.intervals() {
                bare.remove(ca, cb);
                if cb - ca > 1e-9 {
                    walls.push(WallSegment {
                        a: side.point_at(ca),
                        b: side.point_at(cb),
                        covered: true,
                    });
                }
            }
            // ...and what remains is bare boundary.
            for &(ba, bb) in bare.intervals() {
                if bb - ba > 1e-9 {
                    walls.push(WallSegment {
                        a: side.point_at(ba),
                        b: side.point_at(bb),
                        covered: false,
                    });
                }
            }
        }
    }
    walls
}

/// Distance from point `c` to the segment `[a, b]`.
fn segment_distance(a: Point, b: Point, c: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 <= 0.0 {
        return a.dist(c);
    }
    let t = ((c - a).dot(ab) / len2).clamp(0.0, 1.0);
    a.offset(ab.scale(t)).dist(c)
}

/// First exit of the ray `origin + t dir` from the unit square, for an
/// origin inside (or on the boundary moving inward).
fn cell_exit(origin: Point, dir: UnitVector) -> (f64, Side, f64) {
    let mut best = (f64::INFINITY, Side::Left, 0.0);
    let (dx, dy) = (dir.x(), dir.y());
    if dx > 0.0 {
        let t = (1.0 - origin.x) / dx;
        if t < best.0 {
            best = (t, Side::Right, origin.y + t * dy);
        }
    } else if dx < 0.0 {
        let t = -origin.x / dx;
        if t < best.0 {
            best = (t, Side::Left, origin.y + t * dy);
        }
    }
    if dy > 0.0 {
        let t = (1.0 - origin.y) / dy;
        if t < best.0 {
            best = (t, Side::Top, origin.x + t * dx);
        }
    } else if dy < 0.0 {
        let t = -origin.y / dy;
        if t < best.0 {
            best = (t, Side::Bottom, origin.x + t * dx);
        }
    }
    best
}

/// A gate-to-gate chord certifying a non-blocking cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChordWitness {
    pub origin: Point,
    pub dir: UnitVector,
    pub exit: Point,
}

/// Verdict of the blocking sweep. `Inconclusive` is a value, not an
/// error: some sampled chord sat inside the `EPS_CLEAR` band, or the
/// blocked margins were too shallow to dominate the sampling gap.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockingVerdict {
    /// Every sampled entering chord penetrates a disc by more than
    /// `EPS_CLEAR` plus the inter-sample gap; `margin` is the minimum
    /// penetration observed.
    Blocking { margin: f64 },
    /// Some chord crosses the cell gate-to-gate with clearance above
    /// `EPS_CLEAR` from every disc.
    NonBlocking { witness: ChordWitness, clearance: f64 },
    Inconclusive { min_clearance: f64 },
}

impl BlockingVerdict {
    pub fn is_blocking(&self) -> bool {
        matches!(self, BlockingVerdict::Blocking { .. })
    }

    pub fn is_non_blocking(&self) -> bool {
        matches!(self, BlockingVerdict::NonBlocking { .. })
    }
}

/// Samples `n_angles x n_offsets` directed chords entering through each
/// gate and decides whether every entering chord must collide.
///
/// Chords are scored by their signed clearance: the minimum over discs of
/// (distance from the disc center to the chord segment, up to its cell
/// exit) minus the radius. A blocking verdict additionally requires every
/// penetration to exceed `EPS_CLEAR` plus half the sampling spacing, which
/// makes the verdict stable under sweep refinement.
pub fn check_blocking(
    cfg: &LocalConfiguration,
    n_angles: usize,
    n_offsets: usize,
) -> BlockingVerdict {
    assert!(n_angles > 0 && n_offsets > 0);
    let mut min_pen = f64::INFINITY;
    let mut min_abs_clear = f64::INFINITY;
    let mut witness: Option<(ChordWitness, f64)> = None;
    let mut any_marginal = false;
    // A "leak" is a free chord ending on a non-gate boundary point (bare
    // wall, or a gate-edge graze): it rules out a blocking certificate but
    // is not itself evidence of a gate-to-gate corridor.
    let mut any_leak = false;
    let mut max_gate_len: f64 = 0.0;

    for gate in cfg.gates() {
        max_gate_len = max_gate_len.max(gate.len());
        let inward = gate.side.inward_normal();
        for io in 0..n_offsets {
            let u = gate.lo + gate.len() * (io as f64 + 0.5) / n_offsets as f64;
            let origin = gate.side.point_at(u);
            for ia in 0..n_angles {
                let theta = -core::f64::consts::FRAC_PI_2
                    + core::f64::consts::PI * (ia as f64 + 0.5) / n_angles as f64;
                let dir = inward.rotate(theta);
                let (t_exit, exit_side, exit_u) = cell_exit(origin, dir);
                let exit = origin.offset(dir.as_vec().scale(t_exit));

                let mut clearance = f64::INFINITY;
                for d in cfg.discs() {
                    clearance =
                        clearance.min(segment_distance(origin, exit, d.center) - d.radius);
                }
                min_abs_clear = min_abs_clear.min(clearance.abs());

                if clearance < -EPS_CLEAR {
                    min_pen = min_pen.min(-clearance);
                    continue;
                }
                if clearance <= EPS_CLEAR {
                    any_marginal = true;
                    continue;
                }
                let gate_exit = cfg
                    .gate_on(exit_side)
                    .map(|g| g.edge_margin(exit_u))
                    .unwrap_or(f64::NEG_INFINITY);
                if gate_exit > EPS_CLEAR {
                    let w = ChordWitness { origin, dir, exit };
                    if witness.as_ref().is_none_or(|&(_, c)| clearance > c) {
                        witness = Some((w, clearance));
                    }
                } else {
                    any_leak = true;
                }
            }
        }
    }

    if any_marginal {
        return BlockingVerdict::Inconclusive {
            min_clearance: min_abs_clear,
        };
    }
    if let Some((w, clearance)) = witness {
        return BlockingVerdict::NonBlocking {
            witness: w,
            clearance,
        };
    }
    // No witness and nothing marginal. Certify blocking only when every
    // chord hit an arc and the margins dominate the sampling gap: a chord
    // between samples differs from its nearest sampled neighbor by at most
    // half an offset step plus (cell diameter) times half an angle step,
    // in sup distance, so deep penetrations cannot hide a corridor.
    let gap = 0.5 * max_gate_len / n_offsets as f64
        + 0.5 * core::f64::consts::SQRT_2 * core::f64::consts::PI / n_angles as f64;
    if !any_leak && min_pen > EPS_CLEAR + gap {
        BlockingVerdict::Blocking { margin: min_pen }
    } else {
        BlockingVerdict::Inconclusive {
            min_clearance: min_abs_clear,
        }
    }
}

/// How an unreachable-wall violation was observed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShadowWitness {
    /// A straight chord from a gate reaches the wall point unobstructed.
    FromGate { gate_side: Side, exit: Point },
    /// A straight chord from an arc point reaches the wall point.
    FromArc { arc_point: Point },
    /// The wall point's scatterer cover is thinner than `EPS_CLEAR`.
    MarginalCover,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShadowVerdict {
    /// No sampled wall point is reachable; `vacuous` when the cell has no
    /// wall segments at all. `min_margin` is the thinnest observed cover.
    Shadowed { vacuous: bool, min_margin: f64 },
    NotShadowed {
        wall_point: Point,
        witness: ShadowWitness,
    },
}

impl ShadowVerdict {
    pub fn is_shadowed(&self) -> bool {
        matches!(self, ShadowVerdict::Shadowed { .. })
    }
}

/// Verifies by sampling that no straight chord from a gate or from an arc
/// reaches a wall segment before meeting an arc.
///
/// Wall points buried inside the disc union are shielded: any chord to them
/// crosses the union boundary (a visible arc) first, with margin equal to
/// the burial depth. Bare wall points are probed with a fan of reverse rays;
/// the first free sight-line to a gate or to an arc is returned as the
/// witness.
pub fn check_shadowing(cfg: &LocalConfiguration, n_samples: usize) -> ShadowVerdict {
    if cfg.walls().is_empty() {
        return ShadowVerdict::Shadowed {
            vacuous: true,
            min_margin: f64::INFINITY,
        };
    }
    let total_len: f64 = cfg
        .walls()
        .iter()
        .map(|w| w.a.dist(w.b))
        .sum::<f64>()
        .max(1e-12);
    let n_dirs = 64usize;
    let mut min_margin = f64::INFINITY;

    for wall in cfg.walls() {
        let len = wall.a.dist(wall.b);
        let n_here = ((n_samples as f64 * len / total_len).ceil() as usize).max(3);
        for i in 0..n_here {
            let s = (i as f64 + 0.5) / n_here as f64;
            let w = wall.a.offset((wall.b - wall.a).scale(s));
            let depth = cfg
                .discs()
                .iter()
                .map(|d| d.depth(w))
                .fold(f64::NEG_INFINITY, f64::max);
            if depth > EPS_CLEAR {
                min_margin = min_margin.min(depth);
                continue;
            }
            if depth > 0.0 {
                return ShadowVerdict::NotShadowed {
                    wall_point: w,
                    witness: ShadowWitness::MarginalCover,
                };
            }
            // Bare wall point: fan reverse rays into the cell; any free
            // sight-line to a gate or an arc is a violation.
            let side = wall_side(wall);
            let inward = side.inward_normal();
            for k in 0..n_dirs {
                let theta = -core::f64::consts::FRAC_PI_2 + core::f64::consts::PI
                    * (k as f64 + 0.5)
                    / n_dirs as f64;
                let dir = inward.rotate(theta);
                let (t_exit, exit_side, exit_u) = cell_exit(w, dir);
                // First entry into the disc union along the ray.
                let mut t_enter = f64::INFINITY;
                for d in cfg.discs() {
                    let oc = w - d.center;
                    let b = oc.dot(dir.as_vec());
                    let c0 = oc.dot(oc) - d.radius * d.radius;
                    let disc = b * b - c0;
                    if disc > 0.0 {
                        let t = -b - disc.sqrt();
                        if t > 1e-9 {
                            t_enter = t_enter.min(t);
                        }
                    }
                }
                if t_enter < t_exit {
                    return ShadowVerdict::NotShadowed {
                        wall_point: w,
                        witness: ShadowWitness::FromArc {
                            arc_point: w.offset(dir.as_vec().scale(t_enter)),
                        },
                    };
                }
                if let Some(g) = cfg.gate_on(exit_side) {
                    if g.edge_margin(exit_u) > EPS_CLEAR {
                        return ShadowVerdict::NotShadowed {
                            wall_point: w,
                            witness: ShadowWitness::FromGate {
                                gate_side: exit_side,
                                exit: side_point(exit_side, exit_u),
                            },
                        };
                    }
                }
            }
        }
    }
    ShadowVerdict::Shadowed {
        vacuous: false,
        min_margin,
    }
}

fn side_point(side: Side, u: f64) -> Point {
    side.point_at(u)
}

fn wall_side(w: &WallSegment) -> Side {
    if (w.a.x - w.b.x).abs() < 1e-12 {
        if w.a.x < 0.5 {
            Side::Left
        } else {
            Side::Right
        }
    } else if w.a.y < 0.5 {
        Side::Bottom
    } else {
        Side::Top
    }
}

/// Catalog construction failures.
#[derive(Debug, Clone, PartialEq)]
pub enum CatalogError {
    Empty,
    /// Cell ids must be 1..=m in order.
    BadId { position: usize, id: ConfigId },
    /// Blocking cells must form the prefix 1..=m'.
    BadOrdering { id: ConfigId },
    /// Need at least one blocking and one non-blocking configuration.
    Degenerate,
    /// All cells must share the catalog's congruent gates.
    GateMismatch { id: ConfigId },
    /// Gate structure does not match the kind (tube: left/right pair;
    /// gas: two congruent opposite pairs).
    KindMismatch,
}

impl core::fmt::Display for CatalogError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CatalogError::Empty => write!(f, "catalog has no cells"),
            CatalogError::BadId { position, id } => {
                write!(f, "cell at position {position} has id {id}, expected {}", position + 1)
            }
            CatalogError::BadOrdering { id } => {
                write!(f, "blocking cell {id} appears after a non-blocking one")
            }
            CatalogError::Degenerate => {
                write!(f, "catalog needs at least one blocking and one non-blocking cell")
            }
            CatalogError::GateMismatch { id } => {
                write!(f, "cell {id} does not share the catalog gates")
            }
            CatalogError::KindMismatch => write!(f, "gate structure does not match the kind"),
        }
    }
}

/// The ordered configuration catalog: blocking cells first (ids 1..=m'),
/// then non-blocking (ids m'+1..=m), all sharing congruent gates.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    kind: WorldKind,
    cells: Vec<LocalConfiguration>,
    m_prime: usize,
}

impl Catalog {
    pub fn new(kind: WorldKind, cells: Vec<LocalConfiguration>) -> Result<Catalog, CatalogError> {
        if cells.is_empty() {
            return Err(CatalogError::Empty);
        }
        for (pos, c) in cells.iter().enumerate() {
            if c.id != (pos + 1) as ConfigId {
                return Err(CatalogError::BadId {
                    position: pos,
                    id: c.id,
                });
            }
        }
        let m_prime = cells.iter().take_while(|c| c.blocking).count();
        if cells.iter().skip(m_prime).any(|c| c.blocking) {
            let id = cells.iter().skip(m_prime).find(|c| c.blocking).unwrap().id;
            return Err(CatalogError::BadOrdering { id });
        }
        if m_prime == 0 || m_prime == cells.len() {
            return Err(CatalogError::Degenerate);
        }
        let reference = cells[0].gates().to_vec();
        check_gate_structure(kind, &reference)?;
        for c in &cells[1..] {
            if !gates_congruent(c.gates(), &reference) {
                return Err(CatalogError::GateMismatch { id: c.id });
            }
        }
        Ok(Catalog {
            kind,
            cells,
            m_prime,
        })
    }

    pub fn kind(&self) -> WorldKind {
        self.kind
    }

    /// Total number of configurations, `m`.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Number of blocking configurations, `m'`.
    pub fn m_prime(&self) -> usize {
        self.m_prime
    }

    pub fn cell(&self, id: ConfigId) -> &LocalConfiguration {
        &self.cells[(id - 1) as usize]
    }

    pub fn cells(&self) -> &[LocalConfiguration] {
        &self.cells
    }

    pub fn is_blocking(&self, id: ConfigId) -> bool {
        id as usize <= self.m_prime
    }

    /// The shared gate set (every cell's gates are congruent to this).
    pub fn gates(&self) -> &[GateSpec] {
        self.cells[0].gates()
    }
}

fn gates_congruent(a: &[GateSpec], b: &[GateSpec]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    for ga in a {
        let Some(gb) = b.iter().find(|g| g.side == ga.side) else {
            return false;
        };
        if (ga.lo - gb.lo).abs() > 1e-12 || (ga.hi - gb.hi).abs() > 1e-12 {
            return false;
        }
    }
    true
}

fn check_gate_structure(kind: WorldKind, gates: &[GateSpec]) -> Result<(), CatalogError> {
    let find = |side| gates.iter().find(|g| g.side == side);
    match kind {
        WorldKind::Tube => {
            if gates.len() != 2 {
                return Err(CatalogError::KindMismatch);
            }
            let (Some(l), Some(r)) = (find(Side::Left), find(Side::Right)) else {
                return Err(CatalogError::KindMismatch);
            };
            if (l.lo - r.lo).abs() > 1e-12 || (l.hi - r.hi).abs() > 1e-12 {
                return Err(CatalogError::KindMismatch);
            }
        }
        WorldKind::Gas => {
            if gates.len() != 4 {
                return Err(CatalogError::KindMismatch);
            }
            for (a, b) in [(Side::Left, Side::Right), (Side::Bottom, Side::Top)] {
                let (Some(ga), Some(gb)) = (find(a), find(b)) else {
                    return Err(CatalogError::KindMismatch);
                };
                if (ga.lo - gb.lo).abs() > 1e-12 || (ga.hi - gb.hi).abs() > 1e-12 {
                    return Err(CatalogError::KindMismatch);
                }
            }
        }
    }
    Ok(())
}

/// Per-cell validation outcome produced by [`validate_catalog`].
#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub id: ConfigId,
    pub claimed_blocking: bool,
    pub blocking: BlockingVerdict,
    pub shadowing: ShadowVerdict,
}

impl CellReport {
    /// Verdict matches the claim, nothing inconclusive, walls shadowed.
    pub fn ok(&self) -> bool {
        let verdict_ok = matches!(
            (&self.blocking, self.claimed_blocking),
            (BlockingVerdict::Blocking { .. }, true)
                | (BlockingVerdict::NonBlocking { .. }, false)
        );
        verdict_ok && self.shadowing.is_shadowed()
    }
}

/// Runs the blocking sweep and the shadowing check on every catalog cell.
/// The build pipeline refuses a catalog whose reports are not all ok.
pub fn validate_catalog(
    catalog: &Catalog,
    n_angles: usize,
    n_offsets: usize,
    n_shadow: usize,
) -> Vec<CellReport> {
    catalog
        .cells()
        .iter()
        .map(|c| CellReport {
            id: c.id,
            claimed_blocking: c.blocking,
            blocking: check_blocking(c, n_angles, n_offsets),
            shadowing: check_shadowing(c, n_shadow),
        })
        .collect()
}

/// The tube catalog shipped with the repo: gates at (0.3, 0.7) on both
/// vertical sides; cell 1 blocks every entering chord (corner, edge-midpoint
/// and central discs), cell 2 leaves a straight horizontal corridor of
/// width 0.4 through the gates.
pub fn canonical_tube_catalog() -> Catalog {
    let gates = alloc::vec![
        GateSpec::new(Side::Left, 0.3, 0.7),
        GateSpec::new(Side::Right, 0.3, 0.7),
    ];
    let blocking = build_local_config(
        1,
        alloc::vec![
            Disc::new(0.0, 0.0, 0.3),
            Disc::new(1.0, 0.0, 0.3),
            Disc::new(0.0, 1.0, 0.3),
            Disc::new(1.0, 1.0, 0.3),
            Disc::new(0.5, 0.0, 0.25),
            Disc::new(0.5, 1.0, 0.25),
            Disc::new(0.5, 0.5, 0.24),
        ],
        gates.clone(),
        true,
    )
    .expect("canonical tube blocking cell is valid");
    let non_blocking = build_local_config(
        2,
        alloc::vec![
            Disc::new(0.0, 0.0, 0.3),
            Disc::new(1.0, 0.0, 0.3),
            Disc::new(0.0, 1.0, 0.3),
            Disc::new(1.0, 1.0, 0.3),
            Disc::new(0.5, 0.0, 0.28),
            Disc::new(0.5, 1.0, 0.28),
        ],
        gates,
        false,
    )
    .expect("canonical tube non-blocking cell is valid");
    Catalog::new(WorldKind::Tube, alloc::vec![blocking, non_blocking])
        .expect("canonical tube catalog is well-formed")
}

/// The gas catalog shipped with the repo: gates at (0.45, 0.55) on all four
/// sides; cell 1 blocks (corner discs of radius 0.45 plus a central disc),
/// cell 2 has straight corridors of width 0.1 both horizontally and
/// vertically.
pub fn canonical_gas_catalog() -> Catalog {
    let gates = alloc::vec![
        GateSpec::new(Side::Left, 0.45, 0.55),
        GateSpec::new(Side::Right, 0.45, 0.55),
        GateSpec::new(Side::Bottom, 0.45, 0.55),
        GateSpec::new(Side::Top, 0.45, 0.55),
    ];
    let corners = |r: f64| {
        alloc::vec![
            Disc::new(0.0, 0.0, r),
            Disc::new(1.0, 0.0, r),
            Disc::new(0.0, 1.0, r),
            Disc::new(1.0, 1.0, r),
        ]
    };
    let mut blocking_discs = corners(0.45);
    blocking_discs.push(Disc::new(0.5, 0.5, 0.2));
    let blocking = build_local_config(1, blocking_discs, gates.clone(), true)
        .expect("canonical gas blocking cell is valid");
    let non_blocking = build_local_config(2, corners(0.45), gates, false)
        .expect("canonical gas non-blocking cell is valid");
    Catalog::new(WorldKind::Gas, alloc::vec![blocking, non_blocking])
        .expect("canonical gas catalog is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tube_gates(lo: f64, hi: f64) -> Vec<GateSpec> {
        alloc::vec![
            GateSpec::new(Side::Left, lo, hi),
            GateSpec::new(Side::Right, lo, hi),
        ]
    }

    // A classic blocking shape: four corner discs r = 0.45 and a central
    // disc r = 0.2, gates (0.45, 0.55).
    fn corner_center_candidate() -> LocalConfiguration {
        build_local_config(
            1,
            alloc::vec![
                Disc::new(0.0, 0.0, 0.45),
                Disc::new(1.0, 0.0, 0.45),
                Disc::new(0.0, 1.0, 0.45),
                Disc::new(1.0, 1.0, 0.45),
                Disc::new(0.5, 0.5, 0.2),
            ],
            tube_gates(0.45, 0.55),
            true,
        )
        .expect("corner+center candidate builds")
    }

    #[test]
    fn corner_center_candidate_builds_valid() {
        let cfg = corner_center_candidate();
        // Four quarter-corner arcs plus the full central circle.
        assert_eq!(cfg.arcs().len(), 5);
        // The top/bottom mid-edge stretches are bare (no covering disc).
        assert!(cfg.walls().iter().any(|w| !w.covered));
    }

    #[test]
    fn corner_center_candidate_blocks_at_dense_sweep() {
        // Gate chords all penetrate a disc: chords toward the bare top and
        // bottom stretches run into the corner discs first.
        let cfg = corner_center_candidate();
        match check_blocking(&cfg, 2048, 2048) {
            BlockingVerdict::Blocking { margin } => assert!(margin > 0.01),
            other => panic!("expected blocking, got {other:?}"),
        }
    }

    #[test]
    fn corners_only_candidate_builds_valid() {
        // Thinner corner discs, no central disc: the non-blocking shape.
        let cfg = build_local_config(
            2,
            alloc::vec![
                Disc::new(0.0, 0.0, 0.3),
                Disc::new(1.0, 0.0, 0.3),
                Disc::new(0.0, 1.0, 0.3),
                Disc::new(1.0, 1.0, 0.3),
            ],
            tube_gates(0.3, 0.7),
            false,
        )
        .unwrap();
        assert_eq!(cfg.arcs().len(), 4);
    }

    #[test]
    fn disc_overlapping_gate_is_a2_violation() {
        let err = build_local_config(
            1,
            alloc::vec![Disc::new(0.0, 0.5, 0.2), Disc::new(0.5, 0.5, 0.2)],
            tube_gates(0.45, 0.55),
            true,
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::A2Violation { side: Side::Left, .. }));
    }

    #[test]
    fn radius_out_of_range_is_a3_violation() {
        let err = build_local_config(
            1,
            alloc::vec![Disc::new(0.5, 0.5, 0.01)],
            tube_gates(0.3, 0.7),
            true,
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::A3Violation { .. }));
    }

    #[test]
    fn tangent_discs_are_a4_violation() {
        let err = build_local_config(
            1,
            alloc::vec![Disc::new(0.3, 0.5, 0.1), Disc::new(0.5, 0.5, 0.1)],
            tube_gates(0.3, 0.7),
            true,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            ConfigError::A4Violation {
                what: MeetingKind::DiscDisc { .. }
            }
        ));
    }

    #[test]
    fn coincident_discs_are_a1_violation() {
        let err = build_local_config(
            1,
            alloc::vec![Disc::new(0.5, 0.5, 0.2), Disc::new(0.5, 0.5, 0.2)],
            tube_gates(0.3, 0.7),
            true,
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::A1Violation { .. }));
    }

    #[test]
    fn clipping_merges_overlapping_discs() {
        // Two overlapping discs away from gates: each circle loses the cap
        // inside the other, arcs meet at the two crossing points.
        let cfg = build_local_config(
            1,
            alloc::vec![Disc::new(0.35, 0.5, 0.2), Disc::new(0.62, 0.5, 0.2)],
            tube_gates(0.05, 0.1),
            true,
        )
        .unwrap();
        assert_eq!(cfg.arcs().len(), 2);
        let total: f64 = cfg.arcs().iter().map(|a| a.span).sum();
        // Strictly less than two full circles.
        assert!(total < 2.0 * core::f64::consts::TAU - 0.5);
        // No arc point of one circle lies strictly inside the other disc.
        for (i, arc) in cfg.arcs().iter().enumerate() {
            let other = cfg.discs()[1 - cfg.arc_owner(i)];
            for k in 0..100 {
                let th = arc.theta0 + arc.span * (k as f64 + 0.5) / 100.0;
                assert!(other.depth(arc.point_at(th)) < 1e-9);
            }
        }
    }

    #[test]
    fn canonical_blocking_cells_verify() {
        for cfg in [
            canonical_tube_catalog().cell(1).clone(),
            canonical_gas_catalog().cell(1).clone(),
        ] {
            let v = check_blocking(&cfg, 2048, 2048);
            match v {
                BlockingVerdict::Blocking { margin } => {
                    assert!(margin >= 0.01, "blocking margin {margin} too thin");
                }
                other => panic!("expected blocking, got {other:?}"),
            }
        }
    }

    #[test]
    fn canonical_non_blocking_cells_verify() {
        for (cfg, min_clear) in [
            (canonical_tube_catalog().cell(2).clone(), 0.15),
            (canonical_gas_catalog().cell(2).clone(), 0.04),
        ] {
            match check_blocking(&cfg, 512, 512) {
                BlockingVerdict::NonBlocking { clearance, witness } => {
                    assert!(clearance > min_clear, "clearance {clearance}");
                    // Re-check the witness chord against every arc directly.
                    for arc in cfg.arcs() {
                        assert!(crate::geometry::ray_arc_intersection(
                            witness.origin,
                            witness.dir,
                            arc,
                            0.0
                        )
                        .is_none_or(|h| h.t > witness.origin.dist(witness.exit)));
                    }
                }
                other => panic!("expected non-blocking, got {other:?}"),
            }
        }
    }

    #[test]
    fn mid_height_chord_is_the_expected_witness() {
        // Corner discs r = 0.3 with gates (0.3, 0.7): the mid-height line
        // clears all corner discs by 0.2.
        let cfg = build_local_config(
            2,
            alloc::vec![
                Disc::new(0.0, 0.0, 0.3),
                Disc::new(1.0, 0.0, 0.3),
                Disc::new(0.0, 1.0, 0.3),
                Disc::new(1.0, 1.0, 0.3),
            ],
            tube_gates(0.3, 0.7),
            false,
        )
        .unwrap();
        match check_blocking(&cfg, 511, 511) {
            BlockingVerdict::NonBlocking { clearance, .. } => {
                assert!(clearance > 0.19 && clearance <= 0.2 + 1e-6);
            }
            other => panic!("expected non-blocking, got {other:?}"),
        }
    }

    #[test]
    fn corner_discs_reaching_gate_edge_are_inconclusive() {
        // Radius exactly reaching the gate edge: chords grazing the corner
        // circles near the gate ends have clearance ~ 0.
        let cfg = build_local_config(
            1,
            alloc::vec![
                Disc::new(0.0, 0.0, 0.45),
                Disc::new(1.0, 0.0, 0.45),
                Disc::new(0.0, 1.0, 0.45),
                Disc::new(1.0, 1.0, 0.45),
            ],
            tube_gates(0.45, 0.55),
            true,
        )
        .unwrap();
        // Dense sweep so some chord lands inside the clearance band.
        match check_blocking(&cfg, 4096, 4096) {
            BlockingVerdict::Inconclusive { min_clearance } => {
                assert!(min_clearance < 1e-4);
            }
            other => panic!("expected inconclusive, got {other:?}"),
        }
    }

    #[test]
    fn refinement_never_flips_blocking_to_non_blocking() {
        for cfg in canonical_tube_catalog()
            .cells()
            .iter()
            .chain(canonical_gas_catalog().cells())
        {
            let mut prev_blocking = false;
            for n in [64usize, 128, 256, 512] {
                let v = check_blocking(cfg, n, n);
                if prev_blocking {
                    assert!(
                        !v.is_non_blocking(),
                        "cell {} flipped blocking -> non-blocking at {n}",
                        cfg.id
                    );
                }
                prev_blocking = v.is_blocking();
            }
        }
    }

    #[test]
    fn canonical_cells_are_shadowed() {
        for cfg in canonical_tube_catalog()
            .cells()
            .iter()
            .chain(canonical_gas_catalog().cells())
        {
            let v = check_shadowing(cfg, 256);
            match &v {
                ShadowVerdict::Shadowed { vacuous, min_margin } => {
                    // Walls exist (covered flats) and carry real cover.
                    assert!(!vacuous, "cell {} has no walls?", cfg.id);
                    assert!(*min_margin > 1e-4);
                }
                other => panic!("cell {}: expected shadowed, got {other:?}", cfg.id),
            }
        }
    }

    #[test]
    fn bare_wall_facing_gate_is_not_shadowed() {
        // Corner discs too small to cover the side between gate and corner:
        // the horizontal chord through the gates passes a bare stretch.
        let cfg = build_local_config(
            1,
            alloc::vec![
                Disc::new(0.0, 0.0, 0.2),
                Disc::new(1.0, 0.0, 0.2),
                Disc::new(0.0, 1.0, 0.2),
                Disc::new(1.0, 1.0, 0.2),
            ],
            tube_gates(0.3, 0.7),
            false,
        )
        .unwrap();
        let v = check_shadowing(&cfg, 128);
        assert!(!v.is_shadowed());
    }

    #[test]
    fn fully_covered_walls_vacuous_when_no_walls() {
        // A rig whose gates span the whole of each side: nothing left of
        // the boundary, so shadowing passes vacuously.
        let cfg = LocalConfiguration::unchecked(
            1,
            alloc::vec![Disc::new(0.5, 0.5, 0.25)],
            alloc::vec![
                GateSpec::full(Side::Left),
                GateSpec::full(Side::Right),
                GateSpec::full(Side::Bottom),
                GateSpec::full(Side::Top),
            ],
            false,
        );
        assert_eq!(
            check_shadowing(&cfg, 64),
            ShadowVerdict::Shadowed {
                vacuous: true,
                min_margin: f64::INFINITY
            }
        );
    }

    #[test]
    fn catalog_rejects_bad_ordering() {
        let gates = tube_gates(0.3, 0.7);
        let nb = build_local_config(
            1,
            alloc::vec![Disc::new(0.0, 0.0, 0.3)],
            gates.clone(),
            false,
        )
        .unwrap();
        let b = build_local_config(2, alloc::vec![Disc::new(0.0, 0.0, 0.3)], gates, true).unwrap();
        assert_eq!(
            Catalog::new(WorldKind::Tube, alloc::vec![nb, b]).unwrap_err(),
            CatalogError::BadOrdering { id: 2 }
        );
    }

    #[test]
    fn canonical_catalogs_validate_end_to_end() {
        for catalog in [canonical_tube_catalog(), canonical_gas_catalog()] {
            let reports = validate_catalog(&catalog, 512, 512, 128);
            for r in &reports {
                assert!(r.ok(), "cell {} failed validation: {r:?}", r.id);
            }
        }
    }
}
