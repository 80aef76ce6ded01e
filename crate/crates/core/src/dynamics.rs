//! The billiard map on a world: free flight across cells, specular
//! reflection, time reversal, and the tangent-map cocycle.
//!
//! Flights traverse the lattice by incremental grid stepping, querying each
//! cell's configuration lazily, so the cost of a flight is proportional to
//! the corridor it crosses. Gate crossings are transparent; tangential,
//! corner and gate-edge encounters terminate the step as singular, and a
//! flat-boundary contact reports the offending cell (it means the
//! configuration violates the shadowing hypothesis).
//!
//! # Tangent map
//!
//! In boundary coordinates `(r, phi)` — arclength along the arc,
//! counterclockwise around its disc center, and signed incidence angle with
//! `sin(phi) = <v, t>` for the counterclockwise tangent `t` — one collision
//! step of the derivative is the standard dispersing-billiard factor
//!
//! ```text
//!         -1     | tau*K + cos(phi)                              tau       |
//! D T = ------ * |                                                         |
//!       cos(phi')| tau*K*K' + K'*cos(phi) + K*cos(phi')   tau*K' + cos(phi')|
//! ```
//!
//! with `K = 1/r` the curvature at departure, `K'` at arrival, `tau` the
//! flight length. Its determinant is exactly `cos(phi) / cos(phi')`, the
//! numerical form of invariance of the measure `cos(phi) dr dphi`; that
//! identity anchors the correctness tests.

use alloc::vec::Vec;

// Inherent float methods cover this when std is linked (tests); the trait
// provides them in the no_std build.
#[allow(unused_imports)]
use num_traits::Float;
use crate::geometry::{self, Point, UnitVector, EPS_TAN, T_MIN_GUARD};
use crate::world::{CellIndex, World};

/// Flight guards: a free flight that crosses more cells or length than this
/// is reported as an outcome (evidence of a full free line), not a crash.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Guards {
    pub max_cells: u64,
    pub max_length: f64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            max_cells: 10_000,
            max_length: 10_000.0,
        }
    }
}

/// Why a step could not produce a regular collision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingularKind {
    /// Grazing contact with an arc.
    Tangential,
    /// Contact within tolerance of an arc endpoint.
    Corner,
    /// Crossing within tolerance of a gate endpoint (includes flights
    /// running along the gate segment).
    GateGraze,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepError {
    /// The flight reached a flat boundary stretch: the configuration
    /// violates shadowing in this cell.
    WallHit { cell: CellIndex, at: Point },
    /// Flight exceeded the guards without a collision.
    GuardExceeded { cells: u64, length: f64 },
    Singular { kind: SingularKind, at: Point },
}

impl core::fmt::Display for StepError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            StepError::WallHit { cell, .. } => {
                write!(f, "wall contact in cell ({}, {})", cell.x, cell.y)
            }
            StepError::GuardExceeded { cells, length } => {
                write!(f, "free flight exceeded guards ({cells} cells, length {length})")
            }
            StepError::Singular { kind, .. } => write!(f, "singular encounter: {kind:?}"),
        }
    }
}

/// A post-collision state: cell, boundary arc, position (global
/// coordinates) and outgoing unit direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineElement {
    pub cell: CellIndex,
    pub arc: usize,
    pub q: Point,
    pub v: UnitVector,
}

impl LineElement {
    /// Builds the element sitting on `arc` of the cell's configuration at
    /// absolute circle angle `theta`, leaving at signed incidence `phi`
    /// (zero along the normal, positive toward the counterclockwise
    /// tangent). `|phi|` must stay below `pi/2`.
    pub fn from_arc(
        world: &World,
        cell: CellIndex,
        arc_index: usize,
        theta: f64,
        phi: f64,
    ) -> LineElement {
        let cfg = world.config_at(cell);
        let arc = &cfg.arcs()[arc_index];
        let local = arc.point_at(theta);
        let q = Point::new(local.x + cell.x as f64, local.y + cell.y as f64);
        let n = arc.normal_at(local);
        LineElement {
            cell,
            arc: arc_index,
            q,
            v: n.rotate(phi),
        }
    }

    pub fn local_q(&self) -> Point {
        Point::new(self.q.x - self.cell.x as f64, self.q.y - self.cell.y as f64)
    }

    fn arc_piece<'w>(&self, world: &'w World) -> &'w geometry::ArcPiece {
        &world.config_at(self.cell).arcs()[self.arc]
    }

    /// Inward normal at the element's foot point.
    pub fn normal(&self, world: &World) -> UnitVector {
        self.arc_piece(world).normal_at(self.local_q())
    }

    /// Cosine of the incidence angle, `<n, v>`; post-collisional elements
    /// have it non-negative.
    pub fn cos_phi(&self, world: &World) -> f64 {
        self.normal(world).dot(self.v)
    }

    /// Signed incidence angle in `(-pi/2, pi/2)`.
    pub fn phi(&self, world: &World) -> f64 {
        let n = self.normal(world);
        let s = n.perp().dot(self.v);
        let c = n.dot(self.v);
        s.atan2(c)
    }

    /// Boundary chart `(r, phi)`: arclength along the arc from its start
    /// (counterclockwise) and the signed incidence angle.
    pub fn boundary_coords(&self, world: &World) -> (f64, f64) {
        let arc = self.arc_piece(world);
        let theta = arc.angle_of(self.local_q());
        (arc.angle_offset(theta) * arc.radius, self.phi(world))
    }

    /// Curvature of the boundary at the foot point, `1 / radius`.
    pub fn curvature(&self, world: &World) -> f64 {
        1.0 / self.arc_piece(world).radius
    }
}

/// A regular collision: departure and arrival elements, the flight length,
/// and how many gate crossings the flight made.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionEvent {
    pub from: LineElement,
    pub to: LineElement,
    pub tau: f64,
    pub cells_traversed: u64,
}

/// Result of casting a ray through the world until it meets an arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayContact {
    pub cell: CellIndex,
    pub arc: usize,
    /// Global contact point.
    pub point: Point,
    /// Inward normal at the contact.
    pub normal: UnitVector,
    pub t: f64,
    pub cells_traversed: u64,
}

/// Exit parameters of a ray from the unit square in local coordinates:
/// the ray parameter, side, and coordinate along the side.
fn local_exit(origin: Point, dir: UnitVector) -> (f64, crate::config::Side, f64) {
    use crate::config::Side;
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

/// Casts the ray `origin + t v` from inside `start_cell` until it meets an
/// arc, crossing gates transparently.
///
/// `t_min` suppresses contacts at the very start of the ray (the departing
/// collision). All parameters are global; the contact reports the cell that
/// owns the arc.
pub fn cast_ray(
    world: &World,
    start_cell: CellIndex,
    origin: Point,
    dir: UnitVector,
    guards: Guards,
    t_min: f64,
) -> Result<RayContact, StepError> {
    let mut cell = start_cell;
    let mut crossed = 0u64;
    loop {
        let local = Point::new(origin.x - cell.x as f64, origin.y - cell.y as f64);
        let cfg = world.config_at(cell);
        let (t_exit, side, exit_u) = local_exit(local, dir);

        let mut best: Option<(geometry::Hit, usize)> = None;
        for (ai, arc) in cfg.arcs().iter().enumerate() {
            if let Some(h) = geometry::ray_arc_intersection(local, dir, arc, t_min) {
                // Accept contacts inside this cell (arcs are clipped to it,
                // but allow a hair past the exit for boundary-straddling
                // contacts).
                if h.t <= t_exit + EPS_TAN && best.as_ref().is_none_or(|(b, _)| h.t < b.t) {
                    best = Some((h, ai));
                }
            }
        }

        if let Some((hit, arc)) = best {
            let at = Point::new(hit.point.x + cell.x as f64, hit.point.y + cell.y as f64);
            if hit.tangential {
                return Err(StepError::Singular {
                    kind: SingularKind::Tangential,
                    at,
                });
            }
            let arc_piece = &cfg.arcs()[arc];
            let theta = arc_piece.angle_of(hit.point);
            if arc_piece.arc_dist_to_endpoint(theta) <= EPS_TAN {
                return Err(StepError::Singular {
                    kind: SingularKind::Corner,
                    at,
                });
            }
            return Ok(RayContact {
                cell,
                arc,
                point: at,
                normal: hit.inward_normal,
                t: hit.t,
                cells_traversed: crossed,
            });
        }

        // No arc: the flight leaves the cell. Gates are transparent, their
        // edges singular, everything else is a wall contact.
        let at = origin.offset(dir.as_vec().scale(t_exit));
        match cfg.gate_on(side) {
            Some(g) => {
                let margin = g.edge_margin(exit_u);
                if margin <= EPS_TAN {
                    if margin >= -EPS_TAN {
                        return Err(StepError::Singular {
                            kind: SingularKind::GateGraze,
                            at,
                        });
                    }
                    return Err(StepError::WallHit { cell, at });
                }
            }
            None => return Err(StepError::WallHit { cell, at }),
        }
        cell = match side {
            crate::config::Side::Left => cell.offset(-1, 0),
            crate::config::Side::Right => cell.offset(1, 0),
            crate::config::Side::Bottom => cell.offset(0, -1),
            crate::config::Side::Top => cell.offset(0, 1),
        };
        crossed += 1;
        if crossed > guards.max_cells || t_exit > guards.max_length {
            return Err(StepError::GuardExceeded {
                cells: crossed,
                length: t_exit,
            });
        }
    }
}

/// One application of the billiard map: flight to the next arc, then
/// specular reflection.
pub fn next_collision(
    world: &World,
    x: &LineElement,
    guards: Guards,
) -> Result<CollisionEvent, StepError> {
    let contact = cast_ray(world, x.cell, x.q, x.v, guards, T_MIN_GUARD)?;
    let v_new = geometry::reflect(x.v, contact.normal).ok_or(StepError::Singular {
        kind: SingularKind::Tangential,
        at: contact.point,
    })?;
    Ok(CollisionEvent {
        from: *x,
        to: LineElement {
            cell: contact.cell,
            arc: contact.arc,
            q: contact.point,
            v: v_new,
        },
        tau: contact.t,
        cells_traversed: contact.cells_traversed,
    })
}

/// The billiard map itself: `T(x)`.
pub fn billiard_map(world: &World, x: &LineElement, guards: Guards) -> Result<LineElement, StepError> {
    next_collision(world, x, guards).map(|e| e.to)
}

/// Time reversal: `i(q, v) = (q, reflect(-v, n))`. An involution, and
/// `T^(-1) = i T i` away from singular data.
pub fn reverse(world: &World, x: &LineElement) -> Result<LineElement, StepError> {
    let n = x.normal(world);
    let v = geometry::reflect(-x.v, n).ok_or(StepError::Singular {
        kind: SingularKind::Tangential,
        at: x.q,
    })?;
    Ok(LineElement { v, ..*x })
}

/// Orbit iterator: yields collision events until a singular encounter,
/// wall contact, guard exhaustion, or the step budget runs out.
pub struct Orbit<'w> {
    world: &'w World,
    guards: Guards,
    current: Option<LineElement>,
    stopped: Option<StepError>,
}

impl<'w> Orbit<'w> {
    pub fn new(world: &'w World, start: LineElement, guards: Guards) -> Orbit<'w> {
        Orbit {
            world,
            guards,
            current: Some(start),
            stopped: None,
        }
    }

    /// The error that stopped the orbit, if any.
    pub fn stopped(&self) -> Option<StepError> {
        self.stopped
    }
}

impl Iterator for Orbit<'_> {
    type Item = CollisionEvent;

    fn next(&mut self) -> Option<CollisionEvent> {
        let x = self.current.take()?;
        match next_collision(self.world, &x, self.guards) {
            Ok(ev) => {
                self.current = Some(ev.to);
                Some(ev)
            }
            Err(e) => {
                self.stopped = Some(e);
                None
            }
        }
    }
}

/// Collected orbit with its termination reason (`None`: ran the full
/// requested length).
#[derive(Debug, Clone)]
pub struct OrbitResult {
    pub events: Vec<CollisionEvent>,
    pub termination: Option<StepError>,
}

pub fn iterate_orbit(
    world: &World,
    start: LineElement,
    steps: usize,
    guards: Guards,
) -> OrbitResult {
    let mut orbit = Orbit::new(world, start, guards);
    let events: Vec<CollisionEvent> = orbit.by_ref().take(steps).collect();
    OrbitResult {
        events,
        termination: orbit.stopped(),
    }
}

/// Per-collision factor of the tangent map in `(r, phi)` coordinates; see
/// the module docs. `det = cos_phi / cos_phi1` exactly.
pub fn flight_factor(tau: f64, k: f64, k1: f64, cos_phi: f64, cos_phi1: f64) -> [[f64; 2]; 2] {
    let s = -1.0 / cos_phi1;
    [
        [s * (tau * k + cos_phi), s * tau],
        [
            s * (tau * k * k1 + k1 * cos_phi + k * cos_phi1),
            s * (tau * k1 + cos_phi1),
        ],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TangentError {
    /// Arrival too close to tangential; the factor blows up as
    /// `1 / cos(phi')`.
    NearTangency,
}

/// Running product of tangent factors with renormalization: the matrix is
/// rescaled to unit Frobenius norm after each step and the scale
/// accumulates in `log_norm`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CocycleState {
    pub m: [[f64; 2]; 2],
    pub log_norm: f64,
    pub steps: u64,
}

impl Default for CocycleState {
    fn default() -> Self {
        Self::identity()
    }
}

impl CocycleState {
    pub fn identity() -> CocycleState {
        CocycleState {
            m: [[1.0, 0.0], [0.0, 1.0]],
            log_norm: 0.0,
            steps: 0,
        }
    }

    /// Mean log-norm growth per collision.
    pub fn rate(&self) -> f64 {
        let residual = frobenius(&self.m).ln();
        (self.log_norm + residual) / self.steps.max(1) as f64
    }
}

fn frobenius(m: &[[f64; 2]; 2]) -> f64 {
    (m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1]).sqrt()
}

/// Accumulates one collision into the cocycle.
pub fn tangent_step(
    world: &World,
    event: &CollisionEvent,
    state: &CocycleState,
) -> Result<CocycleState, TangentError> {
    let cos_phi = event.from.cos_phi(world);
    let cos_phi1 = event.to.cos_phi(world);
    if cos_phi1 <= EPS_TAN {
        return Err(TangentError::NearTangency);
    }
    let f = flight_factor(
        event.tau,
        event.from.curvature(world),
        event.to.curvature(world),
        cos_phi,
        cos_phi1,
    );
    let m = &state.m;
    let mut prod = [
        [
            f[0][0] * m[0][0] + f[0][1] * m[1][0],
            f[0][0] * m[0][1] + f[0][1] * m[1][1],
        ],
        [
            f[1][0] * m[0][0] + f[1][1] * m[1][0],
            f[1][0] * m[0][1] + f[1][1] * m[1][1],
        ],
    ];
    let scale = frobenius(&prod);
    for row in prod.iter_mut() {
        for e in row.iter_mut() {
            *e /= scale;
        }
    }
    Ok(CocycleState {
        m: prod,
        log_norm: state.log_norm + scale.ln(),
        steps: state.steps + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Disc, GateSpec, LocalConfiguration, Side};
    use crate::world::{CellSource, World, WorldKind};
    use alloc::sync::Arc;
    use alloc::vec;
    use approx::assert_relative_eq;

    /// Gas of identical cells holding a central disc of radius 0.25;
    /// full-side gates (unvalidated rig).
    pub(crate) fn central_disc_gas() -> World {
        let gates = vec![
            GateSpec::full(Side::Left),
            GateSpec::full(Side::Right),
            GateSpec::full(Side::Bottom),
            GateSpec::full(Side::Top),
        ];
        let blocking = LocalConfiguration::unchecked(
            1,
            vec![Disc::new(0.5, 0.5, 0.25)],
            gates.clone(),
            true,
        );
        let filler = LocalConfiguration::unchecked(
            2,
            vec![Disc::new(0.5, 0.5, 0.25)],
            gates,
            false,
        );
        let catalog = crate::config::Catalog::new(WorldKind::Gas, vec![blocking, filler]).unwrap();
        World::new(Arc::new(catalog), CellSource::Constant(1), None).unwrap()
    }

    fn period2_start(world: &World) -> LineElement {
        // On the first disc at angle 0 (point (0.75, 0.5)), leaving along
        // the normal.
        LineElement::from_arc(world, CellIndex::ORIGIN, 0, 0.0, 0.0)
    }

    #[test]
    fn period_two_orbit_is_exact() {
        let world = central_disc_gas();
        let x0 = period2_start(&world);
        assert_eq!(x0.q, Point::new(0.75, 0.5));

        let ev = next_collision(&world, &x0, Guards::default()).unwrap();
        assert_eq!(ev.to.cell, CellIndex::new(1, 0));
        assert_relative_eq!(ev.tau, 0.5, epsilon = 1e-15);
        assert_relative_eq!(ev.to.q.x, 1.25, epsilon = 1e-15);
        assert_relative_eq!(ev.to.q.y, 0.5, epsilon = 1e-15);
        assert_relative_eq!(ev.to.v.x(), -1.0, epsilon = 1e-15);

        // Bounce between the two discs; positions must stay put exactly.
        let mut x = x0;
        for i in 0..200 {
            let ev = next_collision(&world, &x, Guards::default()).unwrap();
            x = ev.to;
            let expect = if i % 2 == 0 { 1.25 } else { 0.75 };
            assert!((x.q.x - expect).abs() <= 1e-12);
            assert!((x.q.y - 0.5).abs() <= 1e-12);
        }
    }

    #[test]
    fn grazing_ray_is_singular_tangential() {
        let world = central_disc_gas();
        let r = cast_ray(
            &world,
            CellIndex::ORIGIN,
            Point::new(0.0, 0.75 + EPS_TAN / 2.0),
            UnitVector::new(crate::geometry::Vec2::new(1.0, 0.0)),
            Guards::default(),
            0.0,
        );
        assert!(matches!(
            r,
            Err(StepError::Singular {
                kind: SingularKind::Tangential,
                ..
            })
        ));
    }

    #[test]
    fn flight_crosses_cells_transparently() {
        let world = central_disc_gas();
        // From the disc top heading up-right at a shallow angle that clears
        // the neighbors' discs for a few cells.
        let x = LineElement::from_arc(
            &world,
            CellIndex::ORIGIN,
            0,
            core::f64::consts::FRAC_PI_2,
            0.3,
        );
        let ev = next_collision(&world, &x, Guards::default()).unwrap();
        assert!(ev.cells_traversed > 0);
        assert_relative_eq!(
            (ev.to.q - ev.from.q).norm(),
            ev.tau,
            epsilon = 1e-12
        );
    }

    #[test]
    fn guards_cut_free_lines() {
        // A corridor dead ahead: disc missing in every cell along y = 0.5's
        // line of sight? Use an empty-arc rig: single tiny disc far away.
        let gates = vec![
            GateSpec::full(Side::Left),
            GateSpec::full(Side::Right),
            GateSpec::full(Side::Bottom),
            GateSpec::full(Side::Top),
        ];
        let near_empty = LocalConfiguration::unchecked(
            1,
            vec![Disc::new(0.5, 0.95, 0.02)],
            gates.clone(),
            true,
        );
        let filler = LocalConfiguration::unchecked(2, vec![Disc::new(0.5, 0.95, 0.02)], gates, false);
        let catalog = crate::config::Catalog::new(WorldKind::Gas, vec![near_empty, filler]).unwrap();
        let world = World::new(Arc::new(catalog), CellSource::Constant(1), None).unwrap();
        let r = cast_ray(
            &world,
            CellIndex::ORIGIN,
            Point::new(0.01, 0.5),
            UnitVector::new(crate::geometry::Vec2::new(1.0, 0.0)),
            Guards {
                max_cells: 64,
                max_length: 1e9,
            },
            0.0,
        );
        assert!(matches!(r, Err(StepError::GuardExceeded { cells: 65, .. })));
    }

    #[test]
    fn reverse_is_involution() {
        let world = central_disc_gas();
        for k in 0..1000 {
            let theta = 0.006283 * k as f64;
            let phi = 1.5 * ((k as f64 * 0.017).sin());
            let x = LineElement::from_arc(&world, CellIndex::ORIGIN, 0, theta, phi);
            if x.cos_phi(&world) <= 1e-3 {
                continue;
            }
            let r = reverse(&world, &x).unwrap();
            let rr = reverse(&world, &r).unwrap();
            assert!((rr.v.x() - x.v.x()).abs() < 1e-12);
            assert!((rr.v.y() - x.v.y()).abs() < 1e-12);
            assert_eq!(rr.q, x.q);
        }
    }

    #[test]
    fn normal_incidence_is_fixed_by_reversal() {
        let world = central_disc_gas();
        let x = LineElement::from_arc(&world, CellIndex::ORIGIN, 0, 1.0, 0.0);
        let r = reverse(&world, &x).unwrap();
        assert!((r.v.x() - x.v.x()).abs() < 1e-15);
        assert!((r.v.y() - x.v.y()).abs() < 1e-15);
    }

    #[test]
    fn reversal_conjugates_the_map() {
        // i T i T = id pointwise.
        let world = central_disc_gas();
        let guards = Guards::default();
        let mut checked = 0;
        for k in 0..2000 {
            if checked >= 500 {
                break;
            }
            let theta = 0.0314159 * k as f64;
            let phi = 1.4 * ((k as f64 * 0.029).cos());
            let x = LineElement::from_arc(&world, CellIndex::ORIGIN, 0, theta, phi);
            let Ok(tx) = billiard_map(&world, &x, guards) else {
                continue;
            };
            let Ok(itx) = reverse(&world, &tx) else { continue };
            let Ok(titx) = billiard_map(&world, &itx, guards) else {
                continue;
            };
            let Ok(x_back) = reverse(&world, &titx) else {
                continue;
            };
            assert!((x_back.q.x - x.q.x).abs() < 1e-9, "q.x drift");
            assert!((x_back.q.y - x.q.y).abs() < 1e-9, "q.y drift");
            assert!((x_back.v.x() - x.v.x()).abs() < 1e-9, "v.x drift");
            assert!((x_back.v.y() - x.v.y()).abs() < 1e-9, "v.y drift");
            checked += 1;
        }
        assert!(checked >= 400);
    }

    #[test]
    fn period_two_tangent_factor_matches_hand_value() {
        // r = r' = 0.25, tau = 0.5, phi = phi' = 0:
        // factor = -[[3, 0.5], [16, 3]], det = 1.
        let world = central_disc_gas();
        let x = period2_start(&world);
        let ev = next_collision(&world, &x, Guards::default()).unwrap();
        let f = flight_factor(
            ev.tau,
            ev.from.curvature(&world),
            ev.to.curvature(&world),
            ev.from.cos_phi(&world),
            ev.to.cos_phi(&world),
        );
        assert_relative_eq!(f[0][0], -3.0, epsilon = 1e-12);
        assert_relative_eq!(f[0][1], -0.5, epsilon = 1e-12);
        assert_relative_eq!(f[1][0], -16.0, epsilon = 1e-12);
        assert_relative_eq!(f[1][1], -3.0, epsilon = 1e-12);
        let det = f[0][0] * f[1][1] - f[0][1] * f[1][0];
        assert_relative_eq!(det, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_flight_factor_limit() {
        // tau = 0 head-on: -[[1, 0], [K + K', 1]], det 1.
        let f = flight_factor(0.0, 4.0, 5.0, 1.0, 1.0);
        assert_eq!(f, [[-1.0, -0.0], [-9.0, -1.0]]);
        assert_relative_eq!(f[0][0] * f[1][1] - f[0][1] * f[1][0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn determinant_identity_along_orbits() {
        let world = central_disc_gas();
        let mut tested = 0;
        for k in 0..200 {
            let theta = 0.1 * k as f64;
            let phi = 1.2 * ((k as f64 * 0.37).sin());
            let x = LineElement::from_arc(&world, CellIndex::ORIGIN, 0, theta, phi);
            let mut state = CocycleState::identity();
            for ev in Orbit::new(&world, x, Guards::default()).take(50) {
                let cos_phi = ev.from.cos_phi(&world);
                let cos_phi1 = ev.to.cos_phi(&world);
                if cos_phi1 <= EPS_TAN {
                    break;
                }
                let f = flight_factor(
                    ev.tau,
                    ev.from.curvature(&world),
                    ev.to.curvature(&world),
                    cos_phi,
                    cos_phi1,
                );
                let det = f[0][0] * f[1][1] - f[0][1] * f[1][0];
                assert!(
                    (det - cos_phi / cos_phi1).abs() <= 1e-8,
                    "det {} vs {}",
                    det,
                    cos_phi / cos_phi1
                );
                state = tangent_step(&world, &ev, &state).unwrap();
                tested += 1;
            }
            assert!(state.rate().is_finite());
        }
        assert!(tested > 1000);
    }

    #[test]
    fn flight_additivity() {
        let world = central_disc_gas();
        for k in 0..500 {
            let theta = 0.013 * k as f64;
            let phi = 1.3 * ((k as f64 * 0.61).sin());
            let x = LineElement::from_arc(&world, CellIndex::ORIGIN, 0, theta, phi);
            if let Ok(ev) = next_collision(&world, &x, Guards::default()) {
                let step = ev.to.q - ev.from.q;
                assert!((step.norm() - ev.tau).abs() <= 1e-12);
                // Advance is along v exactly.
                assert!((step.x - ev.tau * ev.from.v.x()).abs() <= 1e-12);
                assert!((step.y - ev.tau * ev.from.v.y()).abs() <= 1e-12);
            }
        }
    }
}
