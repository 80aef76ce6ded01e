//! Exact planar primitives: circular arcs, wall segments, ray intersection,
//! tangency detection and specular reflection.
//!
//! Scatterer boundaries are restricted to circular arcs and straight wall
//! segments. Circles make the curvature exactly `1/radius` and every
//! intersection closed-form, so the dispersing-curvature hypothesis holds by
//! construction instead of by numeric bound.


// Inherent float methods cover this when std is linked (tests); the trait
// provides them in the no_std build.
#[allow(unused_imports)]
use num_traits::Float;
/// Tangency tolerance, in cell units. Encounters closer than this to a
/// grazing contact are classified singular rather than resolved.
pub const EPS_TAN: f64 = 1e-9;

/// Minimum advance along a ray before a new contact is accepted; avoids
/// re-detecting the departing collision.
pub const T_MIN_GUARD: f64 = 1e-12;

/// Allowed defect of a unit vector after normalization.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// A position in the plane, in cell-edge units (the cell is the unit square).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// A displacement between points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn offset(self, v: Vec2) -> Point {
        Point::new(self.x + v.x, self.y + v.y)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }
}

/// Point difference is the displacement from `rhs` to `self`.
impl core::ops::Sub for Point {
    type Output = Vec2;

    fn sub(self, rhs: Point) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Z-component of the cross product; positive when `other` lies
    /// counterclockwise of `self`.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn scale(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }

    /// Counterclockwise rotation by a quarter turn.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }
}

impl core::ops::Add for Vec2 {
    type Output = Vec2;

    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl core::ops::Neg for Vec2 {
    type Output = Vec2;

    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// A direction of unit Euclidean norm.
///
/// Constructors renormalize; the defect stays below [`UNIT_NORM_TOL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector(Vec2);

impl UnitVector {
    /// Normalizes `v`. Returns `None` for vectors too short to carry a
    /// direction.
    pub fn try_new(v: Vec2) -> Option<UnitVector> {
        let n = v.norm();
        if n < 1e-300 {
            return None;
        }
        Some(UnitVector(v.scale(1.0 / n)))
    }

    /// Normalizes `v`; panics on a zero vector.
    pub fn new(v: Vec2) -> UnitVector {
        Self::try_new(v).expect("cannot normalize zero vector")
    }

    pub fn from_angle(theta: f64) -> UnitVector {
        UnitVector(Vec2::new(theta.cos(), theta.sin()))
    }

    pub fn as_vec(self) -> Vec2 {
        self.0
    }

    pub fn x(self) -> f64 {
        self.0.x
    }

    pub fn y(self) -> f64 {
        self.0.y
    }

    pub fn dot(self, other: UnitVector) -> f64 {
        self.0.dot(other.0)
    }

    /// Counterclockwise quarter turn; stays unit.
    pub fn perp(self) -> UnitVector {
        UnitVector(self.0.perp())
    }

    /// Counterclockwise rotation by `angle` radians; stays unit.
    pub fn rotate(self, angle: f64) -> UnitVector {
        let (s, c) = angle.sin_cos();
        UnitVector(Vec2::new(
            c * self.0.x - s * self.0.y,
            s * self.0.x + c * self.0.y,
        ))
    }
}

impl core::ops::Neg for UnitVector {
    type Output = UnitVector;

    fn neg(self) -> UnitVector {
        UnitVector(-self.0)
    }
}

/// A circular boundary arc: part of a disc's circle, dispersing toward the
/// billiard domain (the domain lies outside the disc).
///
/// The angular interval is `[theta0, theta0 + span)` counterclockwise around
/// the center, with `0 < span <= 2*pi`; a full circle has `span = 2*pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcPiece {
    pub center: Point,
    pub radius: f64,
    pub theta0: f64,
    pub span: f64,
}

impl ArcPiece {
    pub fn new(center: Point, radius: f64, theta0: f64, span: f64) -> ArcPiece {
        debug_assert!(radius > 0.0);
        debug_assert!(span > 0.0 && span <= core::f64::consts::TAU + 1e-9);
        ArcPiece {
            center,
            radius,
            theta0,
            span,
        }
    }

    pub fn full_circle(center: Point, radius: f64) -> ArcPiece {
        ArcPiece::new(center, radius, 0.0, core::f64::consts::TAU)
    }

    pub fn is_full_circle(&self) -> bool {
        self.span >= core::f64::consts::TAU - 1e-12
    }

    pub fn arc_length(&self) -> f64 {
        self.radius * self.span
    }

    /// Point at angle `theta` (absolute, not interval-relative).
    pub fn point_at(&self, theta: f64) -> Point {
        let (s, c) = theta.sin_cos();
        Point::new(self.center.x + self.radius * c, self.center.y + self.radius * s)
    }

    /// Inward normal at `p` on the arc: points from the disc into the
    /// billiard domain, i.e. radially away from the center.
    pub fn normal_at(&self, p: Point) -> UnitVector {
        UnitVector::new(p - self.center)
    }

    /// Angle of `p` relative to the center, in `[0, 2*pi)`.
    pub fn angle_of(&self, p: Point) -> f64 {
        let v = p - self.center;
        let a = v.y.atan2(v.x);
        if a < 0.0 {
            a + core::f64::consts::TAU
        } else {
            a
        }
    }

    /// Whether the absolute angle `theta` falls inside the angular interval.
    pub fn contains_angle(&self, theta: f64) -> bool {
        if self.is_full_circle() {
            return true;
        }
        let tau = core::f64::consts::TAU;
        let mut d = (theta - self.theta0) % tau;
        if d < 0.0 {
            d += tau;
        }
        d < self.span
    }

    /// Offset of `theta` into the interval, in radians from the start
    /// (meaningful only when `contains_angle` holds).
    pub fn angle_offset(&self, theta: f64) -> f64 {
        let tau = core::f64::consts::TAU;
        let mut d = (theta - self.theta0) % tau;
        if d < 0.0 {
            d += tau;
        }
        d
    }

    /// Distance from the nearer interval endpoint, measured along the arc.
    /// Full circles have no endpoints; returns infinity.
    pub fn arc_dist_to_endpoint(&self, theta: f64) -> f64 {
        if self.is_full_circle() {
            return f64::INFINITY;
        }
        let d = self.angle_offset(theta);
        d.min((self.span - d).abs()) * self.radius
    }
}

/// A straight stretch of the cell boundary: a flat part of the scatterer
/// boundary lying on `∂C` (covered by discs from inside, hence unreachable in
/// a well-formed cell), or a bare stretch of `∂C` in a cell that fails the
/// coverage hypothesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallSegment {
    pub a: Point,
    pub b: Point,
    /// Whether the stretch is backed by scatterer from inside the cell.
    /// Uncovered stretches are reachable and flagged by the shadowing check.
    pub covered: bool,
}

/// Result of a ray/arc intersection query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    /// Ray parameter of the contact, `origin + t * dir`.
    pub t: f64,
    pub point: Point,
    /// Normal at the contact pointing into the billiard domain.
    pub inward_normal: UnitVector,
    /// True when the ray grazes the circle within [`EPS_TAN`]; the contact
    /// is then the closest-approach point and must be treated as singular.
    pub tangential: bool,
}

/// First intersection of the ray `origin + t * dir` (`t > t_min`) with an
/// arc, or `None` if the ray misses it.
///
/// Grazing rays, those whose line passes within [`EPS_TAN`] of tangency to
/// the circle, report a `tangential` hit at the closest-approach point
/// whether or not the discriminant is positive.
pub fn ray_arc_intersection(
    origin: Point,
    dir: UnitVector,
    arc: &ArcPiece,
    t_min: f64,
) -> Option<Hit> {
    let d = dir.as_vec();
    let oc = origin - arc.center;
    // |oc + t d|^2 = r^2 with |d| = 1: t^2 + 2 b t + c0 = 0.
    let b = oc.dot(d);
    let c0 = oc.dot(oc) - arc.radius * arc.radius;
    // Perpendicular distance from the center to the ray's line.
    let perp = oc.cross(d).abs();

    if (perp - arc.radius).abs() <= EPS_TAN {
        // Grazing line: report the closest approach as a tangential contact.
        let t = -b;
        if t <= t_min {
            return None;
        }
        let point = origin.offset(d.scale(t));
        if !arc.contains_angle(arc.angle_of(point)) {
            return None;
        }
        return Some(Hit {
            t,
            point,
            inward_normal: arc.normal_at(point),
            tangential: true,
        });
    }

    let disc = b * b - c0;
    if disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // Roots in increasing order; accept the first one past t_min that lands
    // inside the angular interval.
    for &t in &[-b - sq, -b + sq] {
        if t > t_min {
            let point = origin.offset(d.scale(t));
            if arc.contains_angle(arc.angle_of(point)) {
                return Some(Hit {
                    t,
                    point,
                    inward_normal: arc.normal_at(point),
                    tangential: false,
                });
            }
        }
    }
    None
}

/// Specular reflection of an incoming direction `v` at inward normal `n`:
/// `v' = v - 2 <v, n> n`.
///
/// Requires `<v, n> < 0` (incoming); grazing contacts with
/// `|<v, n>| <= EPS_TAN` are signalled as `None` so the caller can classify
/// the collision singular.
pub fn reflect(v: UnitVector, n: UnitVector) -> Option<UnitVector> {
    let vn = v.dot(n);
    if vn >= -EPS_TAN {
        return None;
    }
    let r = v.as_vec() + n.as_vec().scale(-2.0 * vn);
    Some(UnitVector::new(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn disc(cx: f64, cy: f64, r: f64) -> ArcPiece {
        ArcPiece::full_circle(Point::new(cx, cy), r)
    }

    #[test]
    fn head_on_hit() {
        let arc = disc(0.5, 0.5, 0.25);
        let hit = ray_arc_intersection(
            Point::new(0.0, 0.5),
            UnitVector::new(Vec2::new(1.0, 0.0)),
            &arc,
            0.0,
        )
        .unwrap();
        assert_relative_eq!(hit.t, 0.25, epsilon = 1e-15);
        assert_relative_eq!(hit.point.x, 0.25, epsilon = 1e-15);
        assert_relative_eq!(hit.point.y, 0.5, epsilon = 1e-15);
        assert_relative_eq!(hit.inward_normal.x(), -1.0, epsilon = 1e-15);
        assert_relative_eq!(hit.inward_normal.y(), 0.0, epsilon = 1e-15);
        assert!(!hit.tangential);
    }

    #[test]
    fn tangential_hit_at_touch_point() {
        let arc = disc(0.5, 0.5, 0.25);
        let hit = ray_arc_intersection(
            Point::new(0.0, 0.75),
            UnitVector::new(Vec2::new(1.0, 0.0)),
            &arc,
            0.0,
        )
        .unwrap();
        assert!(hit.tangential);
        assert_relative_eq!(hit.point.x, 0.5, epsilon = 1e-12);
        assert_relative_eq!(hit.point.y, 0.75, epsilon = 1e-12);
    }

    #[test]
    fn oblique_hit_matches_quadratic_oracle() {
        // Independent oracle: the quadratic formula written out by hand,
        // double-checked by bisection on the signed distance function.
        let arc = disc(0.5, 0.5, 0.25);
        let origin = Point::new(0.0, 0.6);
        let dir = UnitVector::new(Vec2::new(1.0, 0.0));

        let expected = 0.5 - (0.25f64 * 0.25 - 0.1 * 0.1).sqrt();
        assert_relative_eq!(expected, 0.270871215252208, epsilon = 1e-12);

        // Bisection oracle on f(t) = |p(t) - c| - r over a bracketing interval.
        let f = |t: f64| {
            Point::new(origin.x + t, origin.y)
                .dist(arc.center)
                - arc.radius
        };
        let (mut lo, mut hi) = (0.0, 0.5);
        assert!(f(lo) > 0.0 && f(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert_relative_eq!(lo, expected, epsilon = 1e-12);

        let hit = ray_arc_intersection(origin, dir, &arc, 0.0).unwrap();
        assert_relative_eq!(hit.t, expected, epsilon = 1e-12);
        assert!(!hit.tangential);
    }

    #[test]
    fn miss_is_none() {
        let arc = disc(0.5, 0.5, 0.25);
        assert!(ray_arc_intersection(
            Point::new(0.0, 0.9),
            UnitVector::new(Vec2::new(1.0, 0.0)),
            &arc,
            0.0
        )
        .is_none());
        // Behind the origin.
        assert!(ray_arc_intersection(
            Point::new(1.0, 0.5),
            UnitVector::new(Vec2::new(1.0, 0.0)),
            &arc,
            0.0
        )
        .is_none());
    }

    #[test]
    fn t_min_skips_departing_contact() {
        let arc = disc(0.5, 0.5, 0.25);
        // Start exactly on the circle heading inward: t_min must skip the
        // origin contact and return the far crossing.
        let hit = ray_arc_intersection(
            Point::new(0.25, 0.5),
            UnitVector::new(Vec2::new(1.0, 0.0)),
            &arc,
            T_MIN_GUARD,
        )
        .unwrap();
        assert_relative_eq!(hit.t, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn angular_interval_excludes_far_side() {
        // Quarter arc on the left of the disc: a ray from the left hits it,
        // a ray from the right sees only the excluded far side.
        let arc = ArcPiece::new(
            Point::new(0.5, 0.5),
            0.25,
            0.75 * core::f64::consts::PI,
            0.5 * core::f64::consts::PI,
        );
        let from_left = ray_arc_intersection(
            Point::new(0.0, 0.5),
            UnitVector::new(Vec2::new(1.0, 0.0)),
            &arc,
            0.0,
        );
        assert!(from_left.is_some());
        let from_right = ray_arc_intersection(
            Point::new(1.0, 0.5),
            UnitVector::new(Vec2::new(-1.0, 0.0)),
            &arc,
            0.0,
        );
        // The near side (right half of the circle) is outside the interval;
        // the ray continues to the left half which it meets from inside.
        let h = from_right.unwrap();
        assert!(h.point.x < 0.5);
    }

    #[test]
    fn reflect_normal_incidence() {
        let v = UnitVector::new(Vec2::new(1.0, 0.0));
        let n = UnitVector::new(Vec2::new(-1.0, 0.0));
        let r = reflect(v, n).unwrap();
        assert_relative_eq!(r.x(), -1.0, epsilon = 1e-15);
        assert_relative_eq!(r.y(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn reflect_45_degrees() {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let v = UnitVector::new(Vec2::new(1.0, 0.0));
        let n = UnitVector::new(Vec2::new(-s, s));
        let r = reflect(v, n).unwrap();
        assert_relative_eq!(r.x(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(r.y(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn reflect_rejects_grazing() {
        let v = UnitVector::new(Vec2::new(1.0, 0.0));
        let n = UnitVector::new(Vec2::new(0.0, 1.0));
        assert!(reflect(v, n).is_none());
    }

    proptest! {
        #[test]
        fn reflect_is_involution_and_preserves_norm(
            a in 0.0..core::f64::consts::TAU,
            b in 0.0..core::f64::consts::TAU,
        ) {
            let v = UnitVector::from_angle(a);
            let n = UnitVector::from_angle(b);
            prop_assume!(v.dot(n) < -1e-6);
            let r = reflect(v, n).unwrap();
            prop_assert!((r.as_vec().norm() - 1.0).abs() <= UNIT_NORM_TOL);
            // Incidence flips sign exactly.
            prop_assert!((r.dot(n) + v.dot(n)).abs() < 1e-12);
            let back = reflect(-r, n).unwrap();
            prop_assert!((back.x() + v.x()).abs() < 1e-12);
            prop_assert!((back.y() + v.y()).abs() < 1e-12);
        }

        #[test]
        fn hit_lies_on_circle_within_interval(
            ox in -2.0..2.0f64,
            oy in -2.0..2.0f64,
            ang in 0.0..core::f64::consts::TAU,
            cx in -1.0..1.0f64,
            cy in -1.0..1.0f64,
            r in 0.05..1.0f64,
            th0 in 0.0..core::f64::consts::TAU,
            span in 0.3..core::f64::consts::TAU,
        ) {
            let arc = ArcPiece::new(Point::new(cx, cy), r, th0, span);
            let origin = Point::new(ox, oy);
            let dir = UnitVector::from_angle(ang);
            if let Some(hit) = ray_arc_intersection(origin, dir, &arc, 0.0) {
                prop_assert!((hit.point.dist(arc.center) - r).abs() <= 1e-10);
                prop_assert!(arc.contains_angle(arc.angle_of(hit.point)));
                prop_assert!(hit.t > 0.0);
            }
        }
    }
}
