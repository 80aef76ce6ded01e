//! Independent oracles for the collision map and its tangent factor: a
//! fine-step ray march through the world geometry, and finite differences
//! of the boundary chart through the flow.

use lorentz_core::analysis::MuSampler;
use lorentz_core::config::canonical_tube_catalog;
use lorentz_core::dynamics::{
    cast_ray, flight_factor, next_collision, Guards, LineElement,
};
use lorentz_core::geometry::{Point, UnitVector, Vec2};
use lorentz_core::rng::{stream, uniform_in};
use lorentz_core::world::{CellIndex, World};
use std::sync::Arc;

fn blocking_tube() -> World {
    World::constant(Arc::new(canonical_tube_catalog()), 1)
}

/// Fine-step march through the world: the first sign change of the radial
/// defect against any disc of the cell currently hosting the walker,
/// refined by bisection.
fn march_to_collision(world: &World, origin: Point, dir: UnitVector, step: f64) -> (f64, Point) {
    let defect = |t: f64| -> f64 {
        let p = origin.offset(dir.as_vec().scale(t));
        let cell = CellIndex::new(p.x.floor() as i64, p.y.floor() as i64);
        let cfg = world.config_at(cell);
        let mut best = f64::INFINITY;
        for d in cfg.discs() {
            let c = Point::new(d.center.x + cell.x as f64, d.center.y + cell.y as f64);
            best = best.min(p.dist(c) - d.radius);
        }
        best
    };
    let mut t = step; // skip the departing contact
    while defect(t) <= 0.0 {
        t += step; // walk out of the starting disc first
    }
    loop {
        let t_next = t + step;
        if defect(t_next) <= 0.0 {
            let (mut lo, mut hi) = (t, t_next);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if defect(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t_star = 0.5 * (lo + hi);
            return (t_star, origin.offset(dir.as_vec().scale(t_star)));
        }
        t = t_next;
        assert!(t < 100.0, "marching oracle found no collision");
    }
}

#[test]
fn oblique_shot_matches_marching_oracle() {
    // The canonical oblique shot: from a gate point at angle 0.3.
    let world = blocking_tube();
    let origin = Point::new(0.0, 0.5);
    let dir = UnitVector::new(Vec2::new(0.3f64.cos(), 0.3f64.sin()));
    let contact = cast_ray(&world, CellIndex::ORIGIN, origin, dir, Guards::default(), 0.0)
        .expect("regular contact");
    let (t_oracle, p_oracle) = march_to_collision(&world, origin, dir, 1e-5);
    assert!((contact.t - t_oracle).abs() <= 1e-6, "{} vs {}", contact.t, t_oracle);
    assert!(contact.point.dist(p_oracle) <= 1e-6);
}

#[test]
fn random_shots_match_marching_oracle() {
    let world = blocking_tube();
    let mut rng = stream(0xbeef, 1);
    let mut compared = 0;
    while compared < 60 {
        let u = uniform_in(&mut rng, 0.31, 0.69);
        let ang = uniform_in(&mut rng, -1.2, 1.2);
        let origin = Point::new(0.0, u);
        let dir = UnitVector::from_angle(ang);
        let Ok(contact) = cast_ray(&world, CellIndex::ORIGIN, origin, dir, Guards::default(), 0.0)
        else {
            continue; // singular shot: the oracle has nothing to compare
        };
        // Skip shallow contacts where a stepped method is unreliable.
        if contact.normal.dot(dir) > -0.05 {
            continue;
        }
        let (t_oracle, p_oracle) = march_to_collision(&world, origin, dir, 1e-5);
        assert!(
            (contact.t - t_oracle).abs() <= 1e-6,
            "t {} vs oracle {}",
            contact.t,
            t_oracle
        );
        assert!(contact.point.dist(p_oracle) <= 1e-6);
        compared += 1;
    }
}

/// Central-difference Jacobian of the collision map in boundary coordinates
/// (arclength along the arc, signed incidence angle).
fn fd_jacobian(world: &World, x: &LineElement, delta: f64) -> Option<[[f64; 2]; 2]> {
    let base = next_collision(world, x, Guards::default()).ok()?;
    let arc = &world.config_at(x.cell).arcs()[x.arc];
    let theta0 = arc.angle_of(x.local_q());
    let phi0 = x.phi(world);
    let dtheta = delta / arc.radius;

    let probe = |theta: f64, phi: f64| -> Option<(f64, f64)> {
        let xp = LineElement::from_arc(world, x.cell, x.arc, theta, phi);
        let ev = next_collision(world, &xp, Guards::default()).ok()?;
        // All probes must land on the same arc for differences to make sense.
        if ev.to.cell != base.to.cell || ev.to.arc != base.to.arc {
            return None;
        }
        let (r1, phi1) = ev.to.boundary_coords(world);
        Some((r1, phi1))
    };

    let (r_pr, f_pr) = probe(theta0 + dtheta, phi0)?;
    let (r_mr, f_mr) = probe(theta0 - dtheta, phi0)?;
    let (r_pf, f_pf) = probe(theta0, phi0 + delta)?;
    let (r_mf, f_mf) = probe(theta0, phi0 - delta)?;
    Some([
        [(r_pr - r_mr) / (2.0 * delta), (r_pf - r_mf) / (2.0 * delta)],
        [(f_pr - f_mr) / (2.0 * delta), (f_pf - f_mf) / (2.0 * delta)],
    ])
}

#[test]
fn period_two_factor_matches_finite_differences() {
    // Period-2 rig: the hand value is -[[3, 0.5], [16, 3]].
    let world = {
        use lorentz_core::config::{Catalog, Disc, GateSpec, LocalConfiguration, Side};
        use lorentz_core::world::{CellSource, WorldKind};
        let gates = vec![
            GateSpec::full(Side::Left),
            GateSpec::full(Side::Right),
            GateSpec::full(Side::Bottom),
            GateSpec::full(Side::Top),
        ];
        let b = LocalConfiguration::unchecked(1, vec![Disc::new(0.5, 0.5, 0.25)], gates.clone(), true);
        let nb = LocalConfiguration::unchecked(2, vec![Disc::new(0.5, 0.5, 0.25)], gates, false);
        World::new(
            Arc::new(Catalog::new(WorldKind::Gas, vec![b, nb]).unwrap()),
            CellSource::Constant(1),
            None,
        )
        .unwrap()
    };
    let x = LineElement::from_arc(&world, CellIndex::ORIGIN, 0, 0.0, 0.0);
    let jac = fd_jacobian(&world, &x, 1e-6).expect("probes stay on the partner disc");
    let expected = [[-3.0, -0.5], [-16.0, -3.0]];
    for i in 0..2 {
        for j in 0..2 {
            assert!(
                (jac[i][j] - expected[i][j]).abs() < 1e-4,
                "entry ({i},{j}): fd {} vs {}",
                jac[i][j],
                expected[i][j]
            );
        }
    }
}

#[test]
fn tangent_factor_matches_finite_differences_along_orbits() {
    let world = blocking_tube();
    let sampler = MuSampler::new(&world, &[CellIndex::ORIGIN]).unwrap();
    let mut compared = 0;
    let mut index = 0u64;
    while compared < 120 && index < 4000 {
        index += 1;
        let x = sampler.sample(&world, 0x5eed, index);
        let Ok(ev) = next_collision(&world, &x, Guards::default()) else {
            continue;
        };
        let cos_phi1 = ev.to.cos_phi(&world);
        if cos_phi1 < 0.15 {
            continue; // factor entries blow up; finite differences degrade
        }
        let Some(jac) = fd_jacobian(&world, &x, 1e-7) else {
            continue;
        };
        let f = flight_factor(
            ev.tau,
            ev.from.curvature(&world),
            ev.to.curvature(&world),
            ev.from.cos_phi(&world),
            cos_phi1,
        );
        for i in 0..2 {
            for j in 0..2 {
                let tol = 1e-3 * (1.0 + f[i][j].abs());
                assert!(
                    (jac[i][j] - f[i][j]).abs() < tol,
                    "entry ({i},{j}): fd {} vs formula {} (event {ev:?})",
                    jac[i][j],
                    f[i][j]
                );
            }
        }
        compared += 1;
    }
    assert!(compared >= 100, "only {compared} comparable events");
}
