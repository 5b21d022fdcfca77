use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use proptest::prelude::*;

use super::*;

fn unit_square() -> PolygonDomain {
    PolygonDomain::rectangle(1.0, 1.0, Bc::Dirichlet).unwrap()
}

fn pts(coords: &[(f64, f64)]) -> Vec<Point> {
    coords.iter().copied().map(Point::from).collect()
}

#[test]
fn square_and_l_shape_construct() {
    let sq = unit_square();
    assert_eq!(sq.loops().len(), 1);
    assert_eq!(sq.edges().len(), 4);
    assert!(sq.edges().iter().all(|e| e.bc == Bc::Dirichlet));
    assert!((sq.area() - 1.0).abs() < 1e-15);

    let l = PolygonDomain::l_shape(Bc::Dirichlet).unwrap();
    let corner = VertexId {
        loop_index: 0,
        vertex: 3,
    };
    assert!((l.interior_angle(corner) - 1.5 * PI).abs() < 1e-14);
}

#[test]
fn square_with_neumann_hole() {
    let outer = BoundaryLoop::new(
        pts(&[(0.0, 0.0), (3.0, 0.0), (3.0, 3.0), (0.0, 3.0)]),
        vec![Bc::Dirichlet; 4],
    );
    let hole = BoundaryLoop::new(
        pts(&[(1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (2.0, 1.0)]),
        vec![Bc::Neumann; 4],
    );
    let d = PolygonDomain::new(vec![outer, hole]).unwrap();
    assert_eq!(d.loops().len(), 2);
    assert!((d.area() - 8.0).abs() < 1e-14);
    assert_eq!(d.contains(Point::new(1.5, 1.5)), Membership::Exterior);
    assert_eq!(d.contains(Point::new(0.5, 1.5)), Membership::Interior);
    assert!((d.nonadjacent_distance(Point::new(0.5, 1.5)).unwrap() - 0.5).abs() < 1e-15);
    // A hole corner is concave from inside Ω.
    let class = d.classify_point(Point::new(1.0, 1.0)).unwrap();
    assert!(matches!(class, PointClass::ConcaveCorner { .. }));
    assert!((class.theta0() - 1.5 * PI).abs() < 1e-14);
}

#[test]
fn rejects_invalid_loops() {
    let bow = BoundaryLoop::new(
        pts(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]),
        vec![Bc::Dirichlet; 4],
    );
    assert!(matches!(
        PolygonDomain::new(vec![bow]),
        Err(GeometryError::SelfIntersection { loop_index: 0, .. })
    ));

    let cw = BoundaryLoop::new(
        pts(&[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)]),
        vec![Bc::Dirichlet; 4],
    );
    assert!(matches!(
        PolygonDomain::new(vec![cw]),
        Err(GeometryError::WrongOrientation { loop_index: 0 })
    ));

    let outer = BoundaryLoop::new(
        pts(&[(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)]),
        vec![Bc::Dirichlet; 4],
    );
    let crossing_hole = BoundaryLoop::new(
        pts(&[(1.0, 1.0), (1.0, 3.0), (1.5, 3.0), (1.5, 1.0)]),
        vec![Bc::Neumann; 4],
    );
    assert!(matches!(
        PolygonDomain::new(vec![outer.clone(), crossing_hole]),
        Err(GeometryError::OverlappingLoops { .. })
    ));

    let outside_hole = BoundaryLoop::new(
        pts(&[(3.0, 3.0), (3.0, 4.0), (4.0, 4.0), (4.0, 3.0)]),
        vec![Bc::Neumann; 4],
    );
    assert!(matches!(
        PolygonDomain::new(vec![outer, outside_hole]),
        Err(GeometryError::Disconnected { loop_index: 1 })
    ));

    let short = BoundaryLoop::new(pts(&[(0.0, 0.0), (1.0, 0.0)]), vec![Bc::Dirichlet; 2]);
    assert!(matches!(
        PolygonDomain::new(vec![short]),
        Err(GeometryError::TooFewVertices { .. })
    ));

    let mismatch = BoundaryLoop::new(pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]), vec![Bc::Dirichlet; 2]);
    assert!(matches!(
        PolygonDomain::new(vec![mismatch]),
        Err(GeometryError::BcCountMismatch { .. })
    ));
}

#[test]
fn classify_examples() {
    let sq = unit_square();
    match sq.classify_point(Point::new(0.0, 0.0)).unwrap() {
        PointClass::ConvexCorner { theta0, .. } => assert!((theta0 - PI / 2.0).abs() < 1e-14),
        other => panic!("{other:?}"),
    }
    match sq.classify_point(Point::new(0.5, 0.0)).unwrap() {
        PointClass::EdgeInterior { edge } => assert_eq!(edge.edge, 0),
        other => panic!("{other:?}"),
    }
    assert_eq!(sq.classify_point(Point::new(0.5, 0.5)).unwrap(), PointClass::Interior);
    assert!(sq.classify_point(Point::new(2.0, 2.0)).is_err());

    let l = PolygonDomain::l_shape(Bc::Dirichlet).unwrap();
    match l.classify_point(Point::new(1.0, 1.0)).unwrap() {
        PointClass::ConcaveCorner { theta0, .. } => assert!((theta0 - 1.5 * PI).abs() < 1e-14),
        other => panic!("{other:?}"),
    }
}

#[test]
fn flat_vertex_is_edge_interior() {
    let d = PolygonDomain::new(vec![BoundaryLoop::new(
        pts(&[(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]),
        vec![Bc::Dirichlet; 5],
    )])
    .unwrap();
    let c = d.classify_point(Point::new(0.5, 0.0)).unwrap();
    assert!(matches!(c, PointClass::EdgeInterior { .. }));
    assert!((d.nonadjacent_distance(Point::new(0.5, 0.0)).unwrap() - 0.5).abs() < 1e-15);
    assert!(d
        .corner_frames(VertexId {
            loop_index: 0,
            vertex: 1
        })
        .is_err());
}

#[test]
fn contains_examples() {
    let sq = unit_square();
    assert_eq!(sq.contains(Point::new(0.5, 0.5)), Membership::Interior);
    assert_eq!(sq.contains(Point::new(0.0, 0.3)), Membership::Boundary);
    assert_eq!(sq.contains(Point::new(2.0, 2.0)), Membership::Exterior);
}

#[test]
fn nonadjacent_distance_examples() {
    let sq = unit_square();
    let d = |x, y| sq.nonadjacent_distance(Point::new(x, y)).unwrap();
    assert_eq!(d(0.0, 0.0), 1.0);
    assert_eq!(d(0.5, 0.0), 0.5);
    assert_eq!(d(0.5, 0.5), 0.5);
    let l = PolygonDomain::l_shape(Bc::Dirichlet).unwrap();
    assert!((l.nonadjacent_distance(Point::new(1.0, 1.0)).unwrap() - 1.0).abs() < 1e-15);
}

fn check_frames(frames: &CornerFrames, d: &PolygonDomain) {
    for side in [FrameSide::Upper, FrameSide::Lower] {
        let f = frames.frame(side);
        assert!(f.tangent.dot(f.normal).abs() < 1e-14);
        assert!((f.tangent.norm() - 1.0).abs() < 1e-14);
        assert!((f.normal.norm() - 1.0).abs() < 1e-14);
        assert!(f.a > 0.0);
        assert!((f.c - f.a.hypot(f.b)).abs() < 1e-15);
        // The side really is the loop edge, and the normal points out of Ω.
        let e = d.edge(f.edge);
        let on_side = frames.motion.to_world(f.tangent * (0.25 * e.length()));
        assert!(e.distance_to(on_side) < 1e-12);
        let n = frames.world_normal(side);
        assert!((n.dot(e.outward_normal()) - 1.0).abs() < 1e-12);
        assert_eq!(d.contains(on_side - n * 1e-3), Membership::Interior);
        assert_eq!(d.contains(on_side + n * 1e-3), Membership::Exterior);
    }
}

#[test]
fn corner_frame_examples() {
    let sq = unit_square();
    let f = sq
        .corner_frames(VertexId {
            loop_index: 0,
            vertex: 0,
        })
        .unwrap();
    assert!((f.upper.a - 1.0).abs() < 1e-15 && (f.upper.b - 1.0).abs() < 1e-15);
    assert!((f.upper.c - 2f64.sqrt()).abs() < 1e-15);
    assert!((f.upper.tangent.x - FRAC_1_SQRT_2).abs() < 1e-15);
    assert!((f.upper.tangent.y - FRAC_1_SQRT_2).abs() < 1e-15);
    assert!((f.upper.normal.x + FRAC_1_SQRT_2).abs() < 1e-15);
    assert!((f.upper.normal.y - FRAC_1_SQRT_2).abs() < 1e-15);
    check_frames(&f, &sq);

    let l = PolygonDomain::l_shape(Bc::Dirichlet).unwrap();
    let f = l
        .corner_frames(VertexId {
            loop_index: 0,
            vertex: 3,
        })
        .unwrap();
    assert!((f.upper.b + 1.0).abs() < 1e-14);
    assert!((f.upper.normal.x + FRAC_1_SQRT_2).abs() < 1e-14);
    assert!((f.upper.normal.y + FRAC_1_SQRT_2).abs() < 1e-14);
    check_frames(&f, &l);

    let tri = PolygonDomain::sector(PI / 3.0, 1.0, 1, Bc::Dirichlet, Bc::Dirichlet, Bc::Dirichlet).unwrap();
    let f = tri
        .corner_frames(VertexId {
            loop_index: 0,
            vertex: 0,
        })
        .unwrap();
    assert!((f.upper.a / f.upper.b - (PI / 6.0).tan()).abs() < 1e-14);
    assert!(f.motion.angle.abs() < 1e-15);
    check_frames(&f, &tri);
}

#[test]
fn sector_frames_match_construction() {
    for theta0 in [PI / 3.0, PI / 2.0, PI, 1.5 * PI, 1.75 * PI] {
        let d = PolygonDomain::sector(theta0, 1.0, 24, Bc::Dirichlet, Bc::Neumann, Bc::Dirichlet).unwrap();
        let f = d.boundary_frames(Point::ORIGIN).unwrap();
        assert!((f.theta0 - theta0).abs() < 1e-13);
        assert!(f.motion.origin.norm() < 1e-15);
        assert!(f.motion.angle.abs() < 1e-13);
        assert_eq!(d.edge(f.upper.edge).bc, Bc::Dirichlet);
        assert_eq!(d.edge(f.lower.edge).bc, Bc::Neumann);
        check_frames(&f, &d);
    }
}

#[test]
fn edge_point_frames() {
    let sq = unit_square();
    let f = sq.boundary_frames(Point::new(0.5, 0.0)).unwrap();
    assert_eq!(f.theta0, PI);
    assert!((f.motion.angle - PI / 2.0).abs() < 1e-15);
    check_frames(&f, &sq);
    assert!(sq.boundary_frames(Point::new(0.5, 0.5)).is_err());
}

/// Star-shaped polygon about the origin with radii `r[k]` at angles `2πk/n + jitter`.
fn star(radii: &[f64], jitter: &[f64]) -> PolygonDomain {
    let n = radii.len();
    let vertices = (0..n)
        .map(|k| {
            let t = TAU * (k as f64 + 0.2 * jitter[k]) / n as f64;
            Point::polar(t) * radii[k]
        })
        .collect();
    PolygonDomain::new(vec![BoundaryLoop::new(vertices, vec![Bc::Dirichlet; n])]).unwrap()
}

fn brute_force_boundary_distance(d: &PolygonDomain, p: Point) -> f64 {
    let mut best = f64::INFINITY;
    for e in d.edges() {
        let n = 4000;
        for j in 0..=n {
            best = best.min(p.dist(e.a.lerp(e.b, j as f64 / n as f64)));
        }
    }
    best
}

fn star_inputs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (3usize..10).prop_flat_map(|n| {
        (
            proptest::collection::vec(0.5f64..2.0, n),
            proptest::collection::vec(-1.0f64..1.0, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn interior_distance_matches_dense_sampling((radii, jitter) in star_inputs(), s in 0.0f64..0.4, t in 0.0f64..TAU) {
        let d = star(&radii, &jitter);
        let p = Point::polar(t) * (s * radii.iter().cloned().fold(f64::INFINITY, f64::min) * 0.5);
        prop_assume!(d.contains(p) == Membership::Interior);
        let exact = d.nonadjacent_distance(p).unwrap();
        let sampled = brute_force_boundary_distance(&d, p);
        // Sampling overestimates by at most half the sample spacing squared over the distance.
        prop_assert!(exact <= sampled + 1e-12);
        let spacing = d.edges().iter().map(|e| e.length()).fold(0.0, f64::max) / 4000.0;
        prop_assert!(sampled - exact <= 1e-9 + spacing * spacing / exact.max(1e-3));
    }

    #[test]
    fn turning_angles_sum_to_two_pi((radii, jitter) in star_inputs()) {
        let d = star(&radii, &jitter);
        let total: f64 = (0..d.loops()[0].len())
            .map(|k| PI - d.interior_angle(VertexId { loop_index: 0, vertex: k }))
            .sum();
        prop_assert!((total - TAU).abs() < 1e-10);
    }

    #[test]
    fn distance_invariant_under_rigid_motion(
        (radii, jitter) in star_inputs(),
        rot in 0.0f64..TAU,
        dx in -5.0f64..5.0,
        dy in -5.0f64..5.0,
        pick in 0usize..3,
        s in 0.0f64..1.0,
    ) {
        let d = star(&radii, &jitter);
        let m = RigidMotion::new(Point::new(dx, dy), rot);
        let moved = PolygonDomain::new(vec![BoundaryLoop::new(
            d.loops()[0].vertices.iter().map(|v| m.to_world(*v)).collect(),
            d.loops()[0].bc.clone(),
        )]).unwrap();
        let e = d.edges()[0];
        let p = match pick {
            0 => e.a,
            1 => e.a.lerp(e.b, 0.25 + 0.5 * s),
            _ => Point::polar(rot) * (0.02 * s),
        };
        let a = d.nonadjacent_distance(p).unwrap();
        let b = moved.nonadjacent_distance(m.to_world(p)).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn corner_frames_are_orthonormal_and_outward((radii, jitter) in star_inputs(), k in 0usize..10) {
        let d = star(&radii, &jitter);
        let v = VertexId { loop_index: 0, vertex: k % radii.len() };
        if let Ok(f) = d.corner_frames(v) {
            for side in [FrameSide::Upper, FrameSide::Lower] {
                let fr = f.frame(side);
                prop_assert!(fr.tangent.dot(fr.normal).abs() < 1e-14);
                prop_assert!((fr.tangent.norm() - 1.0).abs() < 1e-14);
                prop_assert!((fr.normal.norm() - 1.0).abs() < 1e-14);
                let e = d.edge(fr.edge);
                prop_assert!((f.world_normal(side).dot(e.outward_normal()) - 1.0).abs() < 1e-12);
            }
            prop_assert_eq!(f.upper.b > 0.0, f.theta0 < PI);
        }
    }
}
