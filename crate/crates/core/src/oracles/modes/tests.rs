use alloc::vec::Vec;
use core::f64::consts::PI;

use super::*;
use crate::quadrature::GaussLegendre;
use crate::rng::SplitMix64;

fn all_modes() -> Vec<AnalyticMode> {
    let mut out = alloc::vec![
        AnalyticMode::rectangle(1.0, 1.0, 1, 1, Bc::Dirichlet).unwrap(),
        AnalyticMode::rectangle(2.0, 1.0, 3, 2, Bc::Dirichlet).unwrap(),
        AnalyticMode::rectangle(1.0, 1.5, 0, 3, Bc::Neumann).unwrap(),
        AnalyticMode::rectangle(1.0, 1.0, 4, 1, Bc::Neumann).unwrap(),
        AnalyticMode::triangle(2, 1).unwrap(),
        AnalyticMode::triangle(7, 3).unwrap(),
    ];
    for theta0 in [PI / 3.0, PI / 2.0, PI, 1.5 * PI, 1.75 * PI] {
        for (up, lo) in [
            (Bc::Dirichlet, Bc::Dirichlet),
            (Bc::Neumann, Bc::Neumann),
            (Bc::Dirichlet, Bc::Neumann),
            (Bc::Neumann, Bc::Dirichlet),
        ] {
            for lambda in [8.0, 40.0] {
                out.push(AnalyticMode::sector_harmonic(theta0, 1, lambda, up, lo).unwrap());
            }
        }
    }
    out
}

/// A point drawn uniformly from the mode's natural region.
fn random_point(mode: &AnalyticMode, rng: &mut SplitMix64) -> Point {
    match mode.shape() {
        ModeShape::Rectangle { lx, ly, .. } => Point::new(lx * rng.next_f64(), ly * rng.next_f64()),
        ModeShape::Triangle { .. } => {
            let (a, b) = (rng.next_f64(), rng.next_f64());
            Point::new(a.max(b), a.min(b))
        }
        ModeShape::Sector { theta0, .. } => {
            let r = 0.01 + rng.next_f64();
            let t = (rng.next_f64() - 0.5) * theta0;
            Point::polar(t) * r
        }
    }
}

#[test]
fn rectangle_examples() {
    let m = AnalyticMode::rectangle(1.0, 1.0, 1, 1, Bc::Dirichlet).unwrap();
    assert!((m.lambda_sq() - 2.0 * PI * PI).abs() < 1e-12);
    let c = AnalyticMode::rectangle(1.0, 1.0, 0, 0, Bc::Neumann).unwrap();
    assert_eq!(c.lambda(), 0.0);
    assert_eq!(c.value(Point::new(0.3, 0.9)), 1.0);
    let r = AnalyticMode::rectangle(2.0, 1.0, 2, 1, Bc::Dirichlet).unwrap();
    assert!((r.lambda_sq() - 2.0 * PI * PI).abs() < 1e-12);
    assert!(AnalyticMode::rectangle(1.0, 1.0, 0, 1, Bc::Dirichlet).is_err());
}

#[test]
fn triangle_examples() {
    let t = AnalyticMode::triangle(2, 1).unwrap();
    assert!((t.lambda_sq() - 5.0 * PI * PI).abs() < 1e-12);
    assert!((AnalyticMode::triangle(3, 1).unwrap().lambda_sq() - 10.0 * PI * PI).abs() < 1e-12);
    assert!(AnalyticMode::triangle(1, 1).is_err());
    assert!(AnalyticMode::triangle(1, 2).is_err());
    for s in [0.1, 0.37, 0.8] {
        assert!(t.value(Point::new(s, 0.0)).abs() < 1e-15);
        assert!(t.value(Point::new(1.0, s)).abs() < 1e-14);
        assert!(t.value(Point::new(s, s)).abs() < 1e-15);
    }
}

/// Tensor Gauss–Legendre over `x ∈ [0, lx]`, `y ∈ [0, top(x)]`.
fn norm_sq(mode: &AnalyticMode, lx: f64, top: impl Fn(f64) -> f64) -> f64 {
    let gl = GaussLegendre::new(60);
    let mut total = 0.0;
    for (x, wx) in gl.mapped(0.0, lx) {
        for (y, wy) in gl.mapped(0.0, top(x)) {
            total += wx * wy * mode.value(Point::new(x, y)).powi(2);
        }
    }
    total
}

#[test]
fn global_modes_are_normalized() {
    for (mode, lx, ly) in [
        (
            AnalyticMode::rectangle(2.0, 1.0, 3, 2, Bc::Dirichlet).unwrap(),
            2.0,
            1.0,
        ),
        (AnalyticMode::rectangle(1.0, 1.5, 0, 3, Bc::Neumann).unwrap(), 1.0, 1.5),
        (AnalyticMode::rectangle(1.0, 1.0, 4, 1, Bc::Neumann).unwrap(), 1.0, 1.0),
    ] {
        assert!((norm_sq(&mode, lx, |_| ly) - 1.0).abs() < 1e-12);
    }
    for (m, n) in [(2, 1), (5, 3)] {
        let t = AnalyticMode::triangle(m, n).unwrap();
        assert!((norm_sq(&t, 1.0, |x| x) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn pde_residual_is_small() {
    let mut rng = SplitMix64::new(11);
    for mode in all_modes() {
        let pts: Vec<Point> = (0..100).map(|_| random_point(&mode, &mut rng)).collect();
        let umax = pts.iter().map(|p| mode.value(*p).abs()).fold(0.0, f64::max);
        let l2 = mode.lambda_sq();
        for p in pts {
            let s = mode.sample(p);
            let res = s.hessian.trace() + l2 * s.value;
            assert!(res.abs() <= 1e-9 * l2 * umax, "{:?} at {p:?}: {res}", mode.shape());
        }
    }
}

#[test]
fn derivatives_match_finite_differences() {
    let mut rng = SplitMix64::new(5);
    for mode in all_modes() {
        for _ in 0..10 {
            let p = random_point(&mode, &mut rng);
            let s = mode.sample(p);
            let h = 1e-6;
            let ex = Point::new(h, 0.0);
            let ey = Point::new(0.0, h);
            let gx = (mode.value(p + ex) - mode.value(p - ex)) / (2.0 * h);
            let gy = (mode.value(p + ey) - mode.value(p - ey)) / (2.0 * h);
            let scale = mode.lambda() * (1.0 + s.value.abs() + s.grad.norm() / mode.lambda());
            assert!((gx - s.grad.x).abs() < 1e-6 * scale);
            assert!((gy - s.grad.y).abs() < 1e-6 * scale);
            let hx = (mode.sample(p + ex).grad - mode.sample(p - ex).grad) * (0.5 / h);
            let hy = (mode.sample(p + ey).grad - mode.sample(p - ey).grad) * (0.5 / h);
            let hs = scale * mode.lambda();
            assert!((hx.x - s.hessian.xx).abs() < 1e-5 * hs);
            assert!((hx.y - s.hessian.xy).abs() < 1e-5 * hs);
            assert!((hy.x - s.hessian.xy).abs() < 1e-5 * hs);
            assert!((hy.y - s.hessian.yy).abs() < 1e-5 * hs);
        }
    }
}

#[test]
fn side_conditions_hold() {
    let mut rng = SplitMix64::new(3);
    for mode in all_modes() {
        let ModeShape::Sector {
            theta0, upper, lower, ..
        } = mode.shape()
        else {
            continue;
        };
        let umax = (0..200)
            .map(|_| mode.value(random_point(&mode, &mut rng)).abs())
            .fold(0.0, f64::max);
        for (angle, bc) in [(0.5 * theta0, upper), (-0.5 * theta0, lower)] {
            let t = Point::polar(angle);
            let outward = if angle > 0.0 { t.perp() } else { -t.perp() };
            for _ in 0..100 {
                let p = t * (0.01 + rng.next_f64());
                let s = mode.sample(p);
                match bc {
                    Bc::Dirichlet => assert!(s.value.abs() <= 1e-10, "{:?}", mode.shape()),
                    Bc::Neumann => {
                        assert!(s.grad.dot(outward).abs() <= 1e-9 * mode.lambda() * umax)
                    }
                }
            }
        }
    }
}

#[test]
fn sector_orders() {
    let m = AnalyticMode::sector_harmonic(PI / 2.0, 1, 5.0, Bc::Dirichlet, Bc::Dirichlet).unwrap();
    assert!((m.nu().unwrap() - 2.0).abs() < 1e-15);
    let c = AnalyticMode::sector_harmonic(1.5 * PI, 1, 5.0, Bc::Dirichlet, Bc::Dirichlet).unwrap();
    assert!((c.nu().unwrap() - 2.0 / 3.0).abs() < 1e-15);
    // u ~ r^{2/3}: the gradient blows up toward the corner.
    let g1 = c.sample(Point::new(1e-4, 0.0)).grad.norm();
    let g2 = c.sample(Point::new(1e-6, 0.0)).grad.norm();
    assert!((g2 / g1 - 100f64.powf(1.0 / 3.0)).abs() < 1e-3);
    let mixed = AnalyticMode::sector_harmonic(PI / 2.0, 1, 5.0, Bc::Dirichlet, Bc::Neumann).unwrap();
    assert!((mixed.nu().unwrap() - 3.0).abs() < 1e-15);
    assert!(AnalyticMode::sector_harmonic(PI, 0, 5.0, Bc::Dirichlet, Bc::Dirichlet).is_err());
    assert!(AnalyticMode::sector_harmonic(PI, 1, 0.0, Bc::Dirichlet, Bc::Dirichlet).is_err());
    assert!(AnalyticMode::sector_harmonic(0.0, 1, 1.0, Bc::Dirichlet, Bc::Dirichlet).is_err());
}

#[test]
fn global_sector_mode_vanishes_on_arc() {
    let m = AnalyticMode::sector_dirichlet_arc(PI / 2.0, 1, 1, 1.0, Bc::Dirichlet, Bc::Dirichlet).unwrap();
    assert!((m.lambda() - 5.135_622_301_840_683).abs() < 1e-12);
    for k in 0..=20 {
        let t = -PI / 4.0 + PI / 2.0 * k as f64 / 20.0;
        assert!(m.value(Point::polar(t)).abs() < 1e-12);
    }
}

#[test]
fn placement_is_a_rigid_motion() {
    let base = AnalyticMode::sector_harmonic(1.5 * PI, 1, 7.0, Bc::Neumann, Bc::Dirichlet).unwrap();
    let motion = RigidMotion::new(Point::new(1.0, 1.0), 1.25 * PI);
    let placed = base.placed(motion);
    let q = Point::new(0.3, -0.2);
    let a = base.sample(q);
    let b = placed.sample(motion.to_world(q));
    assert!((a.value - b.value).abs() < 1e-14);
    assert!((motion.vector_to_world(a.grad) - b.grad).norm() < 1e-12);
    assert!((a.hessian.trace() - b.hessian.trace()).abs() < 1e-10);
}
