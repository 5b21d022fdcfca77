use alloc::vec::Vec;

use proptest::prelude::*;

use super::*;
use crate::quadrature::GaussLegendre;

/// Direct convolution of the slope-`(1+η)` ramp with the normalized bump.
fn phi2_by_convolution(eta: f64, s: f64) -> f64 {
    let w = eta / (2.0 * (1.0 + eta));
    let ramp = |t: f64| (1.0 - (1.0 + eta) * (t - w)).clamp(0.0, 1.0);
    let gl = GaussLegendre::new(24);
    let mut num = 0.0;
    let mut z = 0.0;
    // Panels keep the ramp kinks off the interior of each panel.
    let mut cuts: Vec<f64> = (0..=64).map(|i| -1.0 + i as f64 / 32.0).collect();
    for kink in [(s - w) / w, (s - 1.0 + w) / w] {
        if kink > -1.0 && kink < 1.0 {
            cuts.push(kink);
        }
    }
    cuts.sort_by(f64::total_cmp);
    for pair in cuts.windows(2) {
        for (x, wt) in gl.mapped(pair[0], pair[1]) {
            let r = (-1.0 / (1.0 - x * x)).exp();
            num += wt * r * ramp(s - w * x);
            z += wt * r;
        }
    }
    num / z
}

fn samples(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
}

#[test]
fn bump_normalization_matches_quadrature() {
    let table = BumpTable::new();
    let z = adaptive(-1.0, 1.0, 1e-16, bump);
    assert!((table.z - z).abs() < 1e-14);
    assert!((z - 0.443_993_816_168_079_4).abs() < 1e-13);
}

#[test]
fn phi2_matches_direct_convolution() {
    for eta in [1.0, 0.3, 0.01] {
        let phi = CutoffFunction::phi2(eta).unwrap();
        for s in samples(-0.1, 1.1, 97) {
            let oracle = phi2_by_convolution(eta, s);
            assert!(
                (phi.value(s) - oracle).abs() < 1e-12,
                "η={eta} s={s}: {} vs {oracle}",
                phi.value(s)
            );
        }
    }
}

#[test]
fn table_agrees_with_exact_quadrature() {
    let tab = CutoffFunction::phi2(0.5).unwrap();
    let exact = tab.clone().with_exact_evaluation(true);
    for s in samples(0.0, 1.0, 200) {
        let (a, b) = (tab.eval(s), exact.eval(s));
        assert!((a.0 - b.0).abs() < 1e-13);
        assert!((a.1 - b.1).abs() < 1e-12);
        assert!((a.2 - b.2).abs() < 1e-12 * (1.0 + b.2.abs()));
    }
}

#[test]
fn phi2_examples() {
    let eta = 0.2;
    let phi = CutoffFunction::phi2(eta).unwrap();
    assert_eq!(phi.value(-1.0), 1.0);
    assert_eq!(phi.value(2.0), 0.0);
    let v = phi.value(0.5);
    assert!(v > 0.0 && v < 1.0);
    let sup = samples(-0.5, 1.5, 100_000).map(|s| phi.d1(s).abs()).fold(0.0, f64::max);
    assert!(sup <= 1.0 + eta);
    assert!(samples(-0.5, 1.5, 10_000).all(|s| phi.d1(s) <= 0.0));
    assert!(CutoffFunction::phi2(0.0).is_err());
    assert!(CutoffFunction::phi2(-1.0).is_err());
}

#[test]
fn phi1_examples() {
    let phi = CutoffFunction::phi1(0.5, 1.0, 0.1).unwrap();
    assert_eq!(phi.value(0.5005), 1.0);
    assert_eq!(phi.value(0.9995), 0.0);
    assert_eq!(phi.value(0.0), 1.0);
    let sup = samples(0.0, 1.2, 100_000).map(|s| phi.d1(s).abs()).fold(0.0, f64::max);
    assert!(sup <= 2.1);
    assert!(sup >= 1.0 / 0.498);
    assert!(CutoffFunction::phi1(0.5, 1.0, 0.2).is_err());
    assert!(CutoffFunction::phi1(1.0, 0.5, 0.1).is_err());
    assert!(CutoffFunction::phi1(0.5, 1.0, 0.0).is_err());
}

#[test]
fn psi_examples() {
    let (d1, d2, eps) = (0.5, 1.0, 0.1);
    let phi = CutoffFunction::phi1(d1, d2, eps).unwrap();
    let psi = CutoffFunction::psi(&phi).unwrap();
    let e3 = eps * eps * eps;
    assert_eq!(psi.value(d1 + 2.0 * e3), 1.0);
    assert_eq!(psi.value(0.5 * (d1 + d2)), 1.0);
    assert_eq!(psi.value(0.5 * d1), 0.0);
    assert!(samples(0.0, 1.5, 100_000).all(|s| {
        let v = psi.value(s);
        (0.0..=1.0).contains(&v)
    }));
    assert!(CutoffFunction::psi(&psi).is_err());
    assert!(CutoffFunction::psi(&CutoffFunction::phi2(0.1).unwrap()).is_err());
}

#[test]
fn taylor_examples() {
    assert_eq!(taylor_bound_check(0.0).unwrap(), (1.0, 1.0));
    assert_eq!(taylor_bound_check(0.5).unwrap(), (2.0, 3.0));
    let (e, b) = taylor_bound_check(0.25).unwrap();
    assert!((e - 4.0 / 3.0).abs() < 1e-15);
    assert!((b - (1.0 + 0.25 / 0.5625)).abs() < 1e-15);
    assert!(taylor_bound_check(0.6).is_err());
    assert!(taylor_bound_check(-0.1).is_err());
}

#[test]
fn knots_bracket_the_transitions() {
    let phi = CutoffFunction::phi1(0.3, 0.8, 0.1).unwrap();
    let k = phi.knots();
    assert!(k.windows(2).all(|p| p[0] < p[1]));
    assert!((k[0] - (0.3 + 1e-3)).abs() < 1e-15);
    assert!((*k.last().unwrap() - phi.support_end()).abs() < 1e-15);
    let psi = CutoffFunction::psi(&phi).unwrap();
    let k = psi.knots();
    assert_eq!(k[0], 0.3);
    assert_eq!(*k.last().unwrap(), 0.8);
}

/// Observed order of centered differences on a halving sequence.
fn fd_order(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, s: f64, h0: f64) -> f64 {
    let err = |h: f64| ((f(s + h) - f(s - h)) / (2.0 * h) - df(s)).abs();
    let (e1, e2) = (err(h0), err(h0 / 2.0));
    (e1 / e2).log2()
}

#[test]
fn derivatives_match_finite_differences() {
    for phi in [
        CutoffFunction::phi1(0.5, 1.0, 0.1).unwrap(),
        CutoffFunction::phi1(0.2, 2.0, 0.4).unwrap(),
    ] {
        let k = phi.knots();
        let width = k[1] - k[0];
        for s in [0.25, 0.4, 0.7]
            .iter()
            .flat_map(|t| [k[0] + t * width, k[2] + t * width])
        {
            let p1 = fd_order(|x| phi.value(x), |x| phi.d1(x), s, width / 16.0);
            let p2 = fd_order(|x| phi.d1(x), |x| phi.d2(x), s, width / 16.0);
            assert!(p1 >= 1.9, "φ' order {p1} at {s}");
            assert!(p2 >= 1.9, "φ'' order {p2} at {s}");
        }
        // On the linear stretch the differences are exact up to rounding.
        let mid = 0.5 * (k[1] + k[2]);
        let h = 1e-4;
        let fd = (phi.value(mid + h) - phi.value(mid - h)) / (2.0 * h);
        assert!((fd - phi.d1(mid)).abs() < 1e-9);
        assert_eq!(phi.d2(mid), 0.0);
    }
}

fn valid_triple() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.01f64..5.0, 0.01f64..5.0, 0.01f64..1.0)
        .prop_map(|(d1, gap, frac)| (d1, d1 + gap, frac * CutoffFunction::max_epsilon(d1, d1 + gap)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cutoff_conditions_hold((d1, d2, eps) in valid_triple()) {
        let phi = CutoffFunction::phi1(d1, d2, eps).unwrap();
        let bound = 1.0 / (d2 - d1) + eps;
        let e3 = eps * eps * eps;
        for s in samples(0.0, d2 * 1.2, 5000) {
            let (v, dv, _) = phi.eval(s);
            prop_assert!(v >= 0.0);
            prop_assert!(dv <= 0.0);
            prop_assert!(dv.abs() <= bound + 1e-9);
            if s <= d1 + e3 {
                prop_assert_eq!(v, 1.0);
            }
            if s >= d2 - e3 {
                prop_assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn slope_chain_holds((d1, d2, eps) in valid_triple()) {
        let delta = d2 - d1;
        let lhs = (1.0 + eps * eps) / (delta - 2.0 * eps * eps * eps);
        prop_assert!(lhs <= 1.0 / delta + eps);
    }

    #[test]
    fn psi_covers_phi_transition((d1, d2, eps) in valid_triple()) {
        let phi = CutoffFunction::phi1(d1, d2, eps).unwrap();
        let psi = CutoffFunction::psi(&phi).unwrap();
        for s in samples(0.0, d2 * 1.2, 3000) {
            let p = psi.value(s);
            prop_assert!((0.0..=1.0).contains(&p));
            if phi.d1(s) != 0.0 {
                prop_assert_eq!(p, 1.0);
            }
            if s <= d1 || s >= d2 {
                prop_assert_eq!(p, 0.0);
            }
        }
    }

    #[test]
    fn taylor_exact_below_bound(t in 0.0f64..=0.5) {
        let (e, b) = taylor_bound_check(t).unwrap();
        prop_assert!(e <= b);
    }
}
