use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use proptest::prelude::*;

use super::*;
use crate::discretize::{assemble, triangulate, ElementOrder, Mesh};
use crate::geometry::{Bc, PolygonDomain};
use crate::rng::SplitMix64;

fn diag(values: &[f64]) -> SparseSymMatrix {
    SparseSymMatrix::from_diagonal(values)
}

/// The lowest `count` values `π²(m² + n²)` with multiplicity, by enumeration.
fn square_dirichlet_spectrum(count: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (1..40)
        .flat_map(|m| (1..40).map(move |n| PI * PI * (m * m + n * n) as f64))
        .collect();
    v.sort_by(f64::total_cmp);
    v.truncate(count);
    v
}

fn square_assembly(bc: Bc, h: f64, order: ElementOrder) -> crate::discretize::Assembly {
    let d = PolygonDomain::rectangle(1.0, 1.0, bc).unwrap();
    assemble(Arc::new(triangulate(&d, h, false).unwrap()), order).unwrap()
}

/// Random sparse SPD matrix: a 1-D Laplacian plus random symmetric couplings and a diagonal lift.
fn random_spd(n: usize, seed: u64) -> SparseSymMatrix {
    let mut rng = SplitMix64::new(seed);
    let mut t = Vec::new();
    let mut rowsum = alloc::vec![0.0; n];
    for i in 0..n {
        for _ in 0..3 {
            let j = (rng.next_u64() % n as u64) as usize;
            if j != i {
                let v = rng.next_signed();
                t.push((i as u32, j as u32, v));
                rowsum[i] += v.abs();
                rowsum[j] += v.abs();
            }
        }
    }
    for i in 0..n {
        t.push((i as u32, i as u32, rowsum[i] + 0.1 + rng.next_f64()));
    }
    SparseSymMatrix::from_triplets(n, t)
}

#[test]
fn dense_eigen_matches_known_matrix() {
    // Tridiagonal (2, −1) of size 6: 2 − 2cos(kπ/7).
    let n: usize = 6;
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.abs_diff(j) {
                    0 => 2.0,
                    1 => -1.0,
                    _ => 0.0,
                })
                .collect()
        })
        .collect();
    let (d, z) = symmetric_eigen(&a);
    for (k, v) in d.iter().enumerate() {
        let e = 2.0 - 2.0 * (PI * (k + 1) as f64 / 7.0).cos();
        assert!((v - e).abs() < 1e-13);
    }
    for i in 0..n {
        for j in 0..n {
            let dotp: f64 = (0..n).map(|r| z[r][i] * z[r][j]).sum();
            let e = if i == j { 1.0 } else { 0.0 };
            assert!((dotp - e).abs() < 1e-13);
        }
    }
}

#[test]
fn ldlt_solves_and_counts_inertia() {
    let a = random_spd(200, 7);
    let f = Ldlt::factor_rcm(&a);
    assert_eq!(f.negative_pivots(), 0);
    let x: Vec<f64> = (0..200).map(|i| (i as f64 * 0.37).sin()).collect();
    let b = a.mul_vec(&x);
    let y = f.solve(&b);
    for (u, v) in x.iter().zip(&y) {
        assert!((u - v).abs() < 1e-10);
    }
    // Diagonal shift by 2.5 below a spectrum {1,…,6} leaves 2 negative pivots.
    let d = diag(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    let s = d.add_scaled(-2.5, &SparseSymMatrix::identity(6));
    assert_eq!(Ldlt::factor_rcm(&s).negative_pivots(), 2);
}

#[test]
fn rcm_is_a_permutation_and_shrinks_the_envelope() {
    let a = square_assembly(Bc::Dirichlet, 0.1, ElementOrder::P1).stiffness;
    let mut p = rcm_order(&a);
    let natural: Vec<usize> = (0..a.dim()).collect();
    let env_rcm = Ldlt::factor(&a, p.clone()).envelope_size();
    let env_nat = Ldlt::factor(&a, natural.clone()).envelope_size();
    assert!(env_rcm <= env_nat);
    p.sort_unstable();
    assert_eq!(p, natural);
}

#[test]
fn identity_problem() {
    let n = 8;
    let pairs = solve_lowest(
        &SparseSymMatrix::identity(n),
        &SparseSymMatrix::identity(n),
        &SolveOptions::new(3),
    )
    .unwrap();
    assert!(pairs.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
    for i in 0..3 {
        for j in 0..3 {
            let d: f64 = pairs.vectors[i].iter().zip(&pairs.vectors[j]).map(|(a, b)| a * b).sum();
            assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
        }
    }
}

#[test]
fn diagonal_problem() {
    let values: Vec<f64> = (1..=50).map(|k| k as f64).collect();
    let k = diag(&values);
    let m = SparseSymMatrix::identity(50);
    let pairs = solve_lowest(&k, &m, &SolveOptions::new(3)).unwrap();
    for (got, want) in pairs.values.iter().zip([1.0, 2.0, 3.0]) {
        assert!((got - want).abs() < 1e-10);
    }
    let report = residual_report(&k, &m, &pairs.values, &pairs.vectors, 1e-8);
    assert!(report.iter().all(|r| r.residual < 1e-10 && r.within_tol));
}

#[test]
fn request_errors() {
    let k = diag(&[1.0, 2.0]);
    let m = SparseSymMatrix::identity(2);
    assert!(matches!(
        solve_lowest(&k, &m, &SolveOptions::new(3)),
        Err(SolveError::TooManyModes { n: 3, dofs: 2 })
    ));
    assert!(matches!(
        solve_lowest(&k, &m, &SolveOptions::new(0)),
        Err(SolveError::NoModes)
    ));
    assert!(matches!(
        solve_lowest(&k, &SparseSymMatrix::identity(3), &SolveOptions::new(1)),
        Err(SolveError::DimensionMismatch { .. })
    ));
    assert!(matches!(
        solve_lowest(&k, &diag(&[1.0, -1.0]), &SolveOptions::new(1)),
        Err(SolveError::MassNotDefinite)
    ));
}

#[test]
fn unit_square_dirichlet_p2_spectrum() {
    let a = square_assembly(Bc::Dirichlet, 0.05, ElementOrder::P2);
    let spec = solve_modes(&a, &SolveOptions::new(20)).unwrap();
    let exact = square_dirichlet_spectrum(20);
    for (got, want) in spec.lambda_sq().iter().zip(&exact) {
        assert!((got - want).abs() <= 0.005 * want, "{got} vs {want}");
    }
    // Pairs (m, n) and (n, m) give clusters of two, split only by the mesh.
    let values = spec.lambda_sq();
    for k in [1, 4, 6, 8, 11, 13, 15, 17] {
        assert!((values[k] - values[k + 1]).abs() < 1e-3 * values[k]);
    }
    let report = spectrum_residual_report(&a, &spec);
    assert!(report.iter().all(|r| r.within_tol && r.norm_defect < 1e-10));
    for i in 0..20 {
        for j in 0..i {
            let c = a.mass.inner(spec.modes[i].coefficients(), spec.modes[j].coefficients());
            assert!(c.abs() <= 1e-8);
        }
    }
}

#[test]
fn neumann_square_has_constant_ground_state() {
    let a = square_assembly(Bc::Neumann, 0.1, ElementOrder::P1);
    let spec = solve_modes(&a, &SolveOptions::new(4)).unwrap();
    let v = spec.lambda_sq();
    assert!(v[0].abs() < 1e-9);
    assert!(spec.shift < 0.0);
    let c = spec.modes[0].coefficients();
    let mean = c.iter().sum::<f64>() / c.len() as f64;
    assert!(c.iter().all(|x| (x - mean).abs() < 1e-8));
    assert!((mean.abs() - 1.0).abs() < 1e-8);
    // π² twice, then 2π².
    assert!((v[1] - PI * PI).abs() < 0.02 * PI * PI);
    assert!((v[3] - 2.0 * PI * PI).abs() < 0.05 * PI * PI);
}

#[test]
fn shift_invariance() {
    let a = square_assembly(Bc::Dirichlet, 0.1, ElementOrder::P2);
    let base = solve_lowest(&a.stiffness, &a.mass, &SolveOptions::new(10)).unwrap();
    let shifted = solve_lowest(
        &a.stiffness,
        &a.mass,
        &SolveOptions::new(10).shift(0.5 * base.values[0]),
    )
    .unwrap();
    for (x, y) in base.values.iter().zip(&shifted.values) {
        assert!((x - y).abs() <= 1e-8 * x);
    }
}

#[test]
fn forced_non_convergence_is_flagged() {
    let a = square_assembly(Bc::Dirichlet, 0.05, ElementOrder::P1);
    let opts = SolveOptions::new(30).tol(1e-15).max_restarts(1);
    let Err(SolveError::NotConverged { partial, .. }) = solve_lowest(&a.stiffness, &a.mass, &opts) else {
        panic!("expected a convergence failure");
    };
    let report = residual_report(&a.stiffness, &a.mass, &partial.values, &partial.vectors, 1e-15);
    assert!(report.iter().any(|r| !r.within_tol));
}

fn square_mesh_sequence(levels: usize) -> Vec<Arc<Mesh>> {
    let d = PolygonDomain::rectangle(1.0, 1.0, Bc::Dirichlet).unwrap();
    let mut m = triangulate(&d, 0.25, false).unwrap();
    let mut out = Vec::new();
    for _ in 0..levels {
        let next = m.refine_uniform();
        out.push(Arc::new(m));
        m = next;
    }
    out
}

#[test]
fn convergence_orders_and_monotonicity() {
    let exact = 2.0 * PI * PI;
    let meshes = square_mesh_sequence(4);
    for (order, min_rate) in [(ElementOrder::P1, 1.9), (ElementOrder::P2, 3.8)] {
        let lams: Vec<Vec<f64>> = meshes
            .iter()
            .map(|m| {
                let a = assemble(m.clone(), order).unwrap();
                solve_lowest(&a.stiffness, &a.mass, &SolveOptions::new(6).tol(1e-11))
                    .unwrap()
                    .values
            })
            .collect();
        let err: Vec<f64> = lams.iter().map(|v| v[0] - exact).collect();
        assert!(err.iter().all(|e| *e > 0.0));
        let rate = (err[err.len() - 2] / err[err.len() - 1]).log2();
        assert!(rate >= min_rate, "{order:?} rate {rate}");
        // Nested refinements give decreasing upper bounds mode by mode.
        for w in lams.windows(2) {
            for (c, f) in w[0].iter().zip(&w[1]) {
                assert!(f <= c);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_spd_pencils_match_dense(seed in any::<u64>(), n in 20usize..60) {
        let k = random_spd(n, seed);
        let m = random_spd(n, seed ^ 0xABCD);
        let want = 5;
        let pairs = solve_lowest(&k, &m, &SolveOptions::new(want)).unwrap();
        // Dense oracle: eigenvalues of L⁻¹ K L⁻ᵀ with M = L Lᵀ.
        let md = m.to_dense();
        let kd = k.to_dense();
        let mut l = alloc::vec![alloc::vec![0.0; n]; n];
        for j in 0..n {
            let s: f64 = md[j][j] - (0..j).map(|p| l[j][p] * l[j][p]).sum::<f64>();
            l[j][j] = s.sqrt();
            for i in j + 1..n {
                let s: f64 = md[i][j] - (0..j).map(|p| l[i][p] * l[j][p]).sum::<f64>();
                l[i][j] = s / l[j][j];
            }
        }
        // C = L⁻¹ K L⁻ᵀ by forward substitution on columns, then rows.
        let fwd = |b: &Vec<f64>| {
            let mut y = b.clone();
            for i in 0..n {
                for p in 0..i {
                    y[i] -= l[i][p] * y[p];
                }
                y[i] /= l[i][i];
            }
            y
        };
        let cols: Vec<Vec<f64>> = (0..n).map(|j| fwd(&(0..n).map(|i| kd[i][j]).collect())).collect();
        let c: Vec<Vec<f64>> = (0..n).map(|i| fwd(&(0..n).map(|j| cols[j][i]).collect())).collect();
        let (d, _) = symmetric_eigen(&c);
        for (got, want) in pairs.values.iter().zip(&d) {
            prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0));
        }
    }
}
