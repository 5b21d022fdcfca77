//! Thick-restart Lanczos for `(K − σM)⁻¹ M` in the `M` inner product.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::dense::symmetric_eigen;
use super::ldlt::Ldlt;
use crate::discretize::SparseSymMatrix;
use crate::rng::SplitMix64;

pub(super) struct Problem<'a> {
    pub k: &'a SparseSymMatrix,
    pub m: &'a SparseSymMatrix,
    pub shifted: &'a Ldlt,
    pub mass: &'a Ldlt,
    pub sigma: f64,
}

pub(super) struct RitzSet {
    /// `λ²` in decreasing-θ order (increasing `λ²` above the shift).
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// Relative residual `‖K x − λ² M x‖_{M⁻¹} / max(|λ²|, 1)`.
    pub residuals: Vec<f64>,
    pub restarts: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

impl Problem<'_> {
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.m.mul_vec(x);
        self.shifted.solve_in_place(&mut y);
        y
    }

    /// `‖(K − σM) f‖_{M⁻¹}`.
    fn shifted_norm(&self, f: &[f64]) -> f64 {
        let kf = self.k.mul_vec(f);
        let mf = self.m.mul_vec(f);
        let r: Vec<f64> = kf.iter().zip(&mf).map(|(a, b)| a - self.sigma * b).collect();
        let s = self.mass.solve(&r);
        dot(&r, &s).max(0.0).sqrt()
    }

    /// `‖K x − λ² M x‖_{M⁻¹} / max(|λ²|, 1)`.
    fn true_residual(&self, lam: f64, x: &[f64]) -> f64 {
        let kx = self.k.mul_vec(x);
        let mx = self.m.mul_vec(x);
        let r: Vec<f64> = kx.iter().zip(&mx).map(|(a, b)| a - lam * b).collect();
        let s = self.mass.solve(&r);
        dot(&r, &s).max(0.0).sqrt() / lam.abs().max(1.0)
    }

    /// Orthogonalizes `w` against `basis` in the `M` inner product (two passes).
    /// Returns the accumulated coefficients and `‖w‖_M` afterwards.
    fn orthogonalize(&self, basis: &[Vec<f64>], w: &mut [f64]) -> (Vec<f64>, f64) {
        let mut coeff = alloc::vec![0.0; basis.len()];
        for _ in 0..2 {
            let mw = self.m.mul_vec(w);
            let c: Vec<f64> = basis.iter().map(|v| dot(v, &mw)).collect();
            for (v, ci) in basis.iter().zip(&c) {
                axpy(-ci, v, w);
            }
            for (a, b) in coeff.iter_mut().zip(&c) {
                *a += b;
            }
        }
        let norm = dot(w, &self.m.mul_vec(w)).max(0.0).sqrt();
        (coeff, norm)
    }

    fn random_unit(&self, rng: &mut SplitMix64, basis: &[Vec<f64>]) -> Vec<f64> {
        loop {
            let mut w: Vec<f64> = (0..self.k.dim()).map(|_| rng.next_signed()).collect();
            let before = dot(&w, &self.m.mul_vec(&w)).sqrt();
            let (_, norm) = self.orthogonalize(basis, &mut w);
            if norm > 1e-8 * before {
                w.iter_mut().for_each(|x| *x /= norm);
                return w;
            }
        }
    }
}

/// Runs until the `nev` largest Ritz values of the shift-inverted operator
/// meet `tol`, or `max_restarts` is exhausted.
pub(super) fn thick_restart(p: &Problem, nev: usize, ncv: usize, tol: f64, max_restarts: usize, seed: u64) -> RitzSet {
    let n = p.k.dim();
    let ncv = ncv.min(n).max(nev);
    let mut rng = SplitMix64::new(seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(ncv);
    basis.push(p.random_unit(&mut rng, &[]));
    let mut h = alloc::vec![alloc::vec![0.0; ncv]; ncv];
    let mut kept = 0usize;
    let mut restarts = 0usize;
    loop {
        let mut beta_last = 0.0;
        let mut f = Vec::new();
        for j in kept..ncv {
            let mut w = p.apply(&basis[j]);
            let scale = dot(&w, &p.m.mul_vec(&w)).max(0.0).sqrt();
            let (c, beta) = p.orthogonalize(&basis, &mut w);
            for (i, ci) in c.iter().enumerate() {
                h[i][j] = *ci;
                h[j][i] = *ci;
            }
            let breakdown = !(beta > 1e-12 * scale);
            if j + 1 < ncv {
                let next = if breakdown {
                    if j + 1 < n {
                        p.random_unit(&mut rng, &basis)
                    } else {
                        alloc::vec![0.0; n]
                    }
                } else {
                    w.iter().map(|x| x / beta).collect()
                };
                let b = if breakdown { 0.0 } else { beta };
                h[j + 1][j] = b;
                h[j][j + 1] = b;
                basis.push(next);
            } else {
                beta_last = if breakdown { 0.0 } else { beta };
                if !breakdown {
                    f = w.iter().map(|x| x / beta).collect();
                }
            }
        }
        let (theta, y) = symmetric_eigen(&h);
        // Indices of the largest θ first.
        let order: Vec<usize> = (0..ncv).rev().collect();
        let cf = if f.is_empty() { 0.0 } else { p.shifted_norm(&f) };
        let value = |i: usize| p.sigma + 1.0 / theta[i];
        let residual = |i: usize| {
            let lam = value(i);
            (beta_last * y[ncv - 1][i]).abs() / theta[i].abs() * cf / lam.abs().max(1.0)
        };
        let estimated = order[..nev].iter().all(|&i| theta[i] > 0.0 && residual(i) <= tol);
        if estimated || restarts >= max_restarts || f.is_empty() {
            // The estimate bottoms out below rounding, so confirm with true residuals.
            let sel = &order[..nev];
            let vectors = combine(&basis, &y, sel);
            let values: Vec<f64> = sel.iter().map(|&i| value(i)).collect();
            let residuals: Vec<f64> = values
                .iter()
                .zip(&vectors)
                .map(|(&lam, x)| p.true_residual(lam, x))
                .collect();
            let converged = residuals.iter().all(|r| *r <= tol);
            if converged || restarts >= max_restarts || f.is_empty() {
                return RitzSet {
                    values,
                    vectors,
                    residuals,
                    restarts,
                    converged,
                };
            }
        }
        restarts += 1;
        let keep = (nev + (ncv - nev) / 2).min(ncv - 1).max(1);
        let sel = &order[..keep];
        let mut new_basis = combine(&basis, &y, sel);
        for row in h.iter_mut() {
            row.fill(0.0);
        }
        for (a, &i) in sel.iter().enumerate() {
            h[a][a] = theta[i];
            h[a][keep] = beta_last * y[ncv - 1][i];
            h[keep][a] = h[a][keep];
        }
        new_basis.push(f);
        basis = new_basis;
        kept = keep;
    }
}

/// Columns `basis · y[:, i]` for each selected `i`.
fn combine(basis: &[Vec<f64>], y: &[Vec<f64>], sel: &[usize]) -> Vec<Vec<f64>> {
    let n = basis[0].len();
    sel.iter()
        .map(|&i| {
            let mut x = alloc::vec![0.0; n];
            for (j, v) in basis.iter().enumerate() {
                let c = y[j][i];
                if c != 0.0 {
                    axpy(c, v, &mut x);
                }
            }
            x
        })
        .collect()
}
