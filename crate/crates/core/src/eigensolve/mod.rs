//! Lowest eigenpairs of `K u = λ² M u`.
//!
//! `K − σM` is factored as an envelope LDLᵀ under reverse Cuthill–McKee
//! ordering, and a thick-restart Lanczos iteration with full
//! reorthogonalization runs on `(K − σM)⁻¹ M`. Pivot signs give the inertia,
//! which is used both to keep the shift below the spectrum and to confirm
//! that no eigenvalue below the returned ones was skipped.

mod dense;
mod lanczos;
mod ldlt;

#[cfg(test)]
mod tests;

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::discretize::{Assembly, DiscreteMode, FemSpace, SparseSymMatrix};

pub use dense::symmetric_eigen;
pub use ldlt::{rcm_order, Ldlt};

/// Pivots smaller than this fraction of their diagonal entry count as singular.
const SINGULAR_PIVOT: f64 = 1e-10;
/// Relative separation below which eigenvalues form one cluster.
pub const CLUSTER_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub n: usize,
    pub shift: f64,
    /// Bound on `‖K u − λ² M u‖_{M⁻¹} / max(λ², 1)`.
    pub tol: f64,
    pub max_restarts: usize,
    /// Krylov basis size; `None` picks about twice the number of wanted pairs.
    pub basis_size: Option<usize>,
    pub seed: u64,
}

impl SolveOptions {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            shift: 0.0,
            tol: 1e-8,
            max_restarts: 60,
            basis_size: None,
            seed: 0x5EED_1A4C_2024,
        }
    }

    pub fn shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn max_restarts(mut self, max_restarts: usize) -> Self {
        self.max_restarts = max_restarts;
        self
    }
}

/// Eigenpairs in raw coefficient form.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPairs {
    /// `λ²`, nondecreasing.
    pub values: Vec<f64>,
    /// `M`-orthonormal eigenvectors.
    pub vectors: Vec<Vec<f64>>,
    /// Relative residuals `‖K u − λ² M u‖_{M⁻¹} / max(λ², 1)`.
    pub residuals: Vec<f64>,
    pub shift: f64,
    pub restarts: usize,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("requested {n} eigenpairs but the problem has {dofs} degrees of freedom")]
    TooManyModes { n: usize, dofs: usize },
    #[error("at least one eigenpair must be requested")]
    NoModes,
    #[error("matrix dimensions differ: K is {k}, M is {m}")]
    DimensionMismatch { k: usize, m: usize },
    #[error("mass matrix is not positive definite")]
    MassNotDefinite,
    #[error("K − σM stayed singular after {attempts} shift perturbations (last σ = {shift})")]
    Factorization { shift: f64, attempts: usize },
    #[error("only {converged} of {wanted} eigenpairs reached the tolerance after {restarts} restarts")]
    NotConverged {
        converged: usize,
        wanted: usize,
        restarts: usize,
        partial: Box<EigenPairs>,
    },
    #[error("inertia reports {expected} eigenvalues below {bound} but {found} were found")]
    MissedEigenvalues { bound: f64, expected: usize, found: usize },
}

/// Factors `K − σM`, nudging σ downward when a pivot is (nearly) zero.
fn factor_shifted(
    k: &SparseSymMatrix,
    m: &SparseSymMatrix,
    shift: f64,
    perm: &[usize],
) -> Result<(Ldlt, f64), SolveError> {
    let mut sigma = shift;
    let scale = typical_eigen_scale(k, m);
    for attempt in 0..=3 {
        let f = Ldlt::factor(&k.add_scaled(-sigma, m), perm.to_vec());
        if f.min_pivot_ratio() > SINGULAR_PIVOT {
            return Ok((f, sigma));
        }
        if attempt == 3 {
            break;
        }
        sigma -= 10f64.powi(attempt - 4) * (sigma.abs() + scale);
    }
    Err(SolveError::Factorization {
        shift: sigma,
        attempts: 3,
    })
}

/// A size for shift perturbations: the smallest diagonal ratio `K_ii / M_ii`.
fn typical_eigen_scale(k: &SparseSymMatrix, m: &SparseSymMatrix) -> f64 {
    let kd = k.diagonal();
    let md = m.diagonal();
    kd.iter()
        .zip(&md)
        .filter(|(_, b)| **b > 0.0)
        .map(|(a, b)| a / b)
        .filter(|r| *r > 0.0)
        .fold(f64::INFINITY, f64::min)
        .clamp(1e-300, 1e300)
}

/// The `n` smallest eigenpairs of `K u = λ² M u`.
pub fn solve_lowest(k: &SparseSymMatrix, m: &SparseSymMatrix, opts: &SolveOptions) -> Result<EigenPairs, SolveError> {
    let dofs = k.dim();
    if m.dim() != dofs {
        return Err(SolveError::DimensionMismatch { k: dofs, m: m.dim() });
    }
    if opts.n == 0 {
        return Err(SolveError::NoModes);
    }
    if opts.n > dofs {
        return Err(SolveError::TooManyModes { n: opts.n, dofs });
    }
    let perm = rcm_order(&k.add_scaled(1.0, m));
    let mass = Ldlt::factor(m, perm.clone());
    if mass.negative_pivots() > 0 || mass.min_pivot_ratio() <= 0.0 {
        return Err(SolveError::MassNotDefinite);
    }
    let (mut shifted, mut sigma) = factor_shifted(k, m, opts.shift, &perm)?;
    // Keep the shift below the whole spectrum so the wanted pairs have the largest θ.
    let mut guard = 0;
    while shifted.negative_pivots() > 0 && guard < 60 {
        sigma = sigma - 2.0 * sigma.abs() - typical_eigen_scale(k, m);
        let (f, s) = factor_shifted(k, m, sigma, &perm)?;
        shifted = f;
        sigma = s;
        guard += 1;
    }

    let n = opts.n;
    let nev = (n + (n / 10).max(4)).min(dofs);
    let ncv = opts
        .basis_size
        .unwrap_or_else(|| (2 * nev + 20).max(nev + 40))
        .clamp(nev, dofs);
    let problem = lanczos::Problem {
        k,
        m,
        shifted: &shifted,
        mass: &mass,
        sigma,
    };
    let ritz = lanczos::thick_restart(&problem, nev, ncv, opts.tol, opts.max_restarts, opts.seed);

    let mut idx: Vec<usize> = (0..nev).collect();
    idx.sort_by(|&a, &b| ritz.values[a].total_cmp(&ritz.values[b]));
    let values: Vec<f64> = idx.iter().map(|&i| ritz.values[i]).collect();
    let mut vectors: Vec<Vec<f64>> = idx.iter().map(|&i| ritz.vectors[i].clone()).collect();
    let residuals: Vec<f64> = idx.iter().map(|&i| ritz.residuals[i]).collect();
    orthonormalize_clusters(m, &values, &mut vectors);

    let take = |count: usize| EigenPairs {
        values: values[..count].to_vec(),
        vectors: vectors[..count].to_vec(),
        residuals: residuals[..count].to_vec(),
        shift: sigma,
        restarts: ritz.restarts,
    };
    let converged = residuals[..n].iter().take_while(|r| **r <= opts.tol).count();
    if !ritz.converged || converged < n {
        return Err(SolveError::NotConverged {
            converged,
            wanted: n,
            restarts: ritz.restarts,
            partial: Box::new(take(n)),
        });
    }
    check_inertia(k, m, &perm, &values, n)?;
    Ok(take(n))
}

/// Confirms via Sylvester inertia that the first `n` values are the `n` lowest.
fn check_inertia(
    k: &SparseSymMatrix,
    m: &SparseSymMatrix,
    perm: &[usize],
    values: &[f64],
    n: usize,
) -> Result<(), SolveError> {
    // Move past any cluster straddling position n so the probe sits in a gap.
    let mut q = n - 1;
    while q + 1 < values.len() && values[q + 1] - values[q] <= 1e-8 * values[q].abs().max(1.0) {
        q += 1;
    }
    let (bound, found) = if q + 1 < values.len() {
        (0.5 * (values[q] + values[q + 1]), q + 1)
    } else if values.len() == k.dim() {
        return Ok(());
    } else {
        // The last cluster may continue past the computed values: probe just below it.
        let mut c0 = q;
        while c0 > 0 && values[c0] - values[c0 - 1] <= 1e-8 * values[c0].abs().max(1.0) {
            c0 -= 1;
        }
        let below = if c0 > 0 { values[c0 - 1] } else { values[c0] - 1.0 };
        (0.5 * (below + values[c0]), c0)
    };
    let f = Ldlt::factor(&k.add_scaled(-bound, m), perm.to_vec());
    let expected = f.negative_pivots();
    if expected != found {
        return Err(SolveError::MissedEigenvalues { bound, expected, found });
    }
    Ok(())
}

/// Re-orthonormalizes vectors inside each cluster of (relatively) equal values.
fn orthonormalize_clusters(m: &SparseSymMatrix, values: &[f64], vectors: &mut [Vec<f64>]) {
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && (values[end] - values[end - 1]).abs() <= CLUSTER_TOL * values[end].abs().max(1.0) {
            end += 1;
        }
        for i in start..end {
            for _ in 0..2 {
                for j in start..i {
                    let c = m.inner(&vectors[j], &vectors[i]);
                    let (head, tail) = vectors.split_at_mut(i);
                    for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                        *x -= c * y;
                    }
                }
            }
            let norm = m.inner(&vectors[i], &vectors[i]).sqrt();
            vectors[i].iter_mut().for_each(|x| *x /= norm);
        }
        start = end;
    }
}

/// Index ranges of eigenvalues equal within [`CLUSTER_TOL`].
pub fn clusters(values: &[f64]) -> Vec<core::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && (values[end] - values[end - 1]).abs() <= CLUSTER_TOL * values[end].abs().max(1.0) {
            end += 1;
        }
        out.push(start..end);
        start = end;
    }
    out
}

/// Discrete eigenfunctions with their residuals.
#[derive(Clone, Debug)]
pub struct EigenSpectrum {
    pub modes: Vec<DiscreteMode>,
    pub residuals: Vec<f64>,
    pub shift: f64,
    pub tol: f64,
}

impl EigenSpectrum {
    pub fn from_pairs(space: Arc<FemSpace>, pairs: EigenPairs, tol: f64) -> Self {
        let modes = pairs
            .values
            .iter()
            .zip(pairs.vectors)
            .map(|(&v, x)| {
                DiscreteMode::new(space.clone(), x, v)
                    .expect("eigenvector length matches the space")
                    .canonical_sign()
            })
            .collect();
        Self {
            modes,
            residuals: pairs.residuals,
            shift: pairs.shift,
            tol,
        }
    }

    pub fn lambda_sq(&self) -> Vec<f64> {
        self.modes.iter().map(DiscreteMode::lambda_sq).collect()
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }
}

/// Solves an assembled problem and wraps the result as modes.
pub fn solve_modes(assembly: &Assembly, opts: &SolveOptions) -> Result<EigenSpectrum, SolveError> {
    let pairs = solve_lowest(&assembly.stiffness, &assembly.mass, opts)?;
    Ok(EigenSpectrum::from_pairs(assembly.space.clone(), pairs, opts.tol))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualRow {
    pub index: usize,
    pub lambda_sq: f64,
    /// `‖K u − λ² M u‖_{M⁻¹}`.
    pub residual: f64,
    /// `residual / max(λ², 1)`.
    pub relative: f64,
    /// `|uᵀ M u − 1|`.
    pub norm_defect: f64,
    pub within_tol: bool,
}

/// Recomputes every residual from scratch with a fresh factorization of `M`.
pub fn residual_report(
    k: &SparseSymMatrix,
    m: &SparseSymMatrix,
    values: &[f64],
    vectors: &[Vec<f64>],
    tol: f64,
) -> Vec<ResidualRow> {
    let mass = Ldlt::factor_rcm(m);
    values
        .iter()
        .zip(vectors)
        .enumerate()
        .map(|(index, (&lambda_sq, x))| {
            let kx = k.mul_vec(x);
            let mx = m.mul_vec(x);
            let r: Vec<f64> = kx.iter().zip(&mx).map(|(a, b)| a - lambda_sq * b).collect();
            let s = mass.solve(&r);
            let residual = r.iter().zip(&s).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt();
            let relative = residual / lambda_sq.abs().max(1.0);
            let norm_defect = (x.iter().zip(&mx).map(|(a, b)| a * b).sum::<f64>() - 1.0).abs();
            ResidualRow {
                index,
                lambda_sq,
                residual,
                relative,
                norm_defect,
                within_tol: relative <= tol,
            }
        })
        .collect()
}

/// [`residual_report`] for a mode spectrum.
pub fn spectrum_residual_report(assembly: &Assembly, spectrum: &EigenSpectrum) -> Vec<ResidualRow> {
    let values = spectrum.lambda_sq();
    let vectors: Vec<Vec<f64>> = spectrum.modes.iter().map(|m| m.coefficients().to_vec()).collect();
    residual_report(&assembly.stiffness, &assembly.mass, &values, &vectors, spectrum.tol)
}
