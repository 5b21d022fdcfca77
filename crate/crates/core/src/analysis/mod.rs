//! Local L² masses near a boundary point, the commutator pairing against the
//! radial field `X = (x − p₀)·∇`, boundary line integrals at a corner and the
//! interior inequality chain.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::cutoff::{CutoffError, CutoffFunction, RadialProfile};
use crate::discretize::{DiscreteMode, MeshError};
use crate::geometry::{Bc, FrameSide, GeometryError, Membership, Point, PointClass, PolygonDomain};
use crate::oracles::{AnalyticMode, Hessian, ModeShape};

mod quad;

use quad::{line_nodes, mesh_rule, polar_rule, PolarSettings};
pub use quad::{QuadPoint, Region, MESH_DEPTH};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("alpha {0} outside (0, 1)")]
    InvalidAlpha(f64),
    #[error("radius {0} must be positive and finite")]
    InvalidRadius(f64),
    #[error("empty alpha list")]
    EmptyAlphas,
    #[error("cutoff support {support} reaches a non-adjacent face at distance {distance}")]
    SupportTooLarge { support: f64, distance: f64 },
    #[error("mode is {mode:?} on the {side:?} side but the domain edge is {domain:?}")]
    BcMismatch { side: FrameSide, mode: Bc, domain: Bc },
    #[error("{0} is not available for this mode")]
    Unsupported(&'static str),
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Cutoff(#[from] CutoffError),
}

/// Pointwise data of a mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub value: f64,
    pub grad: Point,
    /// `−Δu`; discrete modes report `λ² u`.
    pub neg_laplacian: f64,
    pub hessian: Option<Hessian>,
}

/// A function on Ω with a frequency, analytic or discrete.
pub trait Eigenmode {
    fn lambda(&self) -> f64;

    fn sample(&self, p: Point) -> Result<Sample, AnalysisError>;

    /// The finite-element representation, which switches integrals to mesh rules.
    fn discrete(&self) -> Option<&DiscreteMode> {
        None
    }

    /// Boundary condition the mode satisfies on a corner side, when it carries one.
    fn side_bc(&self, _side: FrameSide) -> Option<Bc> {
        None
    }

    fn h(&self) -> f64 {
        1.0 / self.lambda()
    }
}

impl Eigenmode for AnalyticMode {
    fn lambda(&self) -> f64 {
        AnalyticMode::lambda(self)
    }

    fn sample(&self, p: Point) -> Result<Sample, AnalysisError> {
        let s = AnalyticMode::sample(self, p);
        Ok(Sample {
            value: s.value,
            grad: s.grad,
            neg_laplacian: -s.hessian.trace(),
            hessian: Some(s.hessian),
        })
    }

    fn side_bc(&self, side: FrameSide) -> Option<Bc> {
        match self.shape() {
            ModeShape::Sector { upper, lower, .. } => Some(match side {
                FrameSide::Upper => upper,
                FrameSide::Lower => lower,
            }),
            _ => None,
        }
    }
}

impl Eigenmode for DiscreteMode {
    fn lambda(&self) -> f64 {
        DiscreteMode::lambda(self)
    }

    fn sample(&self, p: Point) -> Result<Sample, AnalysisError> {
        let (value, grad) = self.evaluate(p)?;
        Ok(Sample {
            value,
            grad,
            neg_laplacian: self.lambda_sq() * value,
            hessian: None,
        })
    }

    fn discrete(&self) -> Option<&DiscreteMode> {
        Some(self)
    }
}

impl<M: Eigenmode + ?Sized> Eigenmode for &M {
    fn lambda(&self) -> f64 {
        (**self).lambda()
    }

    fn sample(&self, p: Point) -> Result<Sample, AnalysisError> {
        (**self).sample(p)
    }

    fn discrete(&self) -> Option<&DiscreteMode> {
        (**self).discrete()
    }

    fn side_bc(&self, side: FrameSide) -> Option<Bc> {
        (**self).side_bc(side)
    }
}

/// Quadrature nodes for `D(center, radius) ∩ Ω` suited to `mode`: element
/// rules on its mesh for discrete modes, polar rules otherwise.
pub fn quadrature_points<M: Eigenmode + ?Sized>(mode: &M, region: &Region, knots: &[f64]) -> Vec<QuadPoint> {
    let mut out = Vec::new();
    match mode.discrete() {
        Some(dm) => mesh_rule(dm.mesh(), region.center, region.radius, knots, |q| out.push(q)),
        None => polar_rule(region, knots, PolarSettings::for_frequency(mode.lambda()), |q| {
            out.push(q)
        }),
    }
    out
}

fn sample_at<M: Eigenmode + ?Sized>(mode: &M, q: &QuadPoint) -> Result<Sample, AnalysisError> {
    match (mode.discrete(), q.cell) {
        (Some(dm), Some((t, l))) => {
            let (value, grad) = dm.evaluate_in(t, l);
            Ok(Sample {
                value,
                grad,
                neg_laplacian: dm.lambda_sq() * value,
                hessian: None,
            })
        }
        _ => mode.sample(q.at),
    }
}

/// `Σ w·f(node, sample)` over precomputed nodes.
pub fn integrate_points<M: Eigenmode + ?Sized, const K: usize>(
    mode: &M,
    points: &[QuadPoint],
    mut f: impl FnMut(&QuadPoint, &Sample) -> [f64; K],
) -> Result<[f64; K], AnalysisError> {
    let mut acc = [0.0; K];
    for q in points {
        let s = sample_at(mode, q)?;
        for (a, v) in acc.iter_mut().zip(f(q, &s)) {
            *a += q.weight * v;
        }
    }
    Ok(acc)
}

/// `Σ w·f(node, sample)` over `D(center, radius) ∩ Ω` without storing the nodes.
pub fn integrate<M: Eigenmode + ?Sized, const K: usize>(
    mode: &M,
    region: &Region,
    knots: &[f64],
    mut f: impl FnMut(&QuadPoint, &Sample) -> [f64; K],
) -> Result<[f64; K], AnalysisError> {
    let mut acc = [0.0; K];
    let mut err = None;
    let mut visit = |q: QuadPoint| {
        if err.is_some() {
            return;
        }
        match sample_at(mode, &q) {
            Ok(s) => {
                for (a, v) in acc.iter_mut().zip(f(&q, &s)) {
                    *a += q.weight * v;
                }
            }
            Err(e) => err = Some(e),
        }
    };
    match mode.discrete() {
        Some(dm) => mesh_rule(dm.mesh(), region.center, region.radius, knots, &mut visit),
        None => polar_rule(region, knots, PolarSettings::for_frequency(mode.lambda()), &mut visit),
    }
    match err {
        Some(e) => Err(e),
        None => Ok(acc),
    }
}

fn check_point(domain: &PolygonDomain, p: Point) -> Result<(), AnalysisError> {
    if !p.is_finite() || domain.contains(p) == Membership::Exterior {
        return Err(GeometryError::OutsideDomain { x: p.x, y: p.y }.into());
    }
    Ok(())
}

/// `∫_{D(p₀, radius) ∩ Ω} |u|²`.
pub fn local_mass<M: Eigenmode + ?Sized>(
    mode: &M,
    p0: Point,
    radius: f64,
    domain: &PolygonDomain,
) -> Result<f64, AnalysisError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(AnalysisError::InvalidRadius(radius));
    }
    check_point(domain, p0)?;
    let region = Region {
        domain,
        center: p0,
        radius,
    };
    let [m] = integrate(mode, &region, &[], |_, s| [s.value * s.value])?;
    Ok(m)
}

/// `1/(2 − α)`.
pub fn bound_value(alpha: f64) -> Result<f64, AnalysisError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(AnalysisError::InvalidAlpha(alpha));
    }
    Ok(1.0 / (2.0 - alpha))
}

/// `min(d(1 − α)/4, 1/2) / 2`.
pub fn default_epsilon(d: f64, alpha: f64) -> f64 {
    0.5 * (0.25 * d * (1.0 - alpha)).min(0.5)
}

/// One `(mode, α)` entry of a mass profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassRow {
    pub mode_index: usize,
    pub lambda: f64,
    pub h: f64,
    pub p0: Point,
    pub class: PointClass,
    pub d: f64,
    pub alpha: f64,
    pub disc_mass: f64,
    pub bound: f64,
    pub slack: f64,
}

/// Disc masses against the bound, sorted by `λ`, then `α`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MassProfile {
    pub rows: Vec<MassRow>,
}

impl MassProfile {
    pub fn from_rows(mut rows: Vec<MassRow>) -> Self {
        rows.sort_by(|a, b| {
            a.lambda
                .total_cmp(&b.lambda)
                .then(a.mode_index.cmp(&b.mode_index))
                .then(a.alpha.total_cmp(&b.alpha))
        });
        Self { rows }
    }

    /// Largest disc mass per `α` over modes with index in `window`.
    pub fn window_max(&self, alpha: f64, window: core::ops::Range<usize>) -> Option<&MassRow> {
        self.rows
            .iter()
            .filter(|r| r.alpha == alpha && window.contains(&r.mode_index))
            .max_by(|a, b| a.disc_mass.total_cmp(&b.disc_mass))
    }

    /// Rows whose disc mass exceeds the bound.
    pub fn violations(&self) -> impl Iterator<Item = &MassRow> {
        self.rows.iter().filter(|r| r.slack < 0.0)
    }
}

/// Point data and α grid shared by every mode of a profile.
#[derive(Clone, Debug)]
pub struct ProfileSetup {
    pub p0: Point,
    pub class: PointClass,
    pub d: f64,
    pub alphas: Vec<f64>,
    mesh_rules: Option<(usize, Vec<Vec<QuadPoint>>)>,
}

impl ProfileSetup {
    pub fn new(domain: &PolygonDomain, p0: Point, alphas: &[f64]) -> Result<Self, AnalysisError> {
        if alphas.is_empty() {
            return Err(AnalysisError::EmptyAlphas);
        }
        for &a in alphas {
            bound_value(a)?;
        }
        check_point(domain, p0)?;
        let class = domain.classify_point(p0)?;
        let d = domain.nonadjacent_distance(p0)?;
        let mut alphas = alphas.to_vec();
        alphas.sort_by(f64::total_cmp);
        alphas.dedup();
        Ok(Self {
            p0,
            class,
            d,
            alphas,
            mesh_rules: None,
        })
    }

    /// Precomputes the element rules of every disc on the mesh of `mode`.
    pub fn with_mesh_of(mut self, mode: &DiscreteMode) -> Self {
        let mesh = mode.mesh();
        let rules = self
            .alphas
            .iter()
            .map(|a| {
                let mut v = Vec::new();
                mesh_rule(mesh, self.p0, a * self.d, &[], |q| v.push(q));
                v
            })
            .collect();
        self.mesh_rules = Some((alloc::sync::Arc::as_ptr(mesh) as usize, rules));
        self
    }

    /// Rows of one mode, one per `α`.
    pub fn rows<M: Eigenmode + ?Sized>(
        &self,
        domain: &PolygonDomain,
        mode_index: usize,
        mode: &M,
    ) -> Result<Vec<MassRow>, AnalysisError> {
        let cached = match (&self.mesh_rules, mode.discrete()) {
            (Some((key, rules)), Some(dm)) if alloc::sync::Arc::as_ptr(dm.mesh()) as usize == *key => Some(rules),
            _ => None,
        };
        let lambda = mode.lambda();
        let mut out = Vec::with_capacity(self.alphas.len());
        for (k, &alpha) in self.alphas.iter().enumerate() {
            let radius = alpha * self.d;
            let disc_mass = match cached {
                Some(rules) => integrate_points(mode, &rules[k], |_, s| [s.value * s.value])?[0],
                None => local_mass(mode, self.p0, radius, domain)?,
            };
            if !disc_mass.is_finite() {
                return Err(AnalysisError::NonFinite("disc mass"));
            }
            let bound = bound_value(alpha)?;
            out.push(MassRow {
                mode_index,
                lambda,
                h: 1.0 / lambda,
                p0: self.p0,
                class: self.class,
                d: self.d,
                alpha,
                disc_mass,
                bound,
                slack: bound - disc_mass,
            });
        }
        Ok(out)
    }
}

/// Disc masses of every mode on `D(p₀, αd)` for each `α`.
pub fn mass_profile<M: Eigenmode>(
    modes: &[M],
    p0: Point,
    alphas: &[f64],
    domain: &PolygonDomain,
) -> Result<MassProfile, AnalysisError> {
    let mut setup = ProfileSetup::new(domain, p0, alphas)?;
    if let Some(dm) = modes.first().and_then(|m| m.discrete()) {
        setup = setup.with_mesh_of(dm);
    }
    let mut rows = Vec::with_capacity(modes.len() * setup.alphas.len());
    for (i, m) in modes.iter().enumerate() {
        rows.extend(setup.rows(domain, i, m)?);
    }
    Ok(MassProfile::from_rows(rows))
}

/// Both sides of the commutator identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pairing {
    /// `2∫φ|u|²`.
    pub lhs: f64,
    /// `∫(Xu)([−h²Δ, φ]u)`.
    pub rhs: f64,
    /// `|lhs − rhs| / max(|lhs|, |rhs|, 1e−30)`.
    pub residual: f64,
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-30)
}

/// `(φ, ∇φ, Δφ)` of a radial profile about `p0`.
fn radial_parts<P: RadialProfile + ?Sized>(phi: &P, r: Point) -> (f64, Point, f64) {
    let s = r.norm();
    let (v, d1, d2) = phi.eval(s);
    if s == 0.0 {
        return (v, Point::ORIGIN, 2.0 * d2);
    }
    (v, r * (d1 / s), d2 + d1 / s)
}

/// `[−h²Δ, φ]u = −h²(Δφ)u − 2h²∇φ·∇u`.
fn commutator<P: RadialProfile + ?Sized>(phi: &P, r: Point, s: &Sample, h: f64) -> f64 {
    let (_, grad, lap) = radial_parts(phi, r);
    -h * h * (lap * s.value + 2.0 * grad.dot(s.grad))
}

fn support_check<P: RadialProfile + ?Sized>(phi: &P, domain: &PolygonDomain, p0: Point) -> Result<f64, AnalysisError> {
    check_point(domain, p0)?;
    let distance = domain.nonadjacent_distance(p0)?;
    let support = phi.support_end();
    if support > distance {
        return Err(AnalysisError::SupportTooLarge { support, distance });
    }
    Ok(support)
}

/// Both sides of `2∫φ|u|² = ∫(Xu)([−h²Δ, φ]u)` with `X = (x − p₀)·∇`.
pub fn commutator_pairing<M: Eigenmode + ?Sized, P: RadialProfile + ?Sized>(
    mode: &M,
    p0: Point,
    phi: &P,
    domain: &PolygonDomain,
) -> Result<Pairing, AnalysisError> {
    let support = support_check(phi, domain, p0)?;
    if support <= 0.0 {
        return Ok(Pairing {
            lhs: 0.0,
            rhs: 0.0,
            residual: 0.0,
        });
    }
    let h = mode.h();
    let region = Region {
        domain,
        center: p0,
        radius: support,
    };
    let knots = phi.knots();
    let [lhs, rhs] = integrate(mode, &region, &knots, |q, s| {
        let r = q.at - p0;
        let xu = r.dot(s.grad);
        [
            2.0 * phi.value(r.norm()) * s.value * s.value,
            xu * commutator(phi, r, s, h),
        ]
    })?;
    Ok(Pairing {
        lhs,
        rhs,
        residual: relative_gap(lhs, rhs),
    })
}

/// Line integrals along one side of a boundary point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryTerms {
    /// `∫_F φ (h∂_ν hXu) u dS`.
    pub i1: f64,
    /// `∫_F (hXu)(h∂_ν φ u) dS`.
    pub i2: f64,
    pub lambda: f64,
    /// `max |u|²` sampled over the support of `φ`.
    pub u_max_sq: f64,
    pub side_bc: Bc,
    pub length: f64,
}

impl BoundaryTerms {
    /// `max(|I₁|, |I₂|) / (λ max|u|²)`.
    pub fn normalized(&self) -> f64 {
        self.i1.abs().max(self.i2.abs()) / (self.lambda * self.u_max_sq).max(1e-300)
    }
}

const MAX_GRID_ANGLES: usize = 96;
const MAX_GRID_RADII: usize = 160;

/// The side integrals `I₁`, `I₂` on `F₁` (upper) or `F₂` (lower) of a boundary point.
pub fn boundary_terms<M: Eigenmode + ?Sized, P: RadialProfile + ?Sized>(
    mode: &M,
    p0: Point,
    phi: &P,
    side: FrameSide,
    domain: &PolygonDomain,
) -> Result<BoundaryTerms, AnalysisError> {
    let support = support_check(phi, domain, p0)?;
    let frames = domain.boundary_frames(p0)?;
    let edge = domain.edge(frames.frame(side).edge);
    if let Some(bc) = mode.side_bc(side) {
        if bc != edge.bc {
            return Err(AnalysisError::BcMismatch {
                side,
                mode: bc,
                domain: edge.bc,
            });
        }
    }
    let t = frames.world_tangent(side);
    let nu = frames.world_normal(side);
    let reach = (edge.a - p0).dot(t).max((edge.b - p0).dot(t));
    let length = support.min(reach).max(0.0);
    let h = mode.h();
    let knots = phi.knots();
    let (mut i1, mut i2) = (0.0, 0.0);
    let mut err = None;
    line_nodes(
        0.0,
        length,
        &knots,
        PolarSettings::for_frequency(mode.lambda()),
        |s, w| {
            if err.is_some() {
                return;
            }
            let r = t * s;
            let x = p0 + r;
            let sm = match mode.sample(x) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    return;
                }
            };
            let Some(hess) = sm.hessian else {
                err = Some(AnalysisError::Unsupported("second derivatives"));
                return;
            };
            let (v, d1, _) = phi.eval(s);
            let xu = r.dot(sm.grad);
            let dnu_xu = sm.grad.dot(nu) + hess.bilinear(r, nu);
            let rhat_nu = if s > 0.0 { r.dot(nu) / s } else { 0.0 };
            i1 += w * v * h * h * dnu_xu * sm.value;
            i2 += w * (h * xu) * (h * d1 * rhat_nu) * sm.value;
        },
    );
    if let Some(e) = err {
        return Err(e);
    }
    let theta0 = frames.theta0;
    let mut u_max_sq: f64 = 0.0;
    for a in 0..MAX_GRID_ANGLES {
        let theta = -0.5 * theta0 + theta0 * (a as f64 + 0.5) / MAX_GRID_ANGLES as f64;
        for k in 1..=MAX_GRID_RADII {
            let rho = support * k as f64 / MAX_GRID_RADII as f64;
            let x = frames.motion.to_world(Point::polar(theta) * rho);
            if domain.contains(x) == Membership::Exterior {
                continue;
            }
            let v = mode.sample(x)?.value;
            u_max_sq = u_max_sq.max(v * v);
        }
    }
    Ok(BoundaryTerms {
        i1,
        i2,
        lambda: mode.lambda(),
        u_max_sq,
        side_bc: edge.bc,
        length,
    })
}

/// Quantities of the interior inequality chain for one mode, point and `α`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ledger {
    pub alpha: f64,
    pub epsilon: f64,
    pub d: f64,
    pub lambda: f64,
    pub h: f64,
    /// `∫_{D(p₀, αd)} |u|²`.
    pub disc_mass: f64,
    /// `2∫φ|u|²`.
    pub lower_chain: f64,
    /// `∫(Xu)([−h²Δ, φ]u)`.
    pub pairing: f64,
    pub identity_residual: f64,
    /// `∫ψ|h∂_r u|²`.
    pub radial_energy: f64,
    /// `∫ψ|h∇u|²`.
    pub gradient_energy: f64,
    /// `∫ψ|u|²`.
    pub mass_outside: f64,
    /// `∫ψ(−h²Δu)u`.
    pub laplace_pairing: f64,
    /// `h²∫u∇ψ·∇u`, the integration-by-parts term.
    pub cross_term: f64,
    /// `|gradient_energy − laplace_pairing|`.
    pub remainder: f64,
    /// `|radial_energy − laplace_pairing|`.
    pub radial_remainder: f64,
    /// `max(radial_energy − mass_outside, 0) / h`.
    pub measured_constant: f64,
    /// `1/((1 − α)d) + ε`.
    pub slope_constant: f64,
    /// `2/((1 − α)d) + ε`.
    pub wide_slope_constant: f64,
    /// `2/(2 − α)`.
    pub upper_cap: f64,
    /// `upper_cap − lower_chain`.
    pub cap_slack: f64,
}

/// The chain with `φ = φ₁(αd, d, ε)`, `ψ` its companion and the default `ε`.
pub fn proof_ledger<M: Eigenmode + ?Sized>(
    mode: &M,
    p0: Point,
    alpha: f64,
    domain: &PolygonDomain,
) -> Result<Ledger, AnalysisError> {
    check_point(domain, p0)?;
    let d = domain.nonadjacent_distance(p0)?;
    proof_ledger_with_epsilon(mode, p0, alpha, default_epsilon(d, alpha), domain)
}

pub fn proof_ledger_with_epsilon<M: Eigenmode + ?Sized>(
    mode: &M,
    p0: Point,
    alpha: f64,
    epsilon: f64,
    domain: &PolygonDomain,
) -> Result<Ledger, AnalysisError> {
    let upper_cap = 2.0 * bound_value(alpha)?;
    check_point(domain, p0)?;
    let d = domain.nonadjacent_distance(p0)?;
    let phi = CutoffFunction::phi1(alpha * d, d, epsilon)?;
    let psi = CutoffFunction::psi(&phi)?;
    let mut knots = phi.knots();
    knots.extend(psi.knots());
    knots.push(alpha * d);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let h = mode.h();
    let region = Region {
        domain,
        center: p0,
        radius: d,
    };
    let disc_radius = alpha * d;
    let [disc_mass, lower_chain, pairing, radial_energy, gradient_energy, mass_outside, laplace_pairing, cross_term] =
        integrate(mode, &region, &knots, |q, s| {
            let r = q.at - p0;
            let rn = r.norm();
            let u2 = s.value * s.value;
            let xu = r.dot(s.grad);
            let (ps, gps, _) = radial_parts(&psi, r);
            let dr = if rn > 0.0 { r.dot(s.grad) / rn } else { 0.0 };
            [
                if rn < disc_radius { u2 } else { 0.0 },
                2.0 * phi.value(rn) * u2,
                xu * commutator(&phi, r, s, h),
                ps * h * h * dr * dr,
                ps * h * h * s.grad.norm_sq(),
                ps * u2,
                ps * h * h * s.neg_laplacian * s.value,
                h * h * s.value * gps.dot(s.grad),
            ]
        })?;
    let ledger = Ledger {
        alpha,
        epsilon,
        d,
        lambda: mode.lambda(),
        h,
        disc_mass,
        lower_chain,
        pairing,
        identity_residual: relative_gap(lower_chain, pairing),
        radial_energy,
        gradient_energy,
        mass_outside,
        laplace_pairing,
        cross_term,
        remainder: (gradient_energy - laplace_pairing).abs(),
        radial_remainder: (radial_energy - laplace_pairing).abs(),
        measured_constant: (radial_energy - mass_outside).max(0.0) / h,
        slope_constant: 1.0 / ((1.0 - alpha) * d) + epsilon,
        wide_slope_constant: 2.0 / ((1.0 - alpha) * d) + epsilon,
        upper_cap,
        cap_slack: upper_cap - lower_chain,
    };
    let all = [
        ledger.disc_mass,
        ledger.lower_chain,
        ledger.pairing,
        ledger.radial_energy,
        ledger.gradient_energy,
        ledger.mass_outside,
        ledger.laplace_pairing,
        ledger.cross_term,
        ledger.h,
    ];
    if all.iter().any(|v| !v.is_finite()) {
        return Err(AnalysisError::NonFinite("ledger entry"));
    }
    Ok(ledger)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
