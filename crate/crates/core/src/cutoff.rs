//! Smooth radial cutoffs with analytic first and second derivatives.
//!
//! Every cutoff is built from one monotone step `φ₂`: the clamped unit ramp
//! of slope `1 + η`, mollified by a normalized `C^∞` bump of half-width
//! `w = η / (2(1 + η))`. The mollified step has plateaus `φ₂ = 1` for `s ≤ 0`
//! and `φ₂ = 0` for `s ≥ 1`, and `|φ₂'| ≤ 1 + η`.
//!
//! The convolution reduces to two cumulative integrals of the bump,
//! `B(x) = ∫ρ` and `M(x) = ∫tρ`, which are tabulated once per cutoff on a
//! uniform grid and interpolated with cubic Hermite splines whose slopes are
//! the exact integrands. [`CutoffFunction::with_exact_evaluation`] switches to
//! direct adaptive quadrature instead.

use alloc::sync::Arc;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use thiserror::Error;

use crate::quadrature::{adaptive, GaussLegendre};

/// Cells in the bump integral tables.
pub const TABLE_CELLS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CutoffError {
    #[error("η = {0} must lie in (0, 1]")]
    InvalidEta(f64),
    #[error("radii must satisfy 0 < δ₁ < δ₂ (got δ₁ = {delta1}, δ₂ = {delta2})")]
    InvalidRadii { delta1: f64, delta2: f64 },
    #[error("ε = {eps} must lie in (0, {max}]")]
    InvalidEpsilon { eps: f64, max: f64 },
    #[error("expected a {expected} cutoff")]
    WrongKind { expected: &'static str },
    #[error("t = {0} must lie in [0, 1/2]")]
    TaylorOutOfRange(f64),
}

/// A radial profile `s ↦ φ(s)` with two analytic derivatives.
pub trait RadialProfile {
    fn value(&self, s: f64) -> f64;
    fn d1(&self, s: f64) -> f64;
    fn d2(&self, s: f64) -> f64;

    /// Value, first and second derivative at once.
    fn eval(&self, s: f64) -> (f64, f64, f64) {
        (self.value(s), self.d1(s), self.d2(s))
    }

    /// Sorted radii where the profile switches between plateaus and transitions.
    fn knots(&self) -> Vec<f64>;

    /// `φ(s) = 0` for every `s ≥ support_end()`.
    fn support_end(&self) -> f64;
}

/// Unnormalized bump `exp(-1 / (1 - x²))` on `(-1, 1)`.
fn bump(x: f64) -> f64 {
    if x <= -1.0 || x >= 1.0 {
        return 0.0;
    }
    (-1.0 / ((1.0 - x) * (1.0 + x))).exp()
}

/// Cumulative bump integrals on a uniform grid over `[-1, 1]`.
#[derive(Debug)]
struct BumpTable {
    /// Normalization `∫ exp(-1/(1-x²)) dx`.
    z: f64,
    spacing: f64,
    rho: Vec<f64>,
    b: Vec<f64>,
    m: Vec<f64>,
}

impl BumpTable {
    fn new() -> Self {
        let n = TABLE_CELLS;
        let spacing = 2.0 / n as f64;
        let gl = GaussLegendre::new(8);
        let mut b = Vec::with_capacity(n + 1);
        let mut m = Vec::with_capacity(n + 1);
        let mut rho = Vec::with_capacity(n + 1);
        let (mut sb, mut sm) = (0.0, 0.0);
        for i in 0..=n {
            let x = node(i, spacing);
            if i > 0 {
                let lo = node(i - 1, spacing);
                for (t, w) in gl.mapped(lo, x) {
                    let r = bump(t);
                    sb += w * r;
                    sm += w * t * r;
                }
            }
            b.push(sb);
            m.push(sm);
            rho.push(bump(x));
        }
        let z = sb;
        for i in 0..=n {
            b[i] /= z;
            m[i] /= z;
            rho[i] /= z;
        }
        b[n] = 1.0;
        m[n] = 0.0;
        Self { z, spacing, rho, b, m }
    }

    fn rho(&self, x: f64) -> f64 {
        bump(x) / self.z
    }

    /// `(B(x), M(x))` by Hermite interpolation.
    fn cumulative(&self, x: f64) -> (f64, f64) {
        if x <= -1.0 {
            return (0.0, 0.0);
        }
        if x >= 1.0 {
            return (1.0, 0.0);
        }
        let u = (x + 1.0) / self.spacing;
        let i = (u as usize).min(TABLE_CELLS - 1);
        let t = u - i as f64;
        let h = self.spacing;
        let (x0, x1) = (node(i, h), node(i + 1, h));
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let (r0, r1) = (self.rho[i], self.rho[i + 1]);
        let b = h00 * self.b[i] + h10 * h * r0 + h01 * self.b[i + 1] + h11 * h * r1;
        let m = h00 * self.m[i] + h10 * h * x0 * r0 + h01 * self.m[i + 1] + h11 * h * x1 * r1;
        (b.clamp(0.0, 1.0), m)
    }

    fn cumulative_exact(&self, x: f64) -> (f64, f64) {
        if x <= -1.0 {
            return (0.0, 0.0);
        }
        if x >= 1.0 {
            return (1.0, 0.0);
        }
        let b = adaptive(-1.0, x, 1e-16, bump) / self.z;
        let m = adaptive(-1.0, x, 1e-16, |t| t * bump(t)) / self.z;
        (b.clamp(0.0, 1.0), m)
    }
}

fn node(i: usize, spacing: f64) -> f64 {
    if i == TABLE_CELLS {
        1.0
    } else {
        -1.0 + i as f64 * spacing
    }
}

/// The mollified step `φ₂`.
#[derive(Clone, Debug)]
struct Step {
    eta: f64,
    /// Bump half-width.
    w: f64,
    /// Ramp slope `1 + η`.
    k: f64,
    table: Arc<BumpTable>,
    exact: bool,
}

impl Step {
    fn new(eta: f64) -> Self {
        Self {
            eta,
            w: eta / (2.0 * (1.0 + eta)),
            k: 1.0 + eta,
            table: Arc::new(BumpTable::new()),
            exact: false,
        }
    }

    fn cumulative(&self, x: f64) -> (f64, f64) {
        if self.exact {
            self.table.cumulative_exact(x)
        } else {
            self.table.cumulative(x)
        }
    }

    /// `w ∫ (a/w − x)₊ ρ(x) dx`, the ramp kink smoothed over `[-w, w]`.
    fn smoothed_kink(&self, a: f64) -> f64 {
        let w = self.w;
        if a <= -w {
            0.0
        } else if a >= w {
            a
        } else {
            let x = a / w;
            let (b, m) = self.cumulative(x);
            w * (x * b - m)
        }
    }

    fn value(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 1.0;
        }
        if s >= 1.0 {
            return 0.0;
        }
        let v = 1.0 - self.k * (self.smoothed_kink(s - self.w) - self.smoothed_kink(s - 1.0 + self.w));
        v.clamp(0.0, 1.0)
    }

    fn d1(&self, s: f64) -> f64 {
        if s <= 0.0 || s >= 1.0 {
            return 0.0;
        }
        let (b1, _) = self.cumulative((s - self.w) / self.w);
        let (b2, _) = self.cumulative((s - 1.0 + self.w) / self.w);
        -self.k * (b1 - b2).max(0.0)
    }

    fn d2(&self, s: f64) -> f64 {
        if s <= 0.0 || s >= 1.0 {
            return 0.0;
        }
        let r1 = self.table.rho((s - self.w) / self.w);
        let r2 = self.table.rho((s - 1.0 + self.w) / self.w);
        -(self.k / self.w) * (r1 - r2)
    }

    /// Ends of the two smoothed kinks on `[0, 1]`.
    fn knots(&self) -> [f64; 4] {
        [0.0, 2.0 * self.w, 1.0 - 2.0 * self.w, 1.0]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutoffKind {
    Phi2,
    Phi1,
    Psi,
}

/// A smooth radial cutoff.
///
/// * `Phi2`: the base step, `1` on `s ≤ 0`, `0` on `s ≥ 1`.
/// * `Phi1`: `1` on `s ≤ δ₁ + ε³`, `0` on `s ≥ δ₂ − ε³`, with
///   `sup |φ₁'| ≤ 1/(δ₂ − δ₁) + ε`.
/// * `Psi`: `0` outside `[δ₁, δ₂]`, `1` on `[δ₁ + ε³, δ₂ − ε³]`.
#[derive(Clone, Debug)]
pub struct CutoffFunction {
    kind: CutoffKind,
    delta1: f64,
    delta2: f64,
    eps: f64,
    step: Step,
}

impl CutoffFunction {
    pub fn phi2(eta: f64) -> Result<Self, CutoffError> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(CutoffError::InvalidEta(eta));
        }
        Ok(Self {
            kind: CutoffKind::Phi2,
            delta1: 0.0,
            delta2: 1.0,
            eps: 0.0,
            step: Step::new(eta),
        })
    }

    pub fn phi1(delta1: f64, delta2: f64, eps: f64) -> Result<Self, CutoffError> {
        if !(delta1 > 0.0 && delta2 > delta1 && delta2.is_finite()) {
            return Err(CutoffError::InvalidRadii { delta1, delta2 });
        }
        let max = Self::max_epsilon(delta1, delta2);
        if !(eps > 0.0 && eps <= max) {
            return Err(CutoffError::InvalidEpsilon { eps, max });
        }
        Ok(Self {
            kind: CutoffKind::Phi1,
            delta1,
            delta2,
            eps,
            step: Step::new(eps * eps),
        })
    }

    /// The companion cutoff that equals one on the transition region of `phi1`.
    pub fn psi(phi1: &CutoffFunction) -> Result<Self, CutoffError> {
        if phi1.kind != CutoffKind::Phi1 {
            return Err(CutoffError::WrongKind { expected: "phi1" });
        }
        Ok(Self {
            kind: CutoffKind::Psi,
            ..phi1.clone()
        })
    }

    /// Largest admissible `ε` for the radii.
    pub fn max_epsilon(delta1: f64, delta2: f64) -> f64 {
        (0.25 * (delta2 - delta1)).min(0.5)
    }

    /// Evaluate the bump integrals by adaptive quadrature instead of the table.
    pub fn with_exact_evaluation(mut self, exact: bool) -> Self {
        self.step.exact = exact;
        self
    }

    pub fn kind(&self) -> CutoffKind {
        self.kind
    }

    pub fn delta1(&self) -> f64 {
        self.delta1
    }

    pub fn delta2(&self) -> f64 {
        self.delta2
    }

    pub fn epsilon(&self) -> f64 {
        self.eps
    }

    /// The margin of the underlying step.
    pub fn eta(&self) -> f64 {
        self.step.eta
    }

    /// `1/(δ₂ − δ₁) + ε` for `Phi1`, `1 + η` for `Phi2`.
    pub fn derivative_bound(&self) -> f64 {
        match self.kind {
            CutoffKind::Phi2 => 1.0 + self.step.eta,
            CutoffKind::Phi1 | CutoffKind::Psi => 1.0 / (self.delta2 - self.delta1) + self.eps,
        }
    }

    fn cube(&self) -> f64 {
        self.eps * self.eps * self.eps
    }

    /// Offset and width of the affine substitution in `φ₁`.
    fn phi1_map(&self) -> (f64, f64) {
        let e3 = self.cube();
        (self.delta1 + e3, self.delta2 - self.delta1 - 2.0 * e3)
    }
}

impl RadialProfile for CutoffFunction {
    fn value(&self, s: f64) -> f64 {
        self.eval(s).0
    }

    fn d1(&self, s: f64) -> f64 {
        self.eval(s).1
    }

    fn d2(&self, s: f64) -> f64 {
        self.eval(s).2
    }

    fn eval(&self, s: f64) -> (f64, f64, f64) {
        let st = &self.step;
        match self.kind {
            CutoffKind::Phi2 => (st.value(s), st.d1(s), st.d2(s)),
            CutoffKind::Phi1 => {
                let (s0, l) = self.phi1_map();
                let t = (s - s0) / l;
                (st.value(t), st.d1(t) / l, st.d2(t) / (l * l))
            }
            CutoffKind::Psi => {
                let e3 = self.cube();
                if s <= self.delta1 || s >= self.delta2 {
                    return (0.0, 0.0, 0.0);
                }
                let ta = (s - self.delta1) / e3;
                let tb = (s - (self.delta2 - e3)) / e3;
                let a = 1.0 - st.value(ta);
                let da = -st.d1(ta) / e3;
                let dda = -st.d2(ta) / (e3 * e3);
                let b = st.value(tb);
                let db = st.d1(tb) / e3;
                let ddb = st.d2(tb) / (e3 * e3);
                (a * b, da * b + a * db, dda * b + 2.0 * da * db + a * ddb)
            }
        }
    }

    fn knots(&self) -> Vec<f64> {
        let k = self.step.knots();
        let mut out: Vec<f64> = match self.kind {
            CutoffKind::Phi2 => k.to_vec(),
            CutoffKind::Phi1 => {
                let (s0, l) = self.phi1_map();
                k.iter().map(|t| s0 + l * t).collect()
            }
            CutoffKind::Psi => {
                let e3 = self.cube();
                k.iter()
                    .map(|t| self.delta1 + e3 * t)
                    .chain(k.iter().map(|t| self.delta2 - e3 + e3 * t))
                    .collect()
            }
        };
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn support_end(&self) -> f64 {
        match self.kind {
            CutoffKind::Phi2 => 1.0,
            CutoffKind::Phi1 => self.delta2 - self.cube(),
            CutoffKind::Psi => self.delta2,
        }
    }
}

/// `(1/(1−t), 1 + t(1−t)^{-2})` for `t ∈ [0, 1/2]`; the first never exceeds the second.
pub fn taylor_bound_check(t: f64) -> Result<(f64, f64), CutoffError> {
    if !(0.0..=0.5).contains(&t) {
        return Err(CutoffError::TaylorOutOfRange(t));
    }
    let one_minus = 1.0 - t;
    Ok((1.0 / one_minus, 1.0 + t / (one_minus * one_minus)))
}

#[cfg(test)]
mod tests;
