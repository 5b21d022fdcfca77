use core::f64::consts::{PI, SQRT_2};
#[allow(unused_imports)]
use num_traits::Float;

use super::bessel::{bessel_j_all, bessel_zero};
use super::OracleError;
use crate::geometry::{Bc, GeometryError, Point, PolygonDomain, RigidMotion};

/// Symmetric 2×2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Hessian {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Hessian {
    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    /// `vᵀ H w`.
    pub fn bilinear(&self, v: Point, w: Point) -> f64 {
        v.x * (self.xx * w.x + self.xy * w.y) + v.y * (self.xy * w.x + self.yy * w.y)
    }

    /// `H v`.
    pub fn apply(&self, v: Point) -> Point {
        Point::new(self.xx * v.x + self.xy * v.y, self.xy * v.x + self.yy * v.y)
    }

    /// `R H Rᵀ` for the rotation by `angle`.
    pub fn rotate(&self, angle: f64) -> Hessian {
        let (s, c) = angle.sin_cos();
        // Rows of R, i.e. Rᵀ applied to the basis vectors.
        let e1 = Point::new(c, -s);
        let e2 = Point::new(s, c);
        Hessian {
            xx: self.bilinear(e1, e1),
            xy: self.bilinear(e1, e2),
            yy: self.bilinear(e2, e2),
        }
    }
}

/// Value, gradient and Hessian at one point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ModeSample {
    pub value: f64,
    pub grad: Point,
    pub hessian: Hessian,
}

/// Which trigonometric factor a sector harmonic carries in `θ + θ₀/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Angular {
    Sin,
    Cos,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModeShape {
    /// `[0, lx] × [0, ly]` with one condition on all sides.
    Rectangle { lx: f64, ly: f64, m: u32, n: u32, bc: Bc },
    /// Dirichlet modes on `{0 < y < x < 1}`.
    Triangle { m: u32, n: u32 },
    /// `J_ν(λr) · sin|cos(ν(θ + θ₀/2))` in corner coordinates.
    Sector {
        theta0: f64,
        k: u32,
        nu: f64,
        angular: Angular,
        upper: Bc,
        lower: Bc,
        motion: RigidMotion,
    },
}

/// A closed-form solution of `−Δu = λ²u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticMode {
    shape: ModeShape,
    lambda: f64,
    global: bool,
}

impl AnalyticMode {
    /// Separable rectangle eigenfunction, `L²`-normalized.
    pub fn rectangle(lx: f64, ly: f64, m: u32, n: u32, bc: Bc) -> Result<Self, OracleError> {
        if !(lx > 0.0 && ly > 0.0) || (bc == Bc::Dirichlet && (m == 0 || n == 0)) {
            return Err(OracleError::InvalidIndices { m, n });
        }
        let (fm, fn_) = (m as f64 * PI / lx, n as f64 * PI / ly);
        Ok(Self {
            shape: ModeShape::Rectangle { lx, ly, m, n, bc },
            lambda: fm.hypot(fn_),
            global: true,
        })
    }

    /// Antisymmetrized square mode on the right isoceles triangle, `L²`-normalized.
    pub fn triangle(m: u32, n: u32) -> Result<Self, OracleError> {
        if m <= n || n == 0 {
            return Err(OracleError::InvalidIndices { m, n });
        }
        Ok(Self {
            shape: ModeShape::Triangle { m, n },
            lambda: PI * (m as f64).hypot(n as f64),
            global: true,
        })
    }

    /// Local corner solution with the given side conditions (`upper` on `F₁`, `lower` on `F₂`).
    ///
    /// Matching conditions use `ν = kπ/θ₀`, mixed ones `ν = (k + ½)π/θ₀`.
    pub fn sector_harmonic(theta0: f64, k: u32, lambda: f64, upper: Bc, lower: Bc) -> Result<Self, OracleError> {
        if !(theta0 > 0.0 && theta0 < 2.0 * PI) {
            return Err(OracleError::InvalidAngle(theta0));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(OracleError::NonPositiveLambda(lambda));
        }
        let (nu, angular) = match (upper, lower) {
            (Bc::Dirichlet, Bc::Dirichlet) => {
                if k == 0 {
                    return Err(OracleError::InvalidIndices { m: k, n: 0 });
                }
                (k as f64 * PI / theta0, Angular::Sin)
            }
            (Bc::Neumann, Bc::Neumann) => (k as f64 * PI / theta0, Angular::Cos),
            (Bc::Dirichlet, Bc::Neumann) => ((k as f64 + 0.5) * PI / theta0, Angular::Cos),
            (Bc::Neumann, Bc::Dirichlet) => ((k as f64 + 0.5) * PI / theta0, Angular::Sin),
        };
        if nu > super::bessel::MAX_ORDER {
            return Err(OracleError::BesselRange { nu, x: 0.0 });
        }
        Ok(Self {
            shape: ModeShape::Sector {
                theta0,
                k,
                nu,
                angular,
                upper,
                lower,
                motion: RigidMotion::new(Point::ORIGIN, 0.0),
            },
            lambda,
            global: false,
        })
    }

    /// Sector harmonic whose frequency puts the `m`-th Bessel zero on the arc `r = radius`.
    pub fn sector_dirichlet_arc(
        theta0: f64,
        k: u32,
        m: usize,
        radius: f64,
        upper: Bc,
        lower: Bc,
    ) -> Result<Self, OracleError> {
        let probe = Self::sector_harmonic(theta0, k, 1.0, upper, lower)?;
        let zero = bessel_zero(probe.nu().unwrap_or(0.0), m)?;
        let mut mode = Self::sector_harmonic(theta0, k, zero / radius, upper, lower)?;
        mode.global = true;
        Ok(mode)
    }

    /// Places a sector harmonic at a corner: corner coordinates map to the world by `motion`.
    pub fn placed(mut self, placement: RigidMotion) -> Self {
        if let ModeShape::Sector { ref mut motion, .. } = self.shape {
            *motion = placement;
        }
        self
    }

    pub fn shape(&self) -> ModeShape {
        self.shape
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn lambda_sq(&self) -> f64 {
        match self.shape {
            ModeShape::Rectangle { lx, ly, m, n, .. } => {
                PI * PI * ((m * m) as f64 / (lx * lx) + (n * n) as f64 / (ly * ly))
            }
            ModeShape::Triangle { m, n } => PI * PI * (m * m + n * n) as f64,
            ModeShape::Sector { .. } => self.lambda * self.lambda,
        }
    }

    /// True for eigenfunctions of a whole domain, false for local corner solutions.
    pub fn is_global(&self) -> bool {
        self.global
    }

    /// Bessel order of a sector harmonic.
    pub fn nu(&self) -> Option<f64> {
        match self.shape {
            ModeShape::Sector { nu, .. } => Some(nu),
            _ => None,
        }
    }

    /// The domain on which the mode is a normalized eigenfunction, if any.
    ///
    /// Sector harmonics report a polygonal approximation of the sector of
    /// radius `radius`, closed with `arc_segments` chords.
    pub fn domain(&self, radius: f64, arc_segments: usize) -> Result<PolygonDomain, GeometryError> {
        match self.shape {
            ModeShape::Rectangle { lx, ly, bc, .. } => PolygonDomain::rectangle(lx, ly, bc),
            ModeShape::Triangle { .. } => PolygonDomain::new(alloc::vec![crate::geometry::BoundaryLoop::new(
                alloc::vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0)],
                alloc::vec![Bc::Dirichlet; 3],
            )]),
            ModeShape::Sector {
                theta0, upper, lower, ..
            } => PolygonDomain::sector(theta0, radius, arc_segments, upper, lower, Bc::Dirichlet),
        }
    }

    pub fn value(&self, p: Point) -> f64 {
        self.sample(p).value
    }

    /// Value, gradient and Hessian at a world point.
    pub fn sample(&self, p: Point) -> ModeSample {
        match self.shape {
            ModeShape::Rectangle { lx, ly, m, n, bc } => {
                let (kx, ky) = (m as f64 * PI / lx, n as f64 * PI / ly);
                let (sx, cx) = (kx * p.x).sin_cos();
                let (sy, cy) = (ky * p.y).sin_cos();
                match bc {
                    Bc::Dirichlet => {
                        let a = 2.0 / (lx * ly).sqrt();
                        ModeSample {
                            value: a * sx * sy,
                            grad: Point::new(a * kx * cx * sy, a * ky * sx * cy),
                            hessian: Hessian {
                                xx: -a * kx * kx * sx * sy,
                                xy: a * kx * ky * cx * cy,
                                yy: -a * ky * ky * sx * sy,
                            },
                        }
                    }
                    Bc::Neumann => {
                        let norm = |k: u32| if k == 0 { 1.0 } else { SQRT_2 };
                        let a = norm(m) * norm(n) / (lx * ly).sqrt();
                        ModeSample {
                            value: a * cx * cy,
                            grad: Point::new(-a * kx * sx * cy, -a * ky * cx * sy),
                            hessian: Hessian {
                                xx: -a * kx * kx * cx * cy,
                                xy: a * kx * ky * sx * sy,
                                yy: -a * ky * ky * cx * cy,
                            },
                        }
                    }
                }
            }
            ModeShape::Triangle { m, n } => {
                let f = |a: u32, b: u32| {
                    let (ka, kb) = (a as f64 * PI, b as f64 * PI);
                    let (sx, cx) = (ka * p.x).sin_cos();
                    let (sy, cy) = (kb * p.y).sin_cos();
                    ModeSample {
                        value: sx * sy,
                        grad: Point::new(ka * cx * sy, kb * sx * cy),
                        hessian: Hessian {
                            xx: -ka * ka * sx * sy,
                            xy: ka * kb * cx * cy,
                            yy: -kb * kb * sx * sy,
                        },
                    }
                };
                let (a, b) = (f(m, n), f(n, m));
                ModeSample {
                    value: 2.0 * (a.value - b.value),
                    grad: (a.grad - b.grad) * 2.0,
                    hessian: Hessian {
                        xx: 2.0 * (a.hessian.xx - b.hessian.xx),
                        xy: 2.0 * (a.hessian.xy - b.hessian.xy),
                        yy: 2.0 * (a.hessian.yy - b.hessian.yy),
                    },
                }
            }
            ModeShape::Sector {
                theta0,
                nu,
                angular,
                motion,
                ..
            } => {
                let q = motion.to_local(p);
                let local = sector_sample(theta0, nu, angular, self.lambda, q);
                ModeSample {
                    value: local.value,
                    grad: motion.vector_to_world(local.grad),
                    hessian: local.hessian.rotate(motion.angle),
                }
            }
        }
    }
}

fn sector_sample(theta0: f64, nu: f64, angular: Angular, lambda: f64, q: Point) -> ModeSample {
    let r = q.norm();
    let theta = q.angle();
    let phase = nu * (theta + 0.5 * theta0);
    let (s, c) = phase.sin_cos();
    let (a, da) = match angular {
        Angular::Sin => (s, nu * c),
        Angular::Cos => (c, -nu * s),
    };
    let dda = -nu * nu * a;
    // Range errors cannot occur: ν was checked at construction and λr stays in range for desk geometry.
    let x = (lambda * r).min(super::bessel::MAX_ARG);
    let b = bessel_j_all(nu, x).unwrap_or(super::bessel::BesselValue {
        j: f64::NAN,
        dj: f64::NAN,
        d2j: f64::NAN,
    });
    let value = b.j * a;
    if r == 0.0 {
        return ModeSample {
            value,
            grad: Point::ORIGIN,
            hessian: Hessian::default(),
        };
    }
    let u_r = lambda * b.dj * a;
    let u_t = b.j * da;
    let u_rr = lambda * lambda * b.d2j * a;
    let u_rt = lambda * b.dj * da;
    let u_tt = b.j * dda;
    let rhat = Point::new(theta.cos(), theta.sin());
    let that = rhat.perp();
    let grad = rhat * u_r + that * (u_t / r);
    let h_rr = u_rr;
    let h_rt = u_rt / r - u_t / (r * r);
    let h_tt = u_r / r + u_tt / (r * r);
    let outer = |v: Point, w: Point| (v.x * w.x, v.x * w.y + v.y * w.x, v.y * w.y);
    let (a1, b1, c1) = outer(rhat, rhat);
    let (a2, b2, c2) = outer(rhat, that);
    let (a3, b3, c3) = outer(that, that);
    ModeSample {
        value,
        grad,
        hessian: Hessian {
            xx: h_rr * a1 + h_rt * 2.0 * a2 + h_tt * a3,
            xy: h_rr * b1 * 0.5 + h_rt * b2 + h_tt * b3 * 0.5,
            yy: h_rr * c1 + h_rt * 2.0 * c2 + h_tt * c3,
        },
    }
}

#[cfg(test)]
mod tests;
