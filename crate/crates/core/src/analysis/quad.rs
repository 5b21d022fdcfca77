//! Quadrature over a disc clipped to a polygonal domain.

use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)]
use num_traits::Float;

use crate::discretize::Mesh;
use crate::geometry::{point_segment_distance, Point, PolygonDomain};
use crate::quadrature::{GaussLegendre, TRI_DEGREE5};

/// One node of a quadrature rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadPoint {
    pub at: Point,
    pub weight: f64,
    /// Element and barycentric coordinates for nodes of a mesh rule.
    pub cell: Option<(usize, [f64; 3])>,
}

/// The disc `D(center, radius)` intersected with a domain.
#[derive(Clone, Copy, Debug)]
pub struct Region<'a> {
    pub domain: &'a PolygonDomain,
    pub center: Point,
    pub radius: f64,
}

/// Recursion limit for elements cut by the circle or a knot circle.
pub const MESH_DEPTH: u32 = 8;

/// Panel settings of the polar rule.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PolarSettings {
    /// Longest radial panel and longest arc of an angular panel.
    pub max_panel: f64,
    /// Panels per piece between consecutive knots.
    pub min_panels: usize,
    /// Geometric panels toward the center.
    pub grading_levels: usize,
}

impl PolarSettings {
    /// Panels of a few tenths of a wavelength at frequency `lambda`.
    pub fn for_frequency(lambda: f64) -> Self {
        Self {
            max_panel: 2.5 / lambda.max(1.0),
            min_panels: 8,
            grading_levels: 18,
        }
    }
}

const GRADING_RATIO: f64 = 0.2;

fn push_unique(v: &mut Vec<f64>, x: f64) {
    if x.is_finite() {
        v.push(x);
    }
}

/// Sorted interior cut points of `[a, b]` from `knots`, with the ends.
fn pieces(a: f64, b: f64, knots: &[f64]) -> Vec<f64> {
    let mut cuts = alloc::vec![a];
    cuts.extend(knots.iter().copied().filter(|k| *k > a && *k < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (1.0 + y.abs()));
    cuts
}

/// Gauss nodes on `[a, b]` in `n` equal panels.
fn panels(gl: &GaussLegendre, a: f64, b: f64, n: usize, f: &mut impl FnMut(f64, f64)) {
    let step = (b - a) / n as f64;
    for k in 0..n {
        let lo = a + step * k as f64;
        let hi = if k + 1 == n { b } else { lo + step };
        for (x, w) in gl.mapped(lo, hi) {
            f(x, w);
        }
    }
}

struct Radial {
    gl: GaussLegendre,
    coarse: GaussLegendre,
    set: PolarSettings,
}

impl Radial {
    /// Nodes on `[a, b]` split at knots, graded geometrically toward `0` when `a = 0`.
    fn nodes(&self, a: f64, b: f64, knots: &[f64], f: &mut impl FnMut(f64, f64)) {
        let cuts = pieces(a, b, knots);
        for win in cuts.windows(2) {
            let (mut lo, hi) = (win[0], win[1]);
            if lo == 0.0 {
                let g = hi.min(self.set.max_panel);
                let mut x = g;
                for _ in 0..self.set.grading_levels {
                    let y = x * GRADING_RATIO;
                    for (t, w) in self.coarse.mapped(y, x) {
                        f(t, w);
                    }
                    x = y;
                }
                for (t, w) in self.coarse.mapped(0.0, x) {
                    f(t, w);
                }
                lo = g;
            }
            if hi > lo {
                let n = (((hi - lo) / self.set.max_panel).ceil() as usize).max(self.set.min_panels);
                panels(&self.gl, lo, hi, n, f);
            }
        }
    }
}

/// Gauss nodes on the segment `[a, b]` of a line, split at knots and graded toward `0`.
pub(crate) fn line_nodes(a: f64, b: f64, knots: &[f64], set: PolarSettings, mut f: impl FnMut(f64, f64)) {
    let radial = Radial {
        gl: GaussLegendre::new(16),
        coarse: GaussLegendre::new(8),
        set,
    };
    radial.nodes(a, b, knots, &mut f);
}

/// Ray parameters where `center + t·dir` crosses edges not passing through the center.
fn ray_crossings(domain: &PolygonDomain, center: Point, dir: Point, skip: &[bool], out: &mut Vec<f64>) {
    for (e, &s) in domain.edges().iter().zip(skip) {
        if s {
            continue;
        }
        let d = e.b - e.a;
        let den = dir.cross(d);
        if den == 0.0 {
            continue;
        }
        let ac = e.a - center;
        let t = ac.cross(d) / den;
        let u = ac.cross(dir) / den;
        if t > 0.0 && (0.0..=1.0).contains(&u) {
            out.push(t);
        }
    }
}

/// Polar nodes over `D(center, radius) ∩ Ω` with radial splits at `knots`.
pub(crate) fn polar_rule(region: &Region, knots: &[f64], set: PolarSettings, mut f: impl FnMut(QuadPoint)) {
    let Region { domain, center, radius } = *region;
    if !(radius > 0.0) {
        return;
    }
    let tol = domain.tol();
    let skip: Vec<bool> = domain
        .edges()
        .iter()
        .map(|e| point_segment_distance(center, e.a, e.b) <= tol)
        .collect();
    let mut radii: Vec<f64> = knots.iter().copied().filter(|k| *k > 0.0 && *k < radius).collect();
    radii.push(radius);

    let mut angles = Vec::new();
    for lp in domain.loops() {
        for &v in &lp.vertices {
            let dv = v.dist(center);
            if dv > tol && dv < radius {
                push_unique(&mut angles, (v - center).angle());
            }
        }
    }
    for (e, &s) in domain.edges().iter().zip(&skip) {
        if s {
            for v in [e.a, e.b] {
                if v.dist(center) > tol {
                    push_unique(&mut angles, (v - center).angle());
                }
            }
            continue;
        }
        let d = e.b - e.a;
        let ac = e.a - center;
        let (qa, qb) = (d.norm_sq(), 2.0 * ac.dot(d));
        for &rho in &radii {
            let qc = ac.norm_sq() - rho * rho;
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                continue;
            }
            let sq = disc.sqrt();
            for u in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
                if (0.0..=1.0).contains(&u) {
                    push_unique(&mut angles, (ac + d * u).angle());
                }
            }
        }
    }
    let mut angles: Vec<f64> = angles.into_iter().map(|a| if a < 0.0 { a + TAU } else { a }).collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|x, y| (*x - *y).abs() <= 1e-14);
    if angles.is_empty() {
        angles.push(0.0);
    }
    let first = angles[0];
    angles.push(first + TAU);

    let radial = Radial {
        gl: GaussLegendre::new(16),
        coarse: GaussLegendre::new(8),
        set,
    };
    let gl = GaussLegendre::new(16);
    let dtheta = (set.max_panel / radius).min(0.2);
    let mut cross = Vec::new();
    for win in angles.windows(2) {
        let (a, b) = (win[0], win[1]);
        if b - a <= 1e-14 {
            continue;
        }
        let n = ((b - a) / dtheta).ceil().max(2.0) as usize;
        panels(&gl, a, b, n, &mut |theta, wt| {
            let dir = Point::polar(theta);
            cross.clear();
            ray_crossings(domain, center, dir, &skip, &mut cross);
            cross.push(0.0);
            cross.push(radius);
            cross.retain(|t| *t <= radius);
            cross.sort_by(f64::total_cmp);
            for k in 0..cross.len() - 1 {
                let (r0, r1) = (cross[k], cross[k + 1]);
                if r1 - r0 <= 1e-15 * radius {
                    continue;
                }
                if !domain.contains_strict(center + dir * (0.5 * (r0 + r1))) {
                    continue;
                }
                radial.nodes(r0, r1, knots, &mut |r, wr| {
                    f(QuadPoint {
                        at: center + dir * r,
                        weight: wt * wr * r,
                        cell: None,
                    });
                });
            }
        });
    }
}

/// Element rule over `D(center, radius)`: the degree-5 rule on elements
/// away from the circle and the knot circles, recursive subdivision on cut
/// elements with the disc indicator applied at the leaves.
pub(crate) fn mesh_rule(mesh: &Mesh, center: Point, radius: f64, knots: &[f64], mut f: impl FnMut(QuadPoint)) {
    if !(radius > 0.0) {
        return;
    }
    let unit = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for t in 0..mesh.triangles().len() {
        let corners = mesh.corners(t);
        visit(&corners, t, unit, center, radius, knots, 0, &mut f);
    }
}

fn distance_range(w: &[Point; 3], c: Point) -> (f64, f64) {
    let dmax = w.iter().map(|p| p.dist(c)).fold(0.0, f64::max);
    let l = crate::discretize::barycentric(c, *w);
    let dmin = if l.iter().all(|x| *x >= 0.0) {
        0.0
    } else {
        (0..3)
            .map(|i| point_segment_distance(c, w[i], w[(i + 1) % 3]))
            .fold(f64::INFINITY, f64::min)
    };
    (dmin, dmax)
}

#[allow(clippy::too_many_arguments)]
fn visit(
    corners: &[Point; 3],
    t: usize,
    bary: [[f64; 3]; 3],
    c: Point,
    radius: f64,
    knots: &[f64],
    depth: u32,
    f: &mut impl FnMut(QuadPoint),
) {
    let to_world = |l: [f64; 3]| corners[0] * l[0] + corners[1] * l[1] + corners[2] * l[2];
    let w = [to_world(bary[0]), to_world(bary[1]), to_world(bary[2])];
    let (dmin, dmax) = distance_range(&w, c);
    if dmin >= radius {
        return;
    }
    let cuts = |r: f64| dmin < r && r < dmax;
    let cut = cuts(radius) || knots.iter().any(|&k| k < radius && cuts(k));
    if cut && depth < MESH_DEPTH {
        let mid = |i: usize, j: usize| -> [f64; 3] {
            [
                0.5 * (bary[i][0] + bary[j][0]),
                0.5 * (bary[i][1] + bary[j][1]),
                0.5 * (bary[i][2] + bary[j][2]),
            ]
        };
        let (m01, m12, m20) = (mid(0, 1), mid(1, 2), mid(2, 0));
        for child in [
            [bary[0], m01, m20],
            [m01, bary[1], m12],
            [m20, m12, bary[2]],
            [m12, m20, m01],
        ] {
            visit(corners, t, child, c, radius, knots, depth + 1, f);
        }
        return;
    }
    let area = 0.5 * (w[1] - w[0]).cross(w[2] - w[0]).abs();
    for (q, wq) in TRI_DEGREE5.points.iter().zip(TRI_DEGREE5.weights) {
        let mut l = [0.0; 3];
        for (k, lk) in l.iter_mut().enumerate() {
            *lk = q[0] * bary[0][k] + q[1] * bary[1][k] + q[2] * bary[2][k];
        }
        let at = to_world(l);
        if at.dist(c) < radius {
            f(QuadPoint {
                at,
                weight: wq * area,
                cell: Some((t, l)),
            });
        }
    }
}
