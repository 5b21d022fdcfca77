//! Triangulation and finite-element assembly.
//!
//! Meshes come from [`triangulate`]; [`assemble`] builds the stiffness and
//! mass matrices of a P1 or P2 space with Dirichlet nodes eliminated, and
//! [`DiscreteMode`] evaluates the resulting eigenvectors anywhere in the mesh.

mod fem;
mod mesher;
mod sparse;


use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use thiserror::Error;

use crate::geometry::{Bc, EdgeId, Point};

pub use fem::{assemble, element_matrices, Assembly, DiscreteMode, ElementOrder, FemSpace};
pub use mesher::{triangulate, triangulate_with, MeshOptions};
pub use sparse::SparseSymMatrix;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum MeshError {
    #[error("target size {target_h} must be positive and at most the domain diameter {diameter}")]
    InvalidSize { target_h: f64, diameter: f64 },
    #[error("refinement exceeded {0} vertices before reaching the quality floor")]
    TooManyVertices(usize),
    #[error("unsupported element order {0} (expected 1 or 2)")]
    UnsupportedOrder(u32),
    #[error("no free degrees of freedom remain after Dirichlet elimination")]
    EmptyDofSet,
    #[error("malformed mesh: {0}")]
    Malformed(&'static str),
    #[error("point ({x}, {y}) lies outside the mesh")]
    OutsideMesh { x: f64, y: f64 },
    #[error("coefficient vector has length {got}, expected {expected}")]
    CoefficientLength { got: usize, expected: usize },
}

/// A mesh edge lying on the domain boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryEdge {
    pub triangle: u32,
    /// Local edge `i` joins local vertices `i` and `i + 1 (mod 3)`.
    pub local: u8,
    pub edge: EdgeId,
    pub bc: Bc,
}

/// Size grading around one concave corner: `h(r) ∝ (r / radius)^exponent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CornerGrading {
    pub vertex: Point,
    pub theta0: f64,
    pub exponent: f64,
    pub radius: f64,
}

/// A conforming triangulation with counterclockwise triangles.
#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[u32; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
    gradings: Vec<CornerGrading>,
    target_h: f64,
    grid: Grid,
}

impl PartialEq for Mesh {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.triangles == other.triangles
            && self.boundary_edges == other.boundary_edges
            && self.gradings == other.gradings
            && self.target_h == other.target_h
    }
}

impl Mesh {
    /// Builds a mesh from raw arrays, checking indices and orientation.
    pub fn from_parts(
        vertices: Vec<Point>,
        triangles: Vec<[u32; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
        gradings: Vec<CornerGrading>,
        target_h: f64,
    ) -> Result<Self, MeshError> {
        if triangles.is_empty() {
            return Err(MeshError::Malformed("no triangles"));
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(MeshError::Malformed("non-finite vertex"));
        }
        let n = vertices.len() as u32;
        for t in &triangles {
            if t.iter().any(|&v| v >= n) {
                return Err(MeshError::Malformed("vertex index out of range"));
            }
            let [a, b, c] = t.map(|v| vertices[v as usize]);
            if (b - a).cross(c - a) <= 0.0 {
                return Err(MeshError::Malformed("triangle with non-positive area"));
            }
        }
        for e in &boundary_edges {
            if e.triangle as usize >= triangles.len() || e.local > 2 {
                return Err(MeshError::Malformed("boundary edge index out of range"));
            }
        }
        Ok(Self::from_parts_unchecked(
            vertices,
            triangles,
            boundary_edges,
            gradings,
            target_h,
        ))
    }

    pub(crate) fn from_parts_unchecked(
        vertices: Vec<Point>,
        triangles: Vec<[u32; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
        gradings: Vec<CornerGrading>,
        target_h: f64,
    ) -> Self {
        let grid = Grid::new(&vertices, &triangles);
        Self {
            vertices,
            triangles,
            boundary_edges,
            gradings,
            target_h,
            grid,
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn gradings(&self) -> &[CornerGrading] {
        &self.gradings
    }

    pub fn target_h(&self) -> f64 {
        self.target_h
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|v| self.vertices[v as usize])
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        0.5 * (b - a).cross(c - a)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.area(t)).sum()
    }

    /// Longest edge of triangle `t`.
    pub fn diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        a.dist(b).max(b.dist(c)).max(c.dist(a))
    }

    pub fn max_edge(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.diameter(t)).fold(0.0, f64::max)
    }

    /// Smallest interior angle of triangle `t`, in degrees.
    pub fn min_angle_deg(&self, t: usize) -> f64 {
        let p = self.corners(t);
        let mut m = f64::INFINITY;
        for k in 0..3 {
            let (u, v) = (p[(k + 1) % 3] - p[k], p[(k + 2) % 3] - p[k]);
            m = m.min(u.cross(v).atan2(u.dot(v)));
        }
        m * 180.0 / PI
    }

    pub fn min_angle(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.min_angle_deg(t))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.corners(t);
        Point::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0)
    }

    /// Every interior edge is shared by exactly two triangles with opposite
    /// orientation and every other edge is a listed boundary edge.
    pub fn is_conforming(&self) -> bool {
        let mut edges: Vec<(u32, u32, u32, u8)> = Vec::with_capacity(3 * self.triangles.len());
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                edges.push((a.min(b), a.max(b), t as u32, k as u8));
            }
        }
        edges.sort_unstable();
        let mut boundary: Vec<(u32, u8)> = self.boundary_edges.iter().map(|e| (e.triangle, e.local)).collect();
        boundary.sort_unstable();
        let mut singles = Vec::new();
        let mut i = 0;
        while i < edges.len() {
            let mut j = i + 1;
            while j < edges.len() && edges[j].0 == edges[i].0 && edges[j].1 == edges[i].1 {
                j += 1;
            }
            match j - i {
                1 => singles.push((edges[i].2, edges[i].3)),
                2 => {
                    let (t1, k1) = (edges[i].2 as usize, edges[i].3 as usize);
                    let (t2, k2) = (edges[i + 1].2 as usize, edges[i + 1].3 as usize);
                    if self.triangles[t1][k1] != self.triangles[t2][(k2 + 1) % 3] {
                        return false;
                    }
                }
                _ => return false,
            }
            i = j;
        }
        singles.sort_unstable();
        singles == boundary
    }

    /// Splits every triangle into four through its edge midpoints.
    pub fn refine_uniform(&self) -> Mesh {
        let mut vertices = self.vertices.clone();
        let mut mid: Vec<(u32, u32, u32)> = Vec::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                mid.push((a.min(b), a.max(b), 0));
            }
        }
        mid.sort_unstable();
        mid.dedup_by(|x, y| x.0 == y.0 && x.1 == y.1);
        for m in mid.iter_mut() {
            m.2 = vertices.len() as u32;
            vertices.push(vertices[m.0 as usize].midpoint(vertices[m.1 as usize]));
        }
        let lookup = |a: u32, b: u32| {
            let key = (a.min(b), a.max(b));
            let i = mid.binary_search_by(|m| (m.0, m.1).cmp(&key)).unwrap();
            mid[i].2
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let (ab, bc, ca) = (lookup(a, b), lookup(b, c), lookup(c, a));
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        // Child triangles and local edges covering each half of parent edge k.
        const HALVES: [[(u32, u8); 2]; 3] = [[(0, 0), (1, 0)], [(1, 1), (2, 1)], [(2, 2), (0, 2)]];
        let mut boundary_edges = Vec::with_capacity(2 * self.boundary_edges.len());
        for e in &self.boundary_edges {
            for (child, local) in HALVES[e.local as usize] {
                boundary_edges.push(BoundaryEdge {
                    triangle: 4 * e.triangle + child,
                    local,
                    ..*e
                });
            }
        }
        Mesh::from_parts_unchecked(
            vertices,
            triangles,
            boundary_edges,
            self.gradings.clone(),
            0.5 * self.target_h,
        )
    }

    /// The owning triangle of `p` and its barycentric coordinates.
    ///
    /// Among triangles containing `p` the lowest index wins; points within
    /// `1e-9` of the mesh diameter outside it snap to the nearest triangle.
    pub fn locate(&self, p: Point) -> Option<(usize, [f64; 3])> {
        self.grid.locate(p, &self.vertices, &self.triangles)
    }
}

pub(crate) fn barycentric(p: Point, [a, b, c]: [Point; 3]) -> [f64; 3] {
    let det = (b - a).cross(c - a);
    let l1 = (p - a).cross(c - a) / det;
    let l2 = (b - a).cross(p - a) / det;
    [1.0 - l1 - l2, l1, l2]
}

/// Uniform bucket grid over triangle bounding boxes.
#[derive(Clone, Debug, Default)]
struct Grid {
    lo: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    start: Vec<u32>,
    items: Vec<u32>,
    tol: f64,
}

impl Grid {
    fn new(vertices: &[Point], triangles: &[[u32; 3]]) -> Self {
        if vertices.is_empty() || triangles.is_empty() {
            return Self::default();
        }
        let (mut lo, mut hi) = (vertices[0], vertices[0]);
        for p in vertices {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let span = hi - lo;
        let tol = 1e-9 * span.norm();
        let n = ((triangles.len() as f64 / 2.0).sqrt().ceil() as usize).max(1);
        let cell = (span.x.max(span.y) / n as f64).max(1e-300);
        let nx = ((span.x / cell).floor() as usize + 1).min(4 * n);
        let ny = ((span.y / cell).floor() as usize + 1).min(4 * n);
        let mut grid = Self {
            lo,
            cell,
            nx,
            ny,
            start: alloc::vec![0; nx * ny + 1],
            items: Vec::new(),
            tol,
        };
        let ranges: Vec<(usize, usize, usize, usize)> = triangles
            .iter()
            .map(|t| {
                let ps = t.map(|v| vertices[v as usize]);
                let (x0, y0) = grid.cell_of(Point::new(
                    ps[0].x.min(ps[1].x).min(ps[2].x) - tol,
                    ps[0].y.min(ps[1].y).min(ps[2].y) - tol,
                ));
                let (x1, y1) = grid.cell_of(Point::new(
                    ps[0].x.max(ps[1].x).max(ps[2].x) + tol,
                    ps[0].y.max(ps[1].y).max(ps[2].y) + tol,
                ));
                (x0, x1, y0, y1)
            })
            .collect();
        for &(x0, x1, y0, y1) in &ranges {
            for j in y0..=y1 {
                for i in x0..=x1 {
                    grid.start[j * nx + i + 1] += 1;
                }
            }
        }
        for k in 1..grid.start.len() {
            grid.start[k] += grid.start[k - 1];
        }
        let mut fill = grid.start.clone();
        grid.items = alloc::vec![0; *grid.start.last().unwrap() as usize];
        for (t, &(x0, x1, y0, y1)) in ranges.iter().enumerate() {
            for j in y0..=y1 {
                for i in x0..=x1 {
                    let c = j * nx + i;
                    grid.items[fill[c] as usize] = t as u32;
                    fill[c] += 1;
                }
            }
        }
        grid
    }

    fn cell_of(&self, p: Point) -> (usize, usize) {
        let fx = ((p.x - self.lo.x) / self.cell).floor();
        let fy = ((p.y - self.lo.y) / self.cell).floor();
        (
            (fx.max(0.0) as usize).min(self.nx - 1),
            (fy.max(0.0) as usize).min(self.ny - 1),
        )
    }

    fn locate(&self, p: Point, vertices: &[Point], triangles: &[[u32; 3]]) -> Option<(usize, [f64; 3])> {
        if self.nx == 0 || !p.is_finite() {
            return None;
        }
        let (i, j) = self.cell_of(p);
        let cell = j * self.nx + i;
        let mut best: Option<(f64, usize, [f64; 3])> = None;
        for &t in &self.items[self.start[cell] as usize..self.start[cell + 1] as usize] {
            let ps = triangles[t as usize].map(|v| vertices[v as usize]);
            let l = barycentric(p, ps);
            let m = l[0].min(l[1]).min(l[2]);
            if m >= 0.0 {
                // Items are in increasing triangle order.
                return Some((t as usize, l));
            }
            // Distance from `p` to the triangle.
            let d = (0..3)
                .map(|k| crate::geometry::point_segment_distance(p, ps[k], ps[(k + 1) % 3]))
                .fold(f64::INFINITY, f64::min);
            if d <= self.tol && best.is_none_or(|b| d < b.0) {
                best = Some((d, t as usize, l));
            }
        }
        best.map(|(_, t, l)| (t, l))
    }
}
