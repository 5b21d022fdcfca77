//! Polygonal domains with mixed boundary conditions.
//!
//! A domain is one counterclockwise outer loop plus any number of clockwise
//! hole loops, so the enclosed region always lies to the left of every edge.
//! Edge `k` of a loop joins vertex `k` to vertex `k + 1 (mod M)` and carries
//! its own boundary condition.

mod frames;
mod point;

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
#[allow(unused_imports)]
use num_traits::Float;

use thiserror::Error;

pub use frames::{CornerFrame, CornerFrames, FrameSide, RigidMotion};
pub use point::{circumcenter, incircle, orient, point_segment_distance, segment_segment_distance, Point};

/// Relative size of the on-boundary band: `tol_geom = GEOM_TOL_REL * diameter`.
pub const GEOM_TOL_REL: f64 = 1e-9;

/// Angles within this many radians of `π` count as flat.
const FLAT_ANGLE_TOL: f64 = 1e-9;

/// Homogeneous boundary condition on one edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bc {
    /// `u = 0`.
    Dirichlet,
    /// `∂_ν u = 0`.
    Neumann,
}

impl Bc {
    pub fn as_str(self) -> &'static str {
        match self {
            Bc::Dirichlet => "dirichlet",
            Bc::Neumann => "neumann",
        }
    }
}

/// Edge `edge` of loop `loop_index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId {
    pub loop_index: usize,
    pub edge: usize,
}

/// Vertex `vertex` of loop `loop_index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId {
    pub loop_index: usize,
    pub vertex: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("domain has no boundary loops")]
    NoLoops,
    #[error("loop {loop_index} has {count} vertices; at least 3 are required")]
    TooFewVertices { loop_index: usize, count: usize },
    #[error("loop {loop_index} has {vertices} vertices but {bcs} boundary conditions")]
    BcCountMismatch {
        loop_index: usize,
        vertices: usize,
        bcs: usize,
    },
    #[error("loop {loop_index} vertex {vertex} is not finite")]
    NonFinite { loop_index: usize, vertex: usize },
    #[error("loop {loop_index} edge {edge} has zero length")]
    DegenerateEdge { loop_index: usize, edge: usize },
    #[error("loop {loop_index} folds back on itself at vertex {vertex} (corner angle 0 or 2π)")]
    DegenerateCorner { loop_index: usize, vertex: usize },
    #[error("loop {loop_index} self-intersects: edges {edge_a} and {edge_b}")]
    SelfIntersection {
        loop_index: usize,
        edge_a: usize,
        edge_b: usize,
    },
    #[error("loops {loop_a} and {loop_b} overlap: edge {edge_a} meets edge {edge_b}")]
    OverlappingLoops {
        loop_a: usize,
        edge_a: usize,
        loop_b: usize,
        edge_b: usize,
    },
    #[error("loop {loop_index} has the wrong orientation (outer loop must be counterclockwise, holes clockwise)")]
    WrongOrientation { loop_index: usize },
    #[error("loop {loop_index} is not nested directly inside the outer loop, so the interior is disconnected")]
    Disconnected { loop_index: usize },
    #[error("point ({x}, {y}) lies outside the closed domain")]
    OutsideDomain { x: f64, y: f64 },
    #[error("vertex {vertex} of loop {loop_index} is flat (θ₀ = π), not a corner")]
    NotACorner { loop_index: usize, vertex: usize },
    #[error("point ({x}, {y}) is not on the boundary")]
    NotOnBoundary { x: f64, y: f64 },
    #[error("no boundary face is non-adjacent to the query point")]
    NoNonAdjacentFace,
}

/// One closed boundary curve.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryLoop {
    pub vertices: Vec<Point>,
    pub bc: Vec<Bc>,
}

impl BoundaryLoop {
    pub fn new(vertices: Vec<Point>, bc: Vec<Bc>) -> Self {
        Self { vertices, bc }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Endpoints of edge `k`.
    pub fn edge(&self, k: usize) -> (Point, Point) {
        let m = self.vertices.len();
        (self.vertices[k], self.vertices[(k + 1) % m])
    }

    /// Shoelace signed area.
    pub fn signed_area(&self) -> f64 {
        let m = self.vertices.len();
        (0..m)
            .map(|k| self.vertices[k].cross(self.vertices[(k + 1) % m]))
            .sum::<f64>()
            * 0.5
    }
}

/// A flattened view of one boundary segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub id: EdgeId,
    pub a: Point,
    pub b: Point,
    pub bc: Bc,
}

impl Edge {
    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn distance_to(&self, p: Point) -> f64 {
        point_segment_distance(p, self.a, self.b)
    }

    /// Outward unit normal (the domain lies to the left of `a → b`).
    pub fn outward_normal(&self) -> Point {
        let t = self.b - self.a;
        Point::new(t.y, -t.x) * (1.0 / t.norm())
    }
}

/// Where a point of the closed domain sits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PointClass {
    Interior,
    EdgeInterior { edge: EdgeId },
    ConvexCorner { vertex: VertexId, theta0: f64 },
    ConcaveCorner { vertex: VertexId, theta0: f64 },
}

impl PointClass {
    /// Opening angle seen from the point: `2π` inside, `π` on a face.
    pub fn theta0(&self) -> f64 {
        match *self {
            PointClass::Interior => TAU,
            PointClass::EdgeInterior { .. } => PI,
            PointClass::ConvexCorner { theta0, .. } | PointClass::ConcaveCorner { theta0, .. } => theta0,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PointClass::Interior => "interior",
            PointClass::EdgeInterior { .. } => "edge",
            PointClass::ConvexCorner { .. } => "convex",
            PointClass::ConcaveCorner { .. } => "concave",
        }
    }

    pub fn is_boundary(&self) -> bool {
        !matches!(self, PointClass::Interior)
    }
}

/// Result of a membership query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Interior,
    Boundary,
    Exterior,
}

/// A validated polygonal domain Ω.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonDomain {
    loops: Vec<BoundaryLoop>,
    edges: Vec<Edge>,
    diameter: f64,
}

impl PolygonDomain {
    /// Validates the loops. Loop 0 is the outer boundary.
    pub fn new(loops: Vec<BoundaryLoop>) -> Result<Self, GeometryError> {
        if loops.is_empty() {
            return Err(GeometryError::NoLoops);
        }
        for (li, lp) in loops.iter().enumerate() {
            if lp.vertices.len() < 3 {
                return Err(GeometryError::TooFewVertices {
                    loop_index: li,
                    count: lp.vertices.len(),
                });
            }
            if lp.bc.len() != lp.vertices.len() {
                return Err(GeometryError::BcCountMismatch {
                    loop_index: li,
                    vertices: lp.vertices.len(),
                    bcs: lp.bc.len(),
                });
            }
            if let Some(v) = lp.vertices.iter().position(|p| !p.is_finite()) {
                return Err(GeometryError::NonFinite {
                    loop_index: li,
                    vertex: v,
                });
            }
        }

        let diameter = loops[0]
            .vertices
            .iter()
            .flat_map(|a| loops[0].vertices.iter().map(move |b| a.dist(*b)))
            .fold(0.0, f64::max);
        let tol = GEOM_TOL_REL * diameter.max(f64::MIN_POSITIVE);

        for (li, lp) in loops.iter().enumerate() {
            validate_loop(li, lp, tol)?;
        }
        for a in 0..loops.len() {
            for b in (a + 1)..loops.len() {
                for ea in 0..loops[a].len() {
                    let (p, q) = loops[a].edge(ea);
                    for eb in 0..loops[b].len() {
                        let (r, s) = loops[b].edge(eb);
                        if segment_segment_distance(p, q, r, s) <= tol {
                            return Err(GeometryError::OverlappingLoops {
                                loop_a: a,
                                edge_a: ea,
                                loop_b: b,
                                edge_b: eb,
                            });
                        }
                    }
                }
            }
        }

        if loops[0].signed_area() <= 0.0 {
            return Err(GeometryError::WrongOrientation { loop_index: 0 });
        }
        for (li, lp) in loops.iter().enumerate().skip(1) {
            if lp.signed_area() >= 0.0 {
                return Err(GeometryError::WrongOrientation { loop_index: li });
            }
            if !winding_contains(&loops[0].vertices, lp.vertices[0]) {
                return Err(GeometryError::Disconnected { loop_index: li });
            }
            for (lj, other) in loops.iter().enumerate().skip(1) {
                if lj != li && winding_contains(&other.vertices, lp.vertices[0]) {
                    return Err(GeometryError::Disconnected { loop_index: li });
                }
            }
        }

        let edges = loops
            .iter()
            .enumerate()
            .flat_map(|(li, lp)| {
                (0..lp.len()).map(move |k| {
                    let (a, b) = lp.edge(k);
                    Edge {
                        id: EdgeId {
                            loop_index: li,
                            edge: k,
                        },
                        a,
                        b,
                        bc: lp.bc[k],
                    }
                })
            })
            .collect();
        Ok(Self { loops, edges, diameter })
    }

    /// Axis-aligned rectangle `[0, lx] × [0, ly]` with one condition on every edge.
    pub fn rectangle(lx: f64, ly: f64, bc: Bc) -> Result<Self, GeometryError> {
        let vertices = alloc::vec![
            Point::new(0.0, 0.0),
            Point::new(lx, 0.0),
            Point::new(lx, ly),
            Point::new(0.0, ly),
        ];
        Self::new(alloc::vec![BoundaryLoop::new(vertices, alloc::vec![bc; 4])])
    }

    /// The L-shape `[0,2]² \ (1,2]²` with one condition on every edge.
    pub fn l_shape(bc: Bc) -> Result<Self, GeometryError> {
        let vertices = [(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)]
            .into_iter()
            .map(Point::from)
            .collect();
        Self::new(alloc::vec![BoundaryLoop::new(vertices, alloc::vec![bc; 6])])
    }

    /// A wedge of opening `theta0` with its apex at the origin and its
    /// bisector along the positive x-axis, closed by a polygonal arc of
    /// `arc_segments` chords on the circle of radius `radius`.
    ///
    /// Edge 0 is the lower side (angle `-θ₀/2`), the last edge is the upper
    /// side (angle `+θ₀/2`); the arc edges in between get `arc_bc`.
    pub fn sector(
        theta0: f64,
        radius: f64,
        arc_segments: usize,
        upper: Bc,
        lower: Bc,
        arc_bc: Bc,
    ) -> Result<Self, GeometryError> {
        let n = arc_segments.max(1);
        let mut vertices = Vec::with_capacity(n + 2);
        vertices.push(Point::ORIGIN);
        for j in 0..=n {
            let t = -0.5 * theta0 + theta0 * j as f64 / n as f64;
            vertices.push(Point::polar(t) * radius);
        }
        let mut bc = alloc::vec![arc_bc; vertices.len()];
        bc[0] = lower;
        *bc.last_mut().unwrap() = upper;
        Self::new(alloc::vec![BoundaryLoop::new(vertices, bc)])
    }

    pub fn loops(&self) -> &[BoundaryLoop] {
        &self.loops
    }

    /// All boundary edges, loop by loop.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Index of `id` in [`Self::edges`].
    pub fn edge_index(&self, id: EdgeId) -> usize {
        self.loops[..id.loop_index].iter().map(BoundaryLoop::len).sum::<usize>() + id.edge
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[self.edge_index(id)]
    }

    pub fn vertex(&self, id: VertexId) -> Point {
        self.loops[id.loop_index].vertices[id.vertex]
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.loops.iter().enumerate().flat_map(|(li, lp)| {
            (0..lp.len()).map(move |k| VertexId {
                loop_index: li,
                vertex: k,
            })
        })
    }

    /// Largest distance between two outer-loop vertices.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Width of the on-boundary band.
    pub fn tol(&self) -> f64 {
        GEOM_TOL_REL * self.diameter
    }

    pub fn area(&self) -> f64 {
        self.loops.iter().map(BoundaryLoop::signed_area).sum()
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.loops[0].vertices {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    /// Interior angle at a vertex, measured through Ω, in `(0, 2π)`.
    pub fn interior_angle(&self, id: VertexId) -> f64 {
        interior_angle(&self.loops[id.loop_index].vertices, id.vertex)
    }

    /// Distance from `p` to the whole boundary.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.edges
            .iter()
            .map(|e| e.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Interior / boundary / exterior with a `tol_geom` band around ∂Ω.
    pub fn contains(&self, p: Point) -> Membership {
        if self.boundary_distance(p) <= self.tol() {
            return Membership::Boundary;
        }
        let inside = self.loops.iter().filter(|lp| crossing_parity(&lp.vertices, p)).count() % 2 == 1;
        if inside {
            Membership::Interior
        } else {
            Membership::Exterior
        }
    }

    /// Strict interior test without the boundary band (even-odd rule).
    pub fn contains_strict(&self, p: Point) -> bool {
        self.loops.iter().filter(|lp| crossing_parity(&lp.vertices, p)).count() % 2 == 1
    }

    pub fn classify_point(&self, p: Point) -> Result<PointClass, GeometryError> {
        if self.contains(p) == Membership::Exterior {
            return Err(GeometryError::OutsideDomain { x: p.x, y: p.y });
        }
        let tol = self.tol();
        let nearest_vertex = self
            .vertex_ids()
            .map(|id| (id, self.vertex(id).dist(p)))
            .filter(|(_, d)| *d <= tol)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((vertex, _)) = nearest_vertex {
            let theta0 = self.interior_angle(vertex);
            return Ok(if (theta0 - PI).abs() <= FLAT_ANGLE_TOL {
                PointClass::EdgeInterior {
                    edge: EdgeId {
                        loop_index: vertex.loop_index,
                        edge: vertex.vertex,
                    },
                }
            } else if theta0 < PI {
                PointClass::ConvexCorner { vertex, theta0 }
            } else {
                PointClass::ConcaveCorner { vertex, theta0 }
            });
        }
        let nearest_edge = self
            .edges
            .iter()
            .map(|e| (e.id, e.distance_to(p)))
            .filter(|(_, d)| *d <= tol)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        Ok(match nearest_edge {
            Some((edge, _)) => PointClass::EdgeInterior { edge },
            None => PointClass::Interior,
        })
    }

    /// Distance from `p` to the nearest boundary face that does not contain `p`.
    ///
    /// Faces through `p` (the face itself for a face point, both incident edges
    /// at a corner) are adjacent; an interior point has no adjacent faces.
    pub fn nonadjacent_distance(&self, p: Point) -> Result<f64, GeometryError> {
        if self.contains(p) == Membership::Exterior {
            return Err(GeometryError::OutsideDomain { x: p.x, y: p.y });
        }
        let tol = self.tol();
        let d = self
            .edges
            .iter()
            .map(|e| e.distance_to(p))
            .filter(|d| *d > tol)
            .fold(f64::INFINITY, f64::min);
        if d.is_finite() {
            Ok(d)
        } else {
            Err(GeometryError::NoNonAdjacentFace)
        }
    }

    /// Edges passing through `p` (within `tol_geom`).
    pub fn edges_through(&self, p: Point) -> Vec<EdgeId> {
        let tol = self.tol();
        self.edges
            .iter()
            .filter(|e| e.distance_to(p) <= tol)
            .map(|e| e.id)
            .collect()
    }

    /// Upper and lower frames at a corner vertex.
    pub fn corner_frames(&self, vertex: VertexId) -> Result<CornerFrames, GeometryError> {
        let theta0 = self.interior_angle(vertex);
        if (theta0 - PI).abs() <= FLAT_ANGLE_TOL {
            return Err(GeometryError::NotACorner {
                loop_index: vertex.loop_index,
                vertex: vertex.vertex,
            });
        }
        Ok(self.vertex_frames(vertex, theta0))
    }

    /// Frames at any boundary point, including face points where `θ₀ = π`.
    ///
    /// A face point is split into an upper half (`F₁`) and a lower half (`F₂`)
    /// of the same edge.
    pub fn boundary_frames(&self, p: Point) -> Result<CornerFrames, GeometryError> {
        match self.classify_point(p)? {
            PointClass::Interior => Err(GeometryError::NotOnBoundary { x: p.x, y: p.y }),
            PointClass::ConvexCorner { vertex, theta0 } | PointClass::ConcaveCorner { vertex, theta0 } => {
                Ok(self.vertex_frames(vertex, theta0))
            }
            PointClass::EdgeInterior { edge } => {
                let tol = self.tol();
                if let Some(vertex) = self.vertex_ids().find(|v| self.vertex(*v).dist(p) <= tol) {
                    return Ok(self.vertex_frames(vertex, self.interior_angle(vertex)));
                }
                let e = self.edge(edge);
                let t = e.b - e.a;
                // Ω lies to the left, so the inward normal is the bisector.
                let motion = RigidMotion::new(p, t.perp().angle());
                Ok(CornerFrames::new(PI, motion, edge, edge))
            }
        }
    }

    fn vertex_frames(&self, vertex: VertexId, theta0: f64) -> CornerFrames {
        let lp = &self.loops[vertex.loop_index];
        let m = lp.len();
        let k = vertex.vertex;
        let p = lp.vertices[k];
        let outgoing = lp.vertices[(k + 1) % m] - p;
        let bisector = outgoing.angle() + 0.5 * theta0;
        let upper = EdgeId {
            loop_index: vertex.loop_index,
            edge: (k + m - 1) % m,
        };
        let lower = EdgeId {
            loop_index: vertex.loop_index,
            edge: k,
        };
        CornerFrames::new(theta0, RigidMotion::new(p, bisector), upper, lower)
    }
}

fn interior_angle(vertices: &[Point], k: usize) -> f64 {
    let m = vertices.len();
    let prev = vertices[(k + m - 1) % m];
    let cur = vertices[k];
    let next = vertices[(k + 1) % m];
    let e_in = cur - prev;
    let e_out = next - cur;
    let turn = e_in.cross(e_out).atan2(e_in.dot(e_out));
    PI - turn
}

fn validate_loop(li: usize, lp: &BoundaryLoop, tol: f64) -> Result<(), GeometryError> {
    let m = lp.len();
    for k in 0..m {
        let (a, b) = lp.edge(k);
        if a.dist(b) <= tol {
            return Err(GeometryError::DegenerateEdge {
                loop_index: li,
                edge: k,
            });
        }
    }
    for k in 0..m {
        let theta = interior_angle(&lp.vertices, k);
        if theta <= FLAT_ANGLE_TOL || theta >= TAU - FLAT_ANGLE_TOL {
            return Err(GeometryError::DegenerateCorner {
                loop_index: li,
                vertex: k,
            });
        }
    }
    for i in 0..m {
        let (a, b) = lp.edge(i);
        for j in (i + 1)..m {
            let adjacent = j == i + 1 || (i == 0 && j == m - 1);
            if adjacent {
                continue;
            }
            let (c, d) = lp.edge(j);
            if segment_segment_distance(a, b, c, d) <= tol {
                return Err(GeometryError::SelfIntersection {
                    loop_index: li,
                    edge_a: i,
                    edge_b: j,
                });
            }
        }
    }
    Ok(())
}

/// Ray-crossing parity for a closed polyline.
fn crossing_parity(vertices: &[Point], p: Point) -> bool {
    let m = vertices.len();
    let mut inside = false;
    for k in 0..m {
        let a = vertices[k];
        let b = vertices[(k + 1) % m];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if x > p.x {
                inside = !inside;
            }
        }
    }
    inside
}

fn winding_contains(vertices: &[Point], p: Point) -> bool {
    crossing_parity(vertices, p)
}

#[cfg(test)]
mod tests;
