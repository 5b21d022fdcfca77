use alloc::sync::Arc;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{barycentric, Mesh, MeshError, SparseSymMatrix};
use crate::geometry::{Bc, Point};
use crate::quadrature::{TriangleRule, TRI_DEGREE2, TRI_DEGREE4};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementOrder {
    P1,
    P2,
}

impl ElementOrder {
    pub fn from_degree(degree: u32) -> Result<Self, MeshError> {
        match degree {
            1 => Ok(Self::P1),
            2 => Ok(Self::P2),
            d => Err(MeshError::UnsupportedOrder(d)),
        }
    }

    pub fn degree(self) -> u32 {
        match self {
            Self::P1 => 1,
            Self::P2 => 2,
        }
    }

    /// Nodes per element.
    pub fn local_count(self) -> usize {
        match self {
            Self::P1 => 3,
            Self::P2 => 6,
        }
    }

    fn mass_rule(self) -> TriangleRule {
        match self {
            Self::P1 => TRI_DEGREE2,
            Self::P2 => TRI_DEGREE4,
        }
    }
}

/// Gradients of the barycentric coordinates on a triangle.
fn barycentric_gradients([a, b, c]: [Point; 3]) -> [Point; 3] {
    let det = (b - a).cross(c - a);
    let g1 = Point::new((c - a).y, -(c - a).x) * (1.0 / det);
    let g2 = Point::new(-(b - a).y, (b - a).x) * (1.0 / det);
    [-(g1 + g2), g1, g2]
}

/// Shape function values and gradients. P2 edge node `3 + i` sits on edge `(i, i+1)`.
fn shape(order: ElementOrder, l: [f64; 3], g: &[Point; 3]) -> ([f64; 6], [Point; 6]) {
    let mut v = [0.0; 6];
    let mut d = [Point::ORIGIN; 6];
    match order {
        ElementOrder::P1 => {
            v[..3].copy_from_slice(&l);
            d[..3].copy_from_slice(g);
        }
        ElementOrder::P2 => {
            for i in 0..3 {
                let j = (i + 1) % 3;
                v[i] = l[i] * (2.0 * l[i] - 1.0);
                d[i] = g[i] * (4.0 * l[i] - 1.0);
                v[3 + i] = 4.0 * l[i] * l[j];
                d[3 + i] = (g[i] * l[j] + g[j] * l[i]) * 4.0;
            }
        }
    }
    (v, d)
}

/// Element stiffness and mass matrices (row-major, `n × n` with `n` nodes per element).
pub fn element_matrices(corners: [Point; 3], order: ElementOrder) -> (Vec<f64>, Vec<f64>) {
    let n = order.local_count();
    let [a, b, c] = corners;
    let area = 0.5 * (b - a).cross(c - a);
    let g = barycentric_gradients(corners);
    let mut k = alloc::vec![0.0; n * n];
    let mut m = alloc::vec![0.0; n * n];
    // Gradients are at most linear, so the degree-2 rule is exact for stiffness.
    for (l, w) in TRI_DEGREE2.points.iter().zip(TRI_DEGREE2.weights) {
        let (_, d) = shape(order, *l, &g);
        for i in 0..n {
            for j in i..n {
                k[i * n + j] += w * area * d[i].dot(d[j]);
            }
        }
    }
    let rule = order.mass_rule();
    for (l, w) in rule.points.iter().zip(rule.weights) {
        let (v, _) = shape(order, *l, &g);
        for i in 0..n {
            for j in i..n {
                m[i * n + j] += w * area * v[i] * v[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            k[i * n + j] = k[j * n + i];
            m[i * n + j] = m[j * n + i];
        }
    }
    (k, m)
}

/// Node numbering and Dirichlet elimination for a P1 or P2 space on a mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct FemSpace {
    mesh: Arc<Mesh>,
    order: ElementOrder,
    nodes: Vec<Point>,
    element_nodes: Vec<[u32; 6]>,
    dof_of_node: Vec<u32>,
    node_of_dof: Vec<u32>,
}

impl FemSpace {
    pub fn new(mesh: Arc<Mesh>, order: ElementOrder) -> Result<Self, MeshError> {
        let mut nodes = mesh.vertices().to_vec();
        let mut element_nodes: Vec<[u32; 6]> = mesh
            .triangles()
            .iter()
            .map(|t| [t[0], t[1], t[2], NONE, NONE, NONE])
            .collect();
        if order == ElementOrder::P2 {
            let mut edges: Vec<(u32, u32, u32, u8)> = Vec::new();
            for (t, tri) in mesh.triangles().iter().enumerate() {
                for k in 0..3 {
                    let (a, b) = (tri[k], tri[(k + 1) % 3]);
                    edges.push((a.min(b), a.max(b), t as u32, k as u8));
                }
            }
            edges.sort_unstable();
            let mut last = None;
            for (a, b, t, k) in edges {
                if last != Some((a, b)) {
                    nodes.push(nodes[a as usize].midpoint(nodes[b as usize]));
                    last = Some((a, b));
                }
                element_nodes[t as usize][3 + k as usize] = (nodes.len() - 1) as u32;
            }
        }
        let mut dirichlet = alloc::vec![false; nodes.len()];
        for e in mesh.boundary_edges() {
            if e.bc != Bc::Dirichlet {
                continue;
            }
            let en = &element_nodes[e.triangle as usize];
            let k = e.local as usize;
            dirichlet[en[k] as usize] = true;
            dirichlet[en[(k + 1) % 3] as usize] = true;
            if order == ElementOrder::P2 {
                dirichlet[en[3 + k] as usize] = true;
            }
        }
        let mut dof_of_node = alloc::vec![NONE; nodes.len()];
        let mut node_of_dof = Vec::new();
        for (i, &d) in dirichlet.iter().enumerate() {
            if !d {
                dof_of_node[i] = node_of_dof.len() as u32;
                node_of_dof.push(i as u32);
            }
        }
        if node_of_dof.is_empty() {
            return Err(MeshError::EmptyDofSet);
        }
        Ok(Self {
            mesh,
            order,
            nodes,
            element_nodes,
            dof_of_node,
            node_of_dof,
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn order(&self) -> ElementOrder {
        self.order
    }

    /// Free degrees of freedom.
    pub fn dof_count(&self) -> usize {
        self.node_of_dof.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    /// Dof index of a node, `None` for eliminated Dirichlet nodes.
    pub fn dof_of_node(&self, node: usize) -> Option<usize> {
        let d = self.dof_of_node[node];
        (d != NONE).then_some(d as usize)
    }

    pub fn node_of_dof(&self, dof: usize) -> usize {
        self.node_of_dof[dof] as usize
    }

    pub fn dof_position(&self, dof: usize) -> Point {
        self.nodes[self.node_of_dof[dof] as usize]
    }

    pub fn element_nodes(&self, t: usize) -> &[u32] {
        &self.element_nodes[t][..self.order.local_count()]
    }

    /// Nodal interpolant of `f` on the free dofs.
    pub fn interpolate(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        self.node_of_dof.iter().map(|&n| f(self.nodes[n as usize])).collect()
    }

    /// Value and gradient of the field with free-dof coefficients `c` inside triangle `t`.
    pub fn eval_in(&self, c: &[f64], t: usize, l: [f64; 3]) -> (f64, Point) {
        let g = barycentric_gradients(self.mesh.corners(t));
        let (v, d) = shape(self.order, l, &g);
        let mut val = 0.0;
        let mut grad = Point::ORIGIN;
        for (k, &node) in self.element_nodes(t).iter().enumerate() {
            let dof = self.dof_of_node[node as usize];
            if dof != NONE {
                let ck = c[dof as usize];
                val += ck * v[k];
                grad += d[k] * ck;
            }
        }
        (val, grad)
    }

    /// Value and gradient at `p`, taken from the owning element.
    pub fn eval(&self, c: &[f64], p: Point) -> Result<(f64, Point), MeshError> {
        let (t, l) = self.mesh.locate(p).ok_or(MeshError::OutsideMesh { x: p.x, y: p.y })?;
        Ok(self.eval_in(c, t, l))
    }

    /// Barycentric coordinates of `p` in triangle `t` (no containment check).
    pub fn barycentric(&self, t: usize, p: Point) -> [f64; 3] {
        barycentric(p, self.mesh.corners(t))
    }
}

/// Stiffness and mass matrices over the free dofs of a space.
#[derive(Clone, Debug)]
pub struct Assembly {
    pub space: Arc<FemSpace>,
    pub stiffness: SparseSymMatrix,
    pub mass: SparseSymMatrix,
}

/// Assembles `K` (∫∇φᵢ·∇φⱼ) and `M` (∫φᵢφⱼ) with Dirichlet nodes eliminated.
pub fn assemble(mesh: Arc<Mesh>, order: ElementOrder) -> Result<Assembly, MeshError> {
    let space = Arc::new(FemSpace::new(mesh, order)?);
    let n = order.local_count();
    let mut kt = Vec::with_capacity(space.mesh.triangles().len() * n * n / 2);
    let mut mt = Vec::with_capacity(kt.capacity());
    for t in 0..space.mesh.triangles().len() {
        let (k, m) = element_matrices(space.mesh.corners(t), order);
        let en = space.element_nodes(t);
        for i in 0..n {
            let di = space.dof_of_node[en[i] as usize];
            if di == NONE {
                continue;
            }
            for j in 0..n {
                let dj = space.dof_of_node[en[j] as usize];
                if dj == NONE || dj < di {
                    continue;
                }
                kt.push((di, dj, k[i * n + j]));
                mt.push((di, dj, m[i * n + j]));
            }
        }
    }
    let dim = space.dof_count();
    Ok(Assembly {
        stiffness: SparseSymMatrix::from_triplets(dim, kt),
        mass: SparseSymMatrix::from_triplets(dim, mt),
        space,
    })
}

/// A discrete eigenfunction: coefficients over the free dofs and its frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMode {
    space: Arc<FemSpace>,
    coefficients: Vec<f64>,
    lambda_sq: f64,
}

impl DiscreteMode {
    pub fn new(space: Arc<FemSpace>, coefficients: Vec<f64>, lambda_sq: f64) -> Result<Self, MeshError> {
        if coefficients.len() != space.dof_count() {
            return Err(MeshError::CoefficientLength {
                got: coefficients.len(),
                expected: space.dof_count(),
            });
        }
        Ok(Self {
            space,
            coefficients,
            lambda_sq,
        })
    }

    /// Rescales so that `cᵀ M c = 1` and returns the original norm.
    pub fn normalize(&mut self, mass: &SparseSymMatrix) -> f64 {
        let norm = mass.inner(&self.coefficients, &self.coefficients).sqrt();
        if norm > 0.0 {
            self.coefficients.iter_mut().for_each(|c| *c /= norm);
        }
        norm
    }

    pub fn space(&self) -> &Arc<FemSpace> {
        &self.space
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        self.space.mesh()
    }

    pub fn order(&self) -> ElementOrder {
        self.space.order()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn lambda_sq(&self) -> f64 {
        self.lambda_sq
    }

    pub fn lambda(&self) -> f64 {
        self.lambda_sq.max(0.0).sqrt()
    }

    /// Semiclassical parameter `1/λ` (infinite for a constant mode).
    pub fn h(&self) -> f64 {
        1.0 / self.lambda()
    }

    /// Values at every node, zero on Dirichlet nodes.
    pub fn nodal_values(&self) -> Vec<f64> {
        (0..self.space.node_count())
            .map(|n| self.space.dof_of_node(n).map_or(0.0, |d| self.coefficients[d]))
            .collect()
    }

    pub fn evaluate(&self, p: Point) -> Result<(f64, Point), MeshError> {
        self.space.eval(&self.coefficients, p)
    }

    pub fn evaluate_in(&self, t: usize, l: [f64; 3]) -> (f64, Point) {
        self.space.eval_in(&self.coefficients, t, l)
    }

    /// Flips the sign so the largest-magnitude coefficient is positive.
    pub fn canonical_sign(mut self) -> Self {
        let k = self
            .coefficients
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(k, _)| k);
        if let Some(k) = k {
            if self.coefficients[k] < 0.0 {
                self.coefficients.iter_mut().for_each(|c| *c = -*c);
            }
        }
        self
    }
}
