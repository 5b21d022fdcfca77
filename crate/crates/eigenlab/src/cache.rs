//! Versioned little-endian caches for meshes and eigenmodes.
//!
//! A mesh file records the hash of the polygon it came from; a mode file
//! records the hash of its mesh file. A changed upstream hash makes the
//! downstream file stale.

use std::path::Path;
use std::sync::Arc;

use eigenlab_core::discretize::{BoundaryEdge, CornerGrading, FemSpace};
use eigenlab_core::geometry::EdgeId;
use eigenlab_core::{Bc, DiscreteMode, ElementOrder, Mesh, Point};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const MESH_MAGIC: &[u8; 8] = b"EGLMESH\0";
pub const MODE_MAGIC: &[u8; 8] = b"EGLMODE\0";
pub const VERSION: u32 = 1;

pub type Hash = [u8; 32];

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a {0} cache file")]
    BadMagic(&'static str),
    #[error("cache version {0} is not supported")]
    Version(u32),
    #[error("cache file is truncated")]
    Truncated,
    #[error("cache file is corrupt: {0}")]
    Corrupt(String),
}

pub fn sha256(bytes: &[u8]) -> Hash {
    Sha256::digest(bytes).into()
}

pub fn hex(hash: &Hash) -> String {
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn bytes(&mut self, b: &[u8]) {
        self.0.extend_from_slice(b);
    }
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.bytes(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.bytes(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.bytes(&v.to_le_bytes());
    }
    fn len(&mut self, n: usize) {
        self.u64(n as u64);
    }
}

struct Reader<'a>(&'a [u8]);

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CacheError> {
        if self.0.len() < n {
            return Err(CacheError::Truncated);
        }
        let (head, tail) = self.0.split_at(n);
        self.0 = tail;
        Ok(head)
    }
    fn array<const N: usize>(&mut self) -> Result<[u8; N], CacheError> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }
    fn u8(&mut self) -> Result<u8, CacheError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32, CacheError> {
        Ok(u32::from_le_bytes(self.array()?))
    }
    fn u64(&mut self) -> Result<u64, CacheError> {
        Ok(u64::from_le_bytes(self.array()?))
    }
    fn f64(&mut self) -> Result<f64, CacheError> {
        Ok(f64::from_le_bytes(self.array()?))
    }
    /// A count whose items take at least `item` bytes each.
    fn len(&mut self, item: usize) -> Result<usize, CacheError> {
        let n = self.u64()?;
        if n.saturating_mul(item as u64) > self.0.len() as u64 {
            return Err(CacheError::Truncated);
        }
        Ok(n as usize)
    }
    fn header(&mut self, magic: &[u8; 8], what: &'static str) -> Result<(), CacheError> {
        if &self.array::<8>()? != magic {
            return Err(CacheError::BadMagic(what));
        }
        match self.u32()? {
            VERSION => Ok(()),
            v => Err(CacheError::Version(v)),
        }
    }
    fn finish(&self) -> Result<(), CacheError> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(CacheError::Corrupt(format!("{} trailing bytes", self.0.len())))
        }
    }
}

/// How a mesh was produced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshKey {
    pub polygon: Hash,
    pub target_h: f64,
    pub graded: bool,
}

#[derive(Clone, Debug)]
pub struct MeshFile {
    pub key: MeshKey,
    pub mesh: Mesh,
}

impl MeshFile {
    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.bytes(MESH_MAGIC);
        w.u32(VERSION);
        w.bytes(&self.key.polygon);
        w.f64(self.key.target_h);
        w.u8(self.key.graded as u8);
        let m = &self.mesh;
        w.f64(m.target_h());
        w.len(m.vertices().len());
        for p in m.vertices() {
            w.f64(p.x);
            w.f64(p.y);
        }
        w.len(m.triangles().len());
        for t in m.triangles() {
            t.iter().for_each(|&v| w.u32(v));
        }
        w.len(m.boundary_edges().len());
        for e in m.boundary_edges() {
            w.u32(e.triangle);
            w.u8(e.local);
            w.u32(e.edge.loop_index as u32);
            w.u32(e.edge.edge as u32);
            w.u8(matches!(e.bc, Bc::Neumann) as u8);
        }
        w.len(m.gradings().len());
        for g in m.gradings() {
            for v in [g.vertex.x, g.vertex.y, g.theta0, g.exponent, g.radius] {
                w.f64(v);
            }
        }
        w.0
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, CacheError> {
        let mut r = Reader(bytes);
        r.header(MESH_MAGIC, "mesh")?;
        let key = MeshKey {
            polygon: r.array()?,
            target_h: r.f64()?,
            graded: r.u8()? != 0,
        };
        let target_h = r.f64()?;
        let nv = r.len(16)?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            vertices.push(Point::new(r.f64()?, r.f64()?));
        }
        let nt = r.len(12)?;
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            triangles.push([r.u32()?, r.u32()?, r.u32()?]);
        }
        let nb = r.len(14)?;
        let mut boundary = Vec::with_capacity(nb);
        for _ in 0..nb {
            let triangle = r.u32()?;
            let local = r.u8()?;
            let edge = EdgeId {
                loop_index: r.u32()? as usize,
                edge: r.u32()? as usize,
            };
            let bc = if r.u8()? != 0 { Bc::Neumann } else { Bc::Dirichlet };
            boundary.push(BoundaryEdge {
                triangle,
                local,
                edge,
                bc,
            });
        }
        let ng = r.len(40)?;
        let mut gradings = Vec::with_capacity(ng);
        for _ in 0..ng {
            gradings.push(CornerGrading {
                vertex: Point::new(r.f64()?, r.f64()?),
                theta0: r.f64()?,
                exponent: r.f64()?,
                radius: r.f64()?,
            });
        }
        r.finish()?;
        let mesh = Mesh::from_parts(vertices, triangles, boundary, gradings, target_h)
            .map_err(|e| CacheError::Corrupt(e.to_string()))?;
        Ok(Self { key, mesh })
    }
}

/// How a mode set was produced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeKey {
    pub mesh: Hash,
    pub order: ElementOrder,
    pub n: usize,
    pub tol: f64,
}

#[derive(Clone, Debug)]
pub struct ModeFile {
    pub key: ModeKey,
    pub shift: f64,
    pub lambda_sq: Vec<f64>,
    pub residuals: Vec<f64>,
    /// One coefficient vector per mode over the free dofs.
    pub coefficients: Vec<Vec<f64>>,
}

impl ModeFile {
    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.bytes(MODE_MAGIC);
        w.u32(VERSION);
        w.bytes(&self.key.mesh);
        w.u8(self.key.order.degree() as u8);
        w.len(self.key.n);
        w.f64(self.key.tol);
        w.f64(self.shift);
        let dofs = self.coefficients.first().map_or(0, Vec::len);
        w.len(self.lambda_sq.len());
        w.len(dofs);
        self.lambda_sq.iter().for_each(|&v| w.f64(v));
        self.residuals.iter().for_each(|&v| w.f64(v));
        for c in &self.coefficients {
            c.iter().for_each(|&v| w.f64(v));
        }
        w.0
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, CacheError> {
        let mut r = Reader(bytes);
        r.header(MODE_MAGIC, "mode")?;
        let mesh = r.array()?;
        let order = ElementOrder::from_degree(r.u8()? as u32).map_err(|e| CacheError::Corrupt(e.to_string()))?;
        let n = r.u64()? as usize;
        let tol = r.f64()?;
        let shift = r.f64()?;
        let count = r.len(16)?;
        let dofs = r.u64()? as usize;
        if count.saturating_mul(dofs).saturating_mul(8) > bytes.len() {
            return Err(CacheError::Truncated);
        }
        let mut read_vec = |len: usize| -> Result<Vec<f64>, CacheError> { (0..len).map(|_| r.f64()).collect() };
        let lambda_sq = read_vec(count)?;
        let residuals = read_vec(count)?;
        let coefficients = (0..count).map(|_| read_vec(dofs)).collect::<Result<Vec<_>, _>>()?;
        r.finish()?;
        Ok(Self {
            key: ModeKey { mesh, order, n, tol },
            shift,
            lambda_sq,
            residuals,
            coefficients,
        })
    }

    /// Rebuilds the modes over `mesh`.
    pub fn modes(&self, mesh: Arc<Mesh>) -> Result<Vec<DiscreteMode>, CacheError> {
        let space = Arc::new(FemSpace::new(mesh, self.key.order).map_err(|e| CacheError::Corrupt(e.to_string()))?);
        self.lambda_sq
            .iter()
            .zip(&self.coefficients)
            .map(|(&l, c)| {
                DiscreteMode::new(space.clone(), c.clone(), l).map_err(|e| CacheError::Corrupt(e.to_string()))
            })
            .collect()
    }
}

/// Writes through a temporary sibling so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}
