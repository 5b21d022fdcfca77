//! Numerical laboratory for Laplace eigenfunctions on planar polygons.
//!
//! The crate is `no_std` (with `alloc`) and carries the algorithmic pieces:
//!
//! * [`geometry`]: polygonal domains with per-edge Dirichlet/Neumann tags,
//!   point classification, non-adjacent face distances and corner frames.
//! * [`cutoff`]: smooth radial cutoffs with analytic first and second derivatives.
//! * [`discretize`]: conforming Delaunay meshing with quality refinement and
//!   concave-corner grading, P1/P2 stiffness and mass assembly.
//! * [`eigensolve`]: shift-invert Lanczos for `K u = λ² M u`.
//! * [`oracles`]: closed-form eigenfunctions, sector harmonics, Bessel
//!   functions of fractional order and exact polynomial commutator checks.
//! * [`analysis`]: local L² masses, the commutator pairing, boundary terms and
//!   the interior inequality chain.
//!
//! File formats, caches and the command line live in the companion `eigenlab` crate.

#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod cutoff;
pub mod discretize;
pub mod eigensolve;
pub mod geometry;
pub mod oracles;
pub mod quadrature;
pub mod rng;

pub use analysis::{AnalysisError, Eigenmode, Region};
pub use cutoff::{CutoffError, CutoffFunction, RadialProfile};
pub use discretize::{DiscreteMode, ElementOrder, FemSpace, Mesh, MeshError, SparseSymMatrix};
pub use eigensolve::{EigenSpectrum, SolveError, SolveOptions};
pub use geometry::{Bc, GeometryError, Point, PointClass, PolygonDomain};
pub use oracles::{AnalyticMode, OracleError};
