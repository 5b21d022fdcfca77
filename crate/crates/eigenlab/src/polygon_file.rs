//! JSON polygon files: `{"loops": [{"vertices": [[x, y], ...], "bc": ["dirichlet", ...]}]}`.
//!
//! Edge `i` of a loop joins vertices `i` and `i + 1 (mod M)` and carries `bc[i]`.
//! The first loop is the counterclockwise outer boundary, later loops are clockwise holes.

use std::path::Path;

use eigenlab_core::geometry::BoundaryLoop;
use eigenlab_core::{Bc, GeometryError, Point, PolygonDomain};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcName {
    Dirichlet,
    Neumann,
}

impl From<BcName> for Bc {
    fn from(b: BcName) -> Bc {
        match b {
            BcName::Dirichlet => Bc::Dirichlet,
            BcName::Neumann => Bc::Neumann,
        }
    }
}

impl From<Bc> for BcName {
    fn from(b: Bc) -> BcName {
        match b {
            Bc::Dirichlet => BcName::Dirichlet,
            Bc::Neumann => BcName::Neumann,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopSpec {
    pub vertices: Vec<[f64; 2]>,
    pub bc: Vec<BcName>,
}

/// The file contents before validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonSpec {
    pub loops: Vec<LoopSpec>,
}

#[derive(Debug, Error)]
pub enum PolygonFileError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed polygon file: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid polygon: {0}")]
    Geometry(#[from] GeometryError),
}

impl PolygonSpec {
    pub fn parse(text: &str) -> Result<Self, PolygonFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self, PolygonFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| PolygonFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn from_domain(domain: &PolygonDomain) -> Self {
        Self {
            loops: domain
                .loops()
                .iter()
                .map(|l| LoopSpec {
                    vertices: l.vertices.iter().map(|p| [p.x, p.y]).collect(),
                    bc: l.bc.iter().map(|&b| b.into()).collect(),
                })
                .collect(),
        }
    }

    pub fn to_domain(&self) -> Result<PolygonDomain, GeometryError> {
        let loops = self
            .loops
            .iter()
            .map(|l| {
                BoundaryLoop::new(
                    l.vertices.iter().map(|&[x, y]| Point::new(x, y)).collect(),
                    l.bc.iter().map(|&b| b.into()).collect(),
                )
            })
            .collect();
        PolygonDomain::new(loops)
    }

    /// Compact JSON with a fixed field order.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("polygon specs always serialize")
    }

    /// SHA-256 of the canonical JSON, so formatting changes keep caches valid.
    pub fn hash(&self) -> [u8; 32] {
        Sha256::digest(self.canonical_json().as_bytes()).into()
    }
}

/// Parses and validates a polygon file.
pub fn read_polygon(path: &Path) -> Result<(PolygonSpec, PolygonDomain), PolygonFileError> {
    let spec = PolygonSpec::read(path)?;
    let domain = spec.to_domain()?;
    Ok((spec, domain))
}
