//! Run configuration and the small value grammars of the command line.

use std::path::PathBuf;

use eigenlab_core::{ElementOrder, Point};
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("α grid {0:?} must look like A:B:STEP or a single value")]
    AlphaSyntax(String),
    #[error("α grid {0:?} must lie in (0, 1) with a positive step")]
    AlphaRange(String),
    #[error("point {0:?} must look like X,Y with finite coordinates")]
    PointSyntax(String),
    #[error("target size {0} must be positive and finite")]
    TargetSize(f64),
    #[error("at least one mode must be requested")]
    NoModes,
    #[error("tolerance {0} must be positive and finite")]
    Tolerance(f64),
    #[error("a polygon file is required (--polygon or EIGENLAB_POLYGON)")]
    MissingPolygon,
    #[error("at least one --point is required")]
    NoPoints,
    #[error("verify needs --suite (cutoff, commutator, lemma-zero, ledger or oracle)")]
    MissingSuite,
    #[error("polygon file {0} does not exist")]
    PolygonNotFound(PathBuf),
}

/// Parses `A:B:STEP` (inclusive of `B` up to rounding) or a single value.
pub fn parse_alpha_grid(s: &str) -> Result<Vec<f64>, ConfigError> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| ConfigError::AlphaSyntax(s.into()))?;
    let grid = match nums[..] {
        [a] => vec![a],
        [a, b, step] => {
            if !(step > 0.0) || !(b >= a) || !step.is_finite() {
                return Err(ConfigError::AlphaRange(s.into()));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize + 1;
            (0..n).map(|k| round12(a + k as f64 * step)).collect()
        }
        _ => return Err(ConfigError::AlphaSyntax(s.into())),
    };
    if grid.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
        return Err(ConfigError::AlphaRange(s.into()));
    }
    Ok(grid)
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

pub fn parse_point(s: &str) -> Result<Point, ConfigError> {
    let err = || ConfigError::PointSyntax(s.into());
    let (x, y) = s.split_once(',').ok_or_else(err)?;
    let x: f64 = x.trim().parse().map_err(|_| err())?;
    let y: f64 = y.trim().parse().map_err(|_| err())?;
    if !(x.is_finite() && y.is_finite()) {
        return Err(err());
    }
    Ok(Point::new(x, y))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum CachePolicy {
    /// Reuse caches whose upstream hashes match.
    Use,
    /// Recompute and overwrite every cache.
    Refresh,
}

/// Everything the pipelines need.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub polygon: PathBuf,
    pub target_h: f64,
    pub order: ElementOrder,
    pub n_modes: usize,
    pub points: Vec<Point>,
    pub alphas: Vec<f64>,
    pub tol: f64,
    pub out: PathBuf,
    pub cache: CachePolicy,
    /// Grade the mesh toward concave corners.
    pub graded: bool,
}

impl RunConfig {
    pub fn new(polygon: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        Self {
            polygon: polygon.into(),
            target_h: 0.05,
            order: ElementOrder::P2,
            n_modes: 20,
            points: Vec::new(),
            alphas: vec![0.25, 0.5, 0.75],
            tol: 1e-8,
            out: out.into(),
            cache: CachePolicy::Use,
            graded: true,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.target_h > 0.0 && self.target_h.is_finite()) {
            return Err(ConfigError::TargetSize(self.target_h));
        }
        if self.n_modes == 0 {
            return Err(ConfigError::NoModes);
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(ConfigError::Tolerance(self.tol));
        }
        if self.alphas.is_empty() || self.alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return Err(ConfigError::AlphaRange(format!("{:?}", self.alphas)));
        }
        if !self.polygon.is_file() {
            return Err(ConfigError::PolygonNotFound(self.polygon.clone()));
        }
        Ok(())
    }
}
