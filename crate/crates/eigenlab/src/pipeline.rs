//! The mesh → solve → analyze pipeline over a cached output directory.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use eigenlab_core::analysis::{MassProfile, ProfileSetup};
use eigenlab_core::discretize::{assemble, triangulate};
use eigenlab_core::eigensolve::solve_modes;
use eigenlab_core::{
    AnalysisError, Bc, DiscreteMode, GeometryError, Mesh, MeshError, PolygonDomain, SolveError, SolveOptions,
};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cache::{hex, sha256, write_atomic, Hash, MeshFile, MeshKey, ModeFile, ModeKey};
use crate::config::{CachePolicy, ConfigError, RunConfig};
use crate::polygon_file::{read_polygon, PolygonFileError, PolygonSpec};
use crate::report::{profile_csv, profile_svg, top_half_checks, write_file, WindowCheck};
use crate::suites::{self, Suite, SuiteReport};

pub const MESH_FILE: &str = "mesh.bin";
pub const MODE_FILE: &str = "modes.bin";
pub const SUMMARY_FILE: &str = "summary.json";
pub const ORACLE_FILE: &str = "oracle.csv";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Polygon(#[from] PolygonFileError),
    #[error("meshing failed: {0}")]
    Mesh(#[from] MeshError),
    #[error("eigensolver failed: {0}")]
    Solve(#[from] SolveError),
    #[error("analysis failed: {0}")]
    Analysis(#[from] AnalysisError),
    #[error("no closed-form spectrum is known for this polygon")]
    NoClosedForm,
    #[error("output directory {0} is locked by another run")]
    Locked(PathBuf),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("suite {suite} failed {failed} of {total} checks")]
    VerifyFailed {
        suite: &'static str,
        failed: usize,
        total: usize,
    },
}

impl PipelineError {
    /// Process exit status for the error.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 64,
            PipelineError::Polygon(_) => 2,
            PipelineError::Mesh(_) => 3,
            PipelineError::Solve(_) => 4,
            PipelineError::Analysis(_) => 5,
            PipelineError::NoClosedForm => 5,
            PipelineError::Locked(_) => 75,
            PipelineError::Io(_) => 74,
            PipelineError::VerifyFailed { .. } => 1,
        }
    }
}

/// Whether a cache was reused or rebuilt.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Freshness {
    Reused,
    Built,
}

pub struct Polygon {
    pub spec: PolygonSpec,
    pub domain: PolygonDomain,
    pub hash: Hash,
}

pub fn load_polygon(cfg: &RunConfig) -> Result<Polygon, PipelineError> {
    cfg.validate()?;
    let (spec, domain) = read_polygon(&cfg.polygon)?;
    let hash = spec.hash();
    Ok(Polygon { spec, domain, hash })
}

pub struct MeshStage {
    pub polygon: Polygon,
    pub mesh: Arc<Mesh>,
    pub hash: Hash,
    pub freshness: Freshness,
    pub path: PathBuf,
}

fn read_cached<T>(path: &Path, decode: impl Fn(&[u8]) -> Result<T, crate::cache::CacheError>) -> Option<(T, Hash)> {
    let bytes = std::fs::read(path).ok()?;
    let value = decode(&bytes).ok()?;
    Some((value, sha256(&bytes)))
}

/// Loads the mesh cache or rebuilds it when the polygon, size or grading changed.
pub fn ensure_mesh(cfg: &RunConfig) -> Result<MeshStage, PipelineError> {
    let polygon = load_polygon(cfg)?;
    std::fs::create_dir_all(&cfg.out)?;
    let key = MeshKey {
        polygon: polygon.hash,
        target_h: cfg.target_h,
        graded: cfg.graded,
    };
    let path = cfg.out.join(MESH_FILE);
    if cfg.cache == CachePolicy::Use {
        if let Some((file, hash)) = read_cached(&path, MeshFile::decode) {
            if file.key == key {
                return Ok(MeshStage {
                    polygon,
                    mesh: Arc::new(file.mesh),
                    hash,
                    freshness: Freshness::Reused,
                    path,
                });
            }
        }
    }
    let mesh = triangulate(&polygon.domain, cfg.target_h, cfg.graded)?;
    let file = MeshFile { key, mesh };
    let bytes = file.encode();
    write_atomic(&path, &bytes)?;
    Ok(MeshStage {
        polygon,
        mesh: Arc::new(file.mesh),
        hash: sha256(&bytes),
        freshness: Freshness::Built,
        path,
    })
}

pub struct ModeStage {
    pub mesh: MeshStage,
    pub file: ModeFile,
    pub modes: Vec<DiscreteMode>,
    pub freshness: Freshness,
    pub path: PathBuf,
}

/// Loads the mode cache or re-solves when the mesh hash or solver settings changed.
pub fn ensure_modes(cfg: &RunConfig) -> Result<ModeStage, PipelineError> {
    let mesh = ensure_mesh(cfg)?;
    let key = ModeKey {
        mesh: mesh.hash,
        order: cfg.order,
        n: cfg.n_modes,
        tol: cfg.tol,
    };
    let path = cfg.out.join(MODE_FILE);
    if cfg.cache == CachePolicy::Use && mesh.freshness == Freshness::Reused {
        if let Some((file, _)) = read_cached(&path, ModeFile::decode) {
            if file.key == key {
                if let Ok(modes) = file.modes(mesh.mesh.clone()) {
                    return Ok(ModeStage {
                        mesh,
                        file,
                        modes,
                        freshness: Freshness::Reused,
                        path,
                    });
                }
            }
        }
    }
    let asm = assemble(mesh.mesh.clone(), cfg.order)?;
    let spectrum = solve_modes(&asm, &SolveOptions::new(cfg.n_modes).tol(cfg.tol))?;
    let file = ModeFile {
        key,
        shift: spectrum.shift,
        lambda_sq: spectrum.lambda_sq(),
        residuals: spectrum.residuals.clone(),
        coefficients: spectrum.modes.iter().map(|m| m.coefficients().to_vec()).collect(),
    };
    write_atomic(&path, &file.encode())?;
    Ok(ModeStage {
        mesh,
        file,
        modes: spectrum.modes,
        freshness: Freshness::Built,
        path,
    })
}

/// Disc-mass profile of every mode at one point, rows computed in parallel.
pub fn parallel_profile(
    modes: &[DiscreteMode],
    domain: &PolygonDomain,
    p0: eigenlab_core::Point,
    alphas: &[f64],
) -> Result<MassProfile, AnalysisError> {
    let mut setup = ProfileSetup::new(domain, p0, alphas)?;
    if let Some(first) = modes.first() {
        setup = setup.with_mesh_of(first);
    }
    let rows: Vec<Vec<_>> = modes
        .par_iter()
        .enumerate()
        .map(|(i, m)| setup.rows(domain, i, m))
        .collect::<Result<_, _>>()?;
    Ok(MassProfile::from_rows(rows.into_iter().flatten().collect()))
}

#[derive(Clone, Debug, Serialize)]
pub struct PointSummary {
    pub p0: [f64; 2],
    pub class: String,
    pub theta0: f64,
    pub d: f64,
    pub csv: String,
    pub svg: String,
    pub checks: Vec<WindowCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeSummary {
    pub polygon_sha256: String,
    pub mesh_sha256: String,
    pub order: u32,
    pub n_modes: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub points: Vec<PointSummary>,
    pub passed: bool,
}

pub struct AnalyzeOutput {
    pub summary: AnalyzeSummary,
    pub profiles: Vec<MassProfile>,
    pub files: Vec<PathBuf>,
}

/// Profiles at every configured point with CSV, SVG and a JSON summary.
pub fn cmd_analyze(cfg: &RunConfig) -> Result<AnalyzeOutput, PipelineError> {
    if cfg.points.is_empty() {
        return Err(ConfigError::NoPoints.into());
    }
    let stage = ensure_modes(cfg)?;
    let domain = &stage.mesh.polygon.domain;
    let mut points = Vec::new();
    let mut profiles = Vec::new();
    let mut files = vec![stage.mesh.path.clone(), stage.path.clone()];
    for (k, &p0) in cfg.points.iter().enumerate() {
        let profile = parallel_profile(&stage.modes, domain, p0, &cfg.alphas)?;
        let class = domain.classify_point(p0).map_err(AnalysisError::from)?;
        let d = domain.nonadjacent_distance(p0).map_err(AnalysisError::from)?;
        let base = format!("profile-{k}");
        let csv_path = cfg.out.join(format!("{base}.csv"));
        let svg_path = cfg.out.join(format!("{base}.svg"));
        write_file(&csv_path, &profile_csv([&profile]))?;
        let title = format!("disc mass at ({}, {}), {}", p0.x, p0.y, class.label());
        write_file(&svg_path, profile_svg(&profile, &title).as_bytes())?;
        points.push(PointSummary {
            p0: [p0.x, p0.y],
            class: class.label().into(),
            theta0: class.theta0(),
            d,
            csv: format!("{base}.csv"),
            svg: format!("{base}.svg"),
            checks: top_half_checks(&profile, stage.modes.len()),
        });
        files.push(csv_path);
        files.push(svg_path);
        profiles.push(profile);
    }
    let lambdas: Vec<f64> = stage.modes.iter().map(DiscreteMode::lambda).collect();
    let summary = AnalyzeSummary {
        polygon_sha256: hex(&stage.mesh.polygon.hash),
        mesh_sha256: hex(&stage.mesh.hash),
        order: cfg.order.degree(),
        n_modes: stage.modes.len(),
        lambda_min: lambdas.first().copied().unwrap_or(f64::NAN),
        lambda_max: lambdas.last().copied().unwrap_or(f64::NAN),
        passed: points.iter().all(|p| p.checks.iter().all(|c| c.passed)),
        points,
    };
    let path = cfg.out.join(SUMMARY_FILE);
    write_file(&path, json(&summary).as_bytes())?;
    files.push(path);
    Ok(AnalyzeOutput {
        summary,
        profiles,
        files,
    })
}

pub fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("summaries always serialize");
    s.push('\n');
    s
}

/// Runs a suite and writes `verify-<suite>.json` (and `ledger.csv` for the ledger suite).
pub fn cmd_verify(suite: Suite, out: &Path) -> Result<(SuiteReport, Vec<PathBuf>), PipelineError> {
    std::fs::create_dir_all(out)?;
    let mut files = Vec::new();
    let report = if suite == Suite::Ledger {
        let family = suites::ledger_family(&suites::LEDGER_ORDERS)?;
        let labels: Vec<String> = family.iter().map(|(m, _)| format!("({m},{m})")).collect();
        let csv = crate::report::ledger_csv(labels.iter().map(String::as_str).zip(family.iter().map(|(_, l)| l)));
        let path = out.join("ledger.csv");
        write_file(&path, &csv)?;
        files.push(path);
        suites::ledger_report(&family)
    } else {
        suites::run(suite)?
    };
    let path = out.join(format!("verify-{}.json", suite.name()));
    write_file(&path, json(&report).as_bytes())?;
    files.push(path);
    Ok((report, files))
}

/// Closed-form `λ²` of the polygon, if it is a recognized shape.
pub fn closed_form_spectrum(domain: &PolygonDomain, n: usize) -> Option<Vec<f64>> {
    use std::f64::consts::PI;
    let [lp] = domain.loops() else { return None };
    let bc = lp.bc[0];
    if lp.bc.iter().any(|&b| b != bc) {
        return None;
    }
    let v = &lp.vertices;
    let mut values = Vec::new();
    let top = n as u32 + 1;
    if v.len() == 4 {
        let (lx, ly) = (v[2].x, v[2].y);
        let expected = [(0.0, 0.0), (lx, 0.0), (lx, ly), (0.0, ly)];
        if !(lx > 0.0 && ly > 0.0) || v.iter().zip(expected).any(|(p, (x, y))| p.x != x || p.y != y) {
            return None;
        }
        let start = if bc == Bc::Dirichlet { 1 } else { 0 };
        for m in start..=top {
            for k in start..=top {
                values.push(PI * PI * ((m * m) as f64 / (lx * lx) + (k * k) as f64 / (ly * ly)));
            }
        }
    } else if v.len() == 3 && bc == Bc::Dirichlet {
        let expected = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)];
        if v.iter().zip(expected).any(|(p, (x, y))| p.x != x || p.y != y) {
            return None;
        }
        for m in 2..=top + 1 {
            for k in 1..m {
                values.push(PI * PI * (m * m + k * k) as f64);
            }
        }
    } else {
        return None;
    }
    values.sort_by(f64::total_cmp);
    values.truncate(n);
    Some(values)
}

/// Compares the computed spectrum with the closed form and writes `oracle.csv`.
pub fn cmd_oracle(cfg: &RunConfig) -> Result<(f64, PathBuf), PipelineError> {
    let polygon = load_polygon(cfg)?;
    let exact = closed_form_spectrum(&polygon.domain, cfg.n_modes).ok_or(PipelineError::NoClosedForm)?;
    let stage = ensure_modes(cfg)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["mode_index", "exact_lambda_sq", "computed_lambda_sq", "relative_error"])
        .expect("in-memory csv");
    let mut worst: f64 = 0.0;
    for (i, (e, c)) in exact.iter().zip(&stage.file.lambda_sq).enumerate() {
        let rel = (c - e).abs() / e.abs().max(f64::MIN_POSITIVE);
        worst = worst.max(if *e == 0.0 { c.abs() } else { rel });
        w.serialize((i, e, c, rel)).expect("in-memory csv");
    }
    let path = cfg.out.join(ORACLE_FILE);
    write_file(&path, &w.into_inner().expect("in-memory csv"))?;
    Ok((worst, path))
}

impl From<GeometryError> for PipelineError {
    fn from(e: GeometryError) -> Self {
        PipelineError::Polygon(PolygonFileError::Geometry(e))
    }
}
