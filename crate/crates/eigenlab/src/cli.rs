//! Command-line definitions. Every flag can also come from an `EIGENLAB_*`
//! environment variable; an explicit flag wins.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use eigenlab_core::ElementOrder;
use serde_json::json;

use crate::config::{parse_alpha_grid, parse_point, CachePolicy, ConfigError, RunConfig};
use crate::lock::DirLock;
use crate::pipeline::{self, PipelineError};
use crate::suites::Suite;

#[derive(Debug, Parser)]
#[command(name = "eigenlab", version, about = "Laplace eigenfunction experiments on polygons")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub args: RunArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Triangulate the polygon and write the mesh cache.
    Mesh,
    /// Assemble and solve for the lowest modes, writing the mode cache.
    Solve,
    /// Disc-mass profiles at each point against the bound.
    Analyze,
    /// Run a property suite.
    Verify,
    /// Compare the computed spectrum with a closed form.
    Oracle,
}

#[derive(Clone, Debug, clap::Args)]
pub struct RunArgs {
    /// Polygon file (JSON).
    #[arg(long, global = true, env = "EIGENLAB_POLYGON")]
    pub polygon: Option<PathBuf>,
    /// Target element size.
    #[arg(long, global = true, env = "EIGENLAB_H", default_value_t = 0.05)]
    pub h: f64,
    /// Element order.
    #[arg(long, global = true, env = "EIGENLAB_ORDER", default_value_t = 2,
          value_parser = clap::value_parser!(u32).range(1..=2))]
    pub order: u32,
    /// Number of modes.
    #[arg(long, global = true, env = "EIGENLAB_NUM", default_value_t = 20)]
    pub num: usize,
    /// Analysis point X,Y; repeat the flag (or separate with ';') for several.
    #[arg(long = "point", global = true, env = "EIGENLAB_POINT", value_delimiter = ';')]
    pub points: Vec<String>,
    /// α grid A:B:STEP.
    #[arg(long, global = true, env = "EIGENLAB_ALPHAS", default_value = "0.25:0.75:0.25")]
    pub alphas: String,
    /// Eigensolver residual tolerance.
    #[arg(long, global = true, env = "EIGENLAB_TOL", default_value_t = 1e-8)]
    pub tol: f64,
    /// Output directory.
    #[arg(long, global = true, env = "EIGENLAB_OUT", default_value = "eigenlab-out")]
    pub out: PathBuf,
    /// Property suite for `verify`.
    #[arg(long, global = true, env = "EIGENLAB_SUITE", value_enum)]
    pub suite: Option<Suite>,
    /// Reuse or rebuild caches.
    #[arg(long, global = true, env = "EIGENLAB_CACHE", value_enum, default_value_t = CachePolicy::Use)]
    pub cache: CachePolicy,
    /// Mesh uniformly instead of grading toward concave corners.
    #[arg(long, global = true, env = "EIGENLAB_UNIFORM")]
    pub uniform: bool,
}

impl RunArgs {
    pub fn to_config(&self) -> Result<RunConfig, ConfigError> {
        let polygon = self.polygon.clone().ok_or(ConfigError::MissingPolygon)?;
        let mut cfg = RunConfig::new(polygon, self.out.clone());
        cfg.target_h = self.h;
        cfg.order = ElementOrder::from_degree(self.order).expect("clap restricts the order");
        cfg.n_modes = self.num;
        cfg.points = self.points.iter().map(|s| parse_point(s)).collect::<Result<_, _>>()?;
        cfg.alphas = parse_alpha_grid(&self.alphas)?;
        cfg.tol = self.tol;
        cfg.cache = self.cache;
        cfg.graded = !self.uniform;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn lock(out: &std::path::Path) -> Result<DirLock, PipelineError> {
    DirLock::acquire(out).map_err(|e| match e.kind() {
        std::io::ErrorKind::AlreadyExists => PipelineError::Locked(out.to_path_buf()),
        _ => PipelineError::Io(e),
    })
}

fn paths(files: &[PathBuf]) -> Vec<String> {
    files.iter().map(|p| p.display().to_string()).collect()
}

/// Runs one command and returns its JSON summary line.
pub fn run(cli: &Cli) -> Result<String, PipelineError> {
    if cli.command == Command::Verify {
        let suite = cli.args.suite.ok_or(ConfigError::MissingSuite)?;
        let _guard = lock(&cli.args.out)?;
        let (report, files) = pipeline::cmd_verify(suite, &cli.args.out)?;
        let failed = report.failures().count();
        let line = json!({
            "command": "verify",
            "suite": report.suite,
            "passed": report.passed,
            "checks": report.checks.len(),
            "failed": failed,
            "files": paths(&files),
        });
        if !report.passed {
            eprintln!("{line}");
            for c in report.failures() {
                eprintln!("FAIL {}: {} (threshold {})", c.name, c.value, c.threshold);
            }
            return Err(PipelineError::VerifyFailed {
                suite: report.suite,
                failed,
                total: report.checks.len(),
            });
        }
        return Ok(line.to_string());
    }
    let cfg = cli.args.to_config()?;
    let _guard = lock(&cfg.out)?;
    let line = match cli.command {
        Command::Mesh => {
            let m = pipeline::ensure_mesh(&cfg)?;
            json!({
                "command": "mesh",
                "freshness": m.freshness,
                "vertices": m.mesh.vertices().len(),
                "triangles": m.mesh.triangles().len(),
                "mesh_sha256": crate::cache::hex(&m.hash),
                "files": paths(&[m.path]),
            })
        }
        Command::Solve => {
            let s = pipeline::ensure_modes(&cfg)?;
            json!({
                "command": "solve",
                "freshness": s.freshness,
                "mesh_freshness": s.mesh.freshness,
                "modes": s.modes.len(),
                "lambda_sq": s.file.lambda_sq,
                "max_residual": s.file.residuals.iter().copied().fold(0.0, f64::max),
                "files": paths(&[s.mesh.path.clone(), s.path.clone()]),
            })
        }
        Command::Analyze => {
            let a = pipeline::cmd_analyze(&cfg)?;
            json!({
                "command": "analyze",
                "passed": a.summary.passed,
                "points": a.summary.points.len(),
                "modes": a.summary.n_modes,
                "files": paths(&a.files),
            })
        }
        Command::Oracle => {
            let (worst, path) = pipeline::cmd_oracle(&cfg)?;
            json!({
                "command": "oracle",
                "max_relative_error": worst,
                "files": paths(&[path]),
            })
        }
        Command::Verify => unreachable!("handled above"),
    };
    Ok(line.to_string())
}
