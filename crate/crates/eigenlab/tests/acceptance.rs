//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use eigenlab::config::RunConfig;
use eigenlab::pipeline::{ensure_modes, parallel_profile};
use eigenlab::suites::{self, CutoffSweep, IdentityCase};
use eigenlab_core::analysis::{local_mass, MassProfile};
use eigenlab_core::discretize::{assemble, triangulate};
use eigenlab_core::eigensolve::{clusters, solve_modes};
use eigenlab_core::oracles::poly_commutator_check;
use eigenlab_core::{AnalyticMode, Bc, DiscreteMode, ElementOrder, Mesh, Point, PolygonDomain, SolveOptions};

struct Outcome {
    id: u32,
    name: &'static str,
    passed: bool,
    detail: String,
}

impl Outcome {
    fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} criterion {}: {} | {}", self.id, self.name, self.detail)
    }
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed().as_secs_f64())
}

fn exact_commutator() -> Outcome {
    let (r, secs) = timed(|| poly_commutator_check(12));
    Outcome {
        id: 1,
        name: "exact polynomial commutator up to degree 12",
        passed: r == 0 && secs < 1.0,
        detail: format!("max residual {r}, {secs:.3} s (limit 1 s)"),
    }
}

fn cutoff_conditions() -> Outcome {
    let sweep = CutoffSweep::default();
    let (slack, secs) = timed(|| suites::cutoff_sweep(&sweep));
    let worst = slack.worst();
    Outcome {
        id: 2,
        name: "cutoff conditions on random triples",
        passed: worst >= -1e-9 && secs < 30.0,
        detail: format!(
            "{} triples x {} samples, worst slack {worst:.3e} (nonneg {:.2e}, monotone {:.2e}, slope {:.2e}, plateaus {:.2e}/{:.2e}), {secs:.1} s (limit 30 s)",
            sweep.triples,
            sweep.samples,
            slack.nonnegative,
            slack.nonincreasing,
            slack.slope_bound,
            slack.inner_plateau,
            slack.outer_plateau
        ),
    }
}

fn identity_residuals(cases: &[IdentityCase], secs: f64) -> Outcome {
    let worst = cases
        .iter()
        .max_by(|a, b| a.residual.total_cmp(&b.residual))
        .expect("cases");
    let corners = cases.iter().filter(|c| c.boundary.is_some()).count();
    Outcome {
        id: 3,
        name: "commutator identity on interior, edge and corner cases",
        passed: cases.iter().all(|c| c.residual <= 1e-8) && secs < 120.0,
        detail: format!(
            "{} cases ({} wedge), max relative residual {:.2e} at {}, {secs:.1} s (limit 120 s)",
            cases.len(),
            corners,
            worst.residual,
            worst.label
        ),
    }
}

fn boundary_cancellation(cases: &[IdentityCase]) -> Outcome {
    let with: Vec<&IdentityCase> = cases.iter().filter(|c| c.boundary.is_some()).collect();
    let worst = with
        .iter()
        .max_by(|a, b| a.boundary.unwrap().total_cmp(&b.boundary.unwrap()))
        .expect("wedge cases");
    Outcome {
        id: 4,
        name: "boundary terms vanish on both sides",
        passed: !with.is_empty() && with.iter().all(|c| c.boundary.unwrap() <= 1e-9),
        detail: format!(
            "{} wedge cases x 2 sides, max |I|/(lambda max|u|^2) {:.2e} at {}",
            with.len(),
            worst.boundary.unwrap(),
            worst.label
        ),
    }
}

/// The lowest `count` values `π²(m² + n²)` with multiplicity.
fn square_spectrum(count: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (1..40u32)
        .flat_map(|m| (1..40u32).map(move |n| PI * PI * (m * m + n * n) as f64))
        .collect();
    v.sort_by(f64::total_cmp);
    v.truncate(count);
    v
}

/// Sizes of runs of equal values.
fn multiplicities(values: &[f64]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 && (*v - values[i - 1]).abs() <= 1e-12 * v {
            *out.last_mut().unwrap() += 1;
        } else {
            out.push(1);
        }
    }
    out
}

fn solver_fidelity() -> Outcome {
    let ((rel, pattern_ok, pattern, exact_pattern, tight, rates), secs) = timed(|| {
        let dom = PolygonDomain::rectangle(1.0, 1.0, Bc::Dirichlet).unwrap();
        let mesh = Arc::new(triangulate(&dom, 0.05, false).unwrap());
        let asm = assemble(mesh, ElementOrder::P2).unwrap();
        let spec = solve_modes(&asm, &SolveOptions::new(20)).unwrap();
        let got = spec.lambda_sq();
        let exact = square_spectrum(20);
        let rel = got
            .iter()
            .zip(&exact)
            .map(|(g, e)| (g - e).abs() / e)
            .fold(0.0, f64::max);
        // Each computed value joins the nearest exact level; level counts must match.
        let exact_pattern = multiplicities(&exact);
        let mut levels: Vec<f64> = exact.clone();
        levels.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * *b);
        let mut counts = vec![0usize; levels.len()];
        for g in &got {
            let k = (0..levels.len())
                .min_by(|&i, &j| (levels[i] - g).abs().total_cmp(&(levels[j] - g).abs()))
                .unwrap();
            counts[k] += 1;
        }
        let tight: Vec<usize> = clusters(&got).iter().map(|r| r.len()).collect();
        // Observed order on uniform refinements of a coarse mesh.
        let mut m: Mesh = triangulate(&dom, 0.2, false).unwrap();
        let mut errs: Vec<Vec<f64>> = Vec::new();
        let targets = square_spectrum(6);
        for level in 0..4 {
            if level > 0 {
                m = m.refine_uniform();
            }
            let a = assemble(Arc::new(m.clone()), ElementOrder::P2).unwrap();
            let v = solve_modes(&a, &SolveOptions::new(6).tol(1e-11)).unwrap().lambda_sq();
            errs.push(v.iter().zip(&targets).map(|(x, e)| x - e).collect());
        }
        let rates: Vec<f64> = (0..3).map(|k| (errs[k][0] / errs[k + 1][0]).log2()).collect();
        (rel, counts == exact_pattern, counts, exact_pattern, tight, rates)
    });
    let last = *rates.last().unwrap();
    Outcome {
        id: 5,
        name: "unit-square P2 spectrum and convergence order",
        passed: rel <= 5e-3 && pattern_ok && last >= 3.8 && secs < 120.0,
        detail: format!(
            "max rel error {rel:.2e} (limit 5e-3), level sizes {pattern:?} vs exact {exact_pattern:?}, \
             1e-10 clusters {tight:?}, P2 rates of lambda_1^2 over 3 refinements {:?} (need last >= 3.8), {secs:.1} s (limit 120 s)",
            rates.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>()
        ),
    }
}

struct DeskRun {
    label: &'static str,
    modes: Vec<DiscreteMode>,
    domain: PolygonDomain,
    profiles: Vec<MassProfile>,
}

fn desk_run(label: &'static str, file: &str, h: f64, order: ElementOrder, n: usize, points: &[Point]) -> DeskRun {
    let out = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(data(file), out.path());
    cfg.target_h = h;
    cfg.order = order;
    cfg.n_modes = n;
    cfg.points = points.to_vec();
    cfg.alphas = vec![0.25, 0.5, 0.75];
    let stage = ensure_modes(&cfg).unwrap();
    let domain = stage.mesh.polygon.domain.clone();
    let profiles = points
        .iter()
        .map(|&p| parallel_profile(&stage.modes, &domain, p, &cfg.alphas).unwrap())
        .collect();
    DeskRun {
        label,
        modes: stage.modes,
        domain,
        profiles,
    }
}

fn non_concentration(runs: &[DeskRun], secs: f64) -> Outcome {
    let mut passed = secs < 600.0;
    let mut parts = Vec::new();
    for run in runs {
        let n = run.modes.len();
        passed &= n >= 300;
        for prof in &run.profiles {
            for c in eigenlab::report::top_half_checks(prof, n) {
                passed &= c.passed;
                let flags = if c.low_mode_flags.is_empty() {
                    String::new()
                } else {
                    format!(", low-mode flags {:?}", c.low_mode_flags)
                };
                parts.push(format!(
                    "{} ({},{}) a={}: max {:.4} <= {:.4} [mode {}]{flags}",
                    run.label, c.p0[0], c.p0[1], c.alpha, c.window_max, c.bound, c.argmax_mode
                ));
            }
        }
    }
    Outcome {
        id: 6,
        name: "top-half disc mass below 1/(2 - alpha) on square and L-shape",
        passed,
        detail: format!("{}; {secs:.1} s (limit 600 s)", parts.join("; ")),
    }
}

fn remainder_decay() -> Outcome {
    let orders: Vec<u32> = (5..=40).collect();
    let (fam, secs) = timed(|| suites::ledger_family(&orders).unwrap());
    let slope = suites::remainder_slope(&fam);
    let first = &fam.first().unwrap().1;
    let last = &fam.last().unwrap().1;
    Outcome {
        id: 7,
        name: "ledger remainder decays like h for (m,m) modes",
        passed: slope >= 0.9,
        detail: format!(
            "m = 5..40, fitted slope {slope:.3} (need >= 0.9), r(h={:.4}) = {:.3e}, r(h={:.4}) = {:.3e}, {secs:.1} s",
            first.h, first.remainder, last.h, last.remainder
        ),
    }
}

fn mass_bookkeeping(runs: &[DeskRun]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut analytic: Vec<AnalyticMode> = Vec::new();
    for (m, n) in [(1, 1), (3, 2), (9, 7)] {
        analytic.push(AnalyticMode::rectangle(1.3, 0.7, m, n, Bc::Dirichlet).unwrap());
        analytic.push(AnalyticMode::rectangle(1.3, 0.7, m - 1, n, Bc::Neumann).unwrap());
    }
    analytic.push(AnalyticMode::triangle(4, 1).unwrap());
    analytic.push(AnalyticMode::triangle(9, 5).unwrap());
    for mode in &analytic {
        let dom = mode.domain(1.0, 64).unwrap();
        let (lo, _) = dom.bounding_box();
        let mass = local_mass(mode, lo, dom.diameter(), &dom).unwrap();
        worst = worst.max((mass - 1.0).abs());
        count += 1;
    }
    for run in runs {
        let (lo, _) = run.domain.bounding_box();
        for mode in &run.modes {
            let mass = local_mass(mode, lo, run.domain.diameter(), &run.domain).unwrap();
            worst = worst.max((mass - 1.0).abs());
            count += 1;
        }
    }
    let mut drops = 0;
    let mut rows = 0;
    for run in runs {
        for prof in &run.profiles {
            let mut by_mode: Vec<Vec<(f64, f64)>> = vec![Vec::new(); run.modes.len()];
            for r in &prof.rows {
                by_mode[r.mode_index].push((r.alpha, r.disc_mass));
            }
            for v in &mut by_mode {
                v.sort_by(|a, b| a.0.total_cmp(&b.0));
                drops += v.windows(2).filter(|w| w[1].1 < w[0].1).count();
                rows += v.len();
            }
        }
    }
    Outcome {
        id: 8,
        name: "full-domain mass and monotonicity in alpha",
        passed: worst <= 1e-6 && drops == 0,
        detail: format!(
            "{count} modes, max |mass - 1| = {worst:.2e} (limit 1e-6); {rows} profile rows, {drops} decreases in alpha"
        ),
    }
}

fn main() {
    let mut results = vec![exact_commutator(), cutoff_conditions()];
    let (cases, secs) = timed(|| suites::identity_matrix().unwrap());
    results.push(identity_residuals(&cases, secs));
    results.push(boundary_cancellation(&cases));
    results.push(solver_fidelity());
    let (runs, secs) = timed(|| {
        vec![
            desk_run(
                "square",
                "square.json",
                0.04,
                ElementOrder::P2,
                320,
                &[Point::new(0.0, 0.0), Point::new(0.5, 0.0), Point::new(0.5, 0.5)],
            ),
            desk_run(
                "L-shape",
                "l_shape.json",
                0.02,
                ElementOrder::P1,
                320,
                &[Point::new(1.0, 1.0)],
            ),
        ]
    });
    results.push(non_concentration(&runs, secs));
    results.push(remainder_decay());
    results.push(mass_bookkeeping(&runs));
    results.sort_by_key(|o| o.id);
    println!();
    for r in &results {
        println!("{}", r.line());
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
