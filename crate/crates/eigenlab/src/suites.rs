//! Property suites behind `eigenlab verify`.

use std::f64::consts::{PI, TAU};

use eigenlab_core::analysis::{boundary_terms, commutator_pairing, local_mass, loglog_slope, proof_ledger, Ledger};
use eigenlab_core::geometry::FrameSide;
use eigenlab_core::oracles::{bessel_j, bessel_zero, poly_commutator_check};
use eigenlab_core::rng::SplitMix64;
use eigenlab_core::{AnalysisError, AnalyticMode, Bc, CutoffFunction, Point, PolygonDomain, RadialProfile};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Cutoff,
    Commutator,
    LemmaZero,
    Ledger,
    Oracle,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Cutoff => "cutoff",
            Suite::Commutator => "commutator",
            Suite::LemmaZero => "lemma-zero",
            Suite::Ledger => "ledger",
            Suite::Oracle => "oracle",
        }
    }
}

/// One assertion: `value` compared against `threshold`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            passed: value <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            passed: value >= threshold,
        }
    }
}

/// Machine-readable outcome of a suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn new(suite: Suite, checks: Vec<Check>) -> Self {
        Self {
            suite: suite.name(),
            passed: !checks.is_empty() && checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub fn run(suite: Suite) -> Result<SuiteReport, AnalysisError> {
    Ok(match suite {
        Suite::Cutoff => cutoff_report(&CutoffSweep::default()),
        Suite::Commutator => commutator_report(12),
        Suite::LemmaZero => identity_report(&identity_matrix()?),
        Suite::Ledger => ledger_report(&ledger_family(&LEDGER_ORDERS)?),
        Suite::Oracle => oracle_report()?,
    })
}

pub fn commutator_report(max_degree: u32) -> SuiteReport {
    let r = poly_commutator_check(max_degree);
    SuiteReport::new(
        Suite::Commutator,
        vec![Check::at_most(
            format!("max |coefficient| up to degree {max_degree}"),
            r as f64,
            0.0,
        )],
    )
}

/// Random `(δ₁, δ₂, ε)` triples, each sampled densely on `[0, 1.2 δ₂]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffSweep {
    pub triples: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for CutoffSweep {
    fn default() -> Self {
        Self {
            triples: 1000,
            samples: 100_000,
            seed: 0xC0FF_EE11,
        }
    }
}

/// Smallest slack of each cutoff condition over a sweep; negative means violated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CutoffSlack {
    pub nonnegative: f64,
    pub nonincreasing: f64,
    pub slope_bound: f64,
    pub inner_plateau: f64,
    pub outer_plateau: f64,
}

impl CutoffSlack {
    const FULL: CutoffSlack = CutoffSlack {
        nonnegative: f64::INFINITY,
        nonincreasing: f64::INFINITY,
        slope_bound: f64::INFINITY,
        inner_plateau: f64::INFINITY,
        outer_plateau: f64::INFINITY,
    };

    fn min(self, o: CutoffSlack) -> CutoffSlack {
        CutoffSlack {
            nonnegative: self.nonnegative.min(o.nonnegative),
            nonincreasing: self.nonincreasing.min(o.nonincreasing),
            slope_bound: self.slope_bound.min(o.slope_bound),
            inner_plateau: self.inner_plateau.min(o.inner_plateau),
            outer_plateau: self.outer_plateau.min(o.outer_plateau),
        }
    }

    pub fn worst(&self) -> f64 {
        [
            self.nonnegative,
            self.nonincreasing,
            self.slope_bound,
            self.inner_plateau,
            self.outer_plateau,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }
}

fn triple(rng: &mut SplitMix64) -> (f64, f64, f64) {
    let d1 = 0.01 + 4.99 * rng.next_f64();
    let d2 = d1 + 0.01 + 4.99 * rng.next_f64();
    let eps = CutoffFunction::max_epsilon(d1, d2) * (0.001 + 0.999 * rng.next_f64());
    (d1, d2, eps)
}

/// Slack of every condition of one `φ₁` over `samples` jittered points.
pub fn cutoff_slack(d1: f64, d2: f64, eps: f64, samples: usize, seed: u64) -> CutoffSlack {
    let phi = CutoffFunction::phi1(d1, d2, eps).expect("sweep triples are admissible");
    let bound = phi.derivative_bound();
    let e3 = eps * eps * eps;
    let mut rng = SplitMix64::new(seed);
    let top = 1.2 * d2;
    let mut slack = CutoffSlack::FULL;
    let fixed = [0.0, d1, d1 + e3, d2 - e3, d2, top];
    let jittered = (0..samples).map(|k| top * (k as f64 + rng.next_f64()) / samples as f64);
    for s in fixed.into_iter().chain(jittered) {
        let (v, dv, _) = phi.eval(s);
        slack = slack.min(CutoffSlack {
            nonnegative: v,
            nonincreasing: -dv,
            slope_bound: bound - dv.abs(),
            inner_plateau: if s <= d1 + e3 { -(v - 1.0).abs() } else { f64::INFINITY },
            outer_plateau: if s >= d2 - e3 { -v.abs() } else { f64::INFINITY },
        });
    }
    slack
}

pub fn cutoff_sweep(sweep: &CutoffSweep) -> CutoffSlack {
    let mut rng = SplitMix64::new(sweep.seed);
    let triples: Vec<_> = (0..sweep.triples).map(|_| (triple(&mut rng), rng.next_u64())).collect();
    triples
        .par_iter()
        .map(|&((d1, d2, eps), seed)| cutoff_slack(d1, d2, eps, sweep.samples, seed))
        .reduce(|| CutoffSlack::FULL, CutoffSlack::min)
}

pub fn cutoff_report(sweep: &CutoffSweep) -> SuiteReport {
    let s = cutoff_sweep(sweep);
    let tag = format!("{} triples x {} samples", sweep.triples, sweep.samples);
    let checks = [
        ("phi >= 0", s.nonnegative),
        ("phi' <= 0", s.nonincreasing),
        ("|phi'| <= 1/(d2-d1) + eps", s.slope_bound),
        ("phi = 1 on [0, d1 + eps^3]", s.inner_plateau),
        ("phi = 0 on [d2 - eps^3, inf)", s.outer_plateau),
    ]
    .into_iter()
    .map(|(name, v)| Check::at_least(format!("{name}, min slack over {tag}"), v, -1e-9))
    .collect();
    SuiteReport::new(Suite::Cutoff, checks)
}

/// One analytic test case of the commutator identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCase {
    pub label: String,
    pub theta0: f64,
    pub bc: String,
    pub lambda: f64,
    pub residual: f64,
    /// `max(|I₁|, |I₂|) / (λ · max|u|²)` over both sides; `None` away from the boundary.
    pub boundary: Option<f64>,
}

pub const CORNER_ANGLES: [f64; 5] = [PI / 3.0, PI / 2.0, PI, 1.5 * PI, 1.75 * PI];
pub const CASE_LAMBDAS: [f64; 3] = [5.0, 20.0, 60.0];
const SIDE_PAIRS: [(Bc, Bc, &str); 3] = [
    (Bc::Dirichlet, Bc::Dirichlet, "DD"),
    (Bc::Neumann, Bc::Neumann, "NN"),
    (Bc::Dirichlet, Bc::Neumann, "DN"),
];
/// Rectangle indices with `λ` near 5, 20 and 60.
const INTERIOR_MODES: [(u32, u32); 3] = [(1, 1), (4, 5), (13, 14)];

enum CaseSpec {
    Interior { m: u32, n: u32, bc: Bc },
    Corner { theta0: f64, lambda: f64, pair: usize },
}

fn run_case(spec: &CaseSpec) -> Result<IdentityCase, AnalysisError> {
    match *spec {
        CaseSpec::Interior { m, n, bc } => {
            let mode = AnalyticMode::rectangle(1.0, 1.0, m, n, bc).expect("valid indices");
            let dom = PolygonDomain::rectangle(1.0, 1.0, bc)?;
            let p0 = Point::new(0.37, 0.52);
            let phi = CutoffFunction::phi1(0.12, 0.33, 0.05)?;
            let p = commutator_pairing(&mode, p0, &phi, &dom)?;
            let tag = if bc == Bc::Dirichlet { "DD" } else { "NN" };
            Ok(IdentityCase {
                label: format!("interior rectangle ({m},{n}) {tag}"),
                theta0: TAU,
                bc: tag.into(),
                lambda: mode.lambda(),
                residual: p.residual,
                boundary: None,
            })
        }
        CaseSpec::Corner { theta0, lambda, pair } => {
            let (upper, lower, tag) = SIDE_PAIRS[pair];
            let mode = AnalyticMode::sector_harmonic(theta0, 1, lambda, upper, lower).expect("valid sector");
            let dom = mode.domain(1.0, 64)?;
            let phi = CutoffFunction::phi1(0.4, 0.9, 0.1)?;
            let p = commutator_pairing(&mode, Point::ORIGIN, &phi, &dom)?;
            let mut boundary: f64 = 0.0;
            for side in [FrameSide::Upper, FrameSide::Lower] {
                boundary = boundary.max(boundary_terms(&mode, Point::ORIGIN, &phi, side, &dom)?.normalized());
            }
            Ok(IdentityCase {
                label: format!("corner {:.4} {tag} lambda {lambda}", theta0),
                theta0,
                bc: tag.into(),
                lambda,
                residual: p.residual,
                boundary: Some(boundary),
            })
        }
    }
}

/// The interior and corner cases of the commutator identity, evaluated in parallel.
pub fn identity_matrix() -> Result<Vec<IdentityCase>, AnalysisError> {
    let mut specs = Vec::new();
    for bc in [Bc::Dirichlet, Bc::Neumann] {
        for (m, n) in INTERIOR_MODES {
            specs.push(CaseSpec::Interior { m, n, bc });
        }
    }
    for theta0 in CORNER_ANGLES {
        for pair in 0..SIDE_PAIRS.len() {
            for lambda in CASE_LAMBDAS {
                specs.push(CaseSpec::Corner { theta0, lambda, pair });
            }
        }
    }
    specs.par_iter().map(run_case).collect()
}

pub fn identity_report(cases: &[IdentityCase]) -> SuiteReport {
    let mut checks = Vec::new();
    for c in cases {
        checks.push(Check::at_most(format!("{} residual", c.label), c.residual, 1e-8));
        if let Some(b) = c.boundary {
            checks.push(Check::at_most(format!("{} boundary terms", c.label), b, 1e-9));
        }
    }
    SuiteReport::new(Suite::LemmaZero, checks)
}

pub const LEDGER_ORDERS: [u32; 7] = [5, 7, 10, 14, 20, 28, 40];

/// Ledger of the square modes `(m, m)` at the center with `α = ½`.
pub fn ledger_family(orders: &[u32]) -> Result<Vec<(u32, Ledger)>, AnalysisError> {
    let dom = PolygonDomain::rectangle(1.0, 1.0, Bc::Dirichlet)?;
    orders
        .par_iter()
        .map(|&m| {
            let mode = AnalyticMode::rectangle(1.0, 1.0, m, m, Bc::Dirichlet).expect("valid indices");
            Ok((m, proof_ledger(&mode, Point::new(0.5, 0.5), 0.5, &dom)?))
        })
        .collect()
}

pub fn remainder_slope(family: &[(u32, Ledger)]) -> f64 {
    let hs: Vec<f64> = family.iter().map(|(_, l)| l.h).collect();
    let rs: Vec<f64> = family.iter().map(|(_, l)| l.remainder).collect();
    loglog_slope(&hs, &rs)
}

pub fn ledger_report(family: &[(u32, Ledger)]) -> SuiteReport {
    let mut checks = vec![Check::at_least(
        "remainder log-log slope in h",
        remainder_slope(family),
        0.9,
    )];
    for (m, l) in family {
        checks.push(Check::at_most(
            format!("({m},{m}) identity residual"),
            l.identity_residual,
            1e-8,
        ));
        checks.push(Check::at_least(format!("({m},{m}) chain below cap"), l.cap_slack, 0.0));
    }
    SuiteReport::new(Suite::Ledger, checks)
}

/// Largest PDE and boundary-trace defects of a mode over sample points.
fn oracle_defects(mode: &AnalyticMode, dom: &PolygonDomain, rng: &mut SplitMix64) -> (f64, f64) {
    let (lo, hi) = dom.bounding_box();
    let reach = if mode.is_global() { f64::INFINITY } else { 0.9 };
    let l2 = mode.lambda_sq();
    let (mut pde, mut umax) = (0.0f64, 0.0f64);
    let mut taken = 0;
    while taken < 400 {
        let p = Point::new(
            lo.x + (hi.x - lo.x) * rng.next_f64(),
            lo.y + (hi.y - lo.y) * rng.next_f64(),
        );
        if !dom.contains_strict(p) || p.norm() > reach {
            continue;
        }
        let s = mode.sample(p);
        pde = pde.max((s.hessian.trace() + l2 * s.value).abs());
        umax = umax.max(s.value.abs());
        taken += 1;
    }
    let mut trace = 0.0f64;
    for e in dom.edges() {
        if !mode.is_global() && e.distance_to(Point::ORIGIN) > dom.tol() {
            continue;
        }
        for k in 1..40 {
            let p = e.a + (e.b - e.a) * (k as f64 / 40.0);
            if p.norm() > reach {
                continue;
            }
            let s = mode.sample(p);
            let defect = match e.bc {
                Bc::Dirichlet => s.value.abs(),
                Bc::Neumann => s.grad.dot(e.outward_normal()).abs() / mode.lambda(),
            };
            trace = trace.max(defect);
        }
    }
    (
        pde / (l2 * umax.max(f64::MIN_POSITIVE)),
        trace / umax.max(f64::MIN_POSITIVE),
    )
}

pub fn oracle_report() -> Result<SuiteReport, AnalysisError> {
    let mut modes = Vec::new();
    for bc in [Bc::Dirichlet, Bc::Neumann] {
        for (m, n) in [(1, 1), (2, 3), (7, 4)] {
            modes.push((
                format!("rectangle 1.3x0.7 ({m},{n}) {}", bc.as_str()),
                AnalyticMode::rectangle(1.3, 0.7, m, n, bc).expect("valid"),
            ));
        }
    }
    for (m, n) in [(2, 1), (5, 3)] {
        modes.push((
            format!("triangle ({m},{n})"),
            AnalyticMode::triangle(m, n).expect("valid"),
        ));
    }
    for theta0 in CORNER_ANGLES {
        for (upper, lower, tag) in SIDE_PAIRS {
            modes.push((
                format!("sector {theta0:.4} {tag}"),
                AnalyticMode::sector_harmonic(theta0, 1, 12.0, upper, lower).expect("valid"),
            ));
        }
    }
    let mut checks = Vec::new();
    let mut rng = SplitMix64::new(0x0AC1E);
    for (label, mode) in &modes {
        let dom = mode.domain(1.0, 64)?;
        let (pde, trace) = oracle_defects(mode, &dom, &mut rng);
        checks.push(Check::at_most(format!("{label} relative PDE residual"), pde, 1e-9));
        checks.push(Check::at_most(format!("{label} boundary trace"), trace, 1e-10));
        if mode.is_global() {
            let mass = local_mass(mode, dom.bounding_box().0, 2.0 * dom.diameter(), &dom)?;
            checks.push(Check::at_most(format!("{label} |mass - 1|"), (mass - 1.0).abs(), 1e-6));
        }
    }
    for nu in [0.0, 0.5, 2.0 / 3.0, 1.5, 4.0] {
        for m in 1..=5 {
            let z = bessel_zero(nu, m).map_err(|_| AnalysisError::NonFinite("bessel zero"))?;
            let v = bessel_j(nu, z).map_err(|_| AnalysisError::NonFinite("bessel value"))?;
            checks.push(Check::at_most(format!("|J_{nu:.4}(j_{nu:.4},{m})|"), v.abs(), 1e-12));
        }
    }
    let half_order = (1..=20)
        .map(|k| {
            let x = 0.37 * k as f64;
            let exact = (2.0 / (PI * x)).sqrt() * x.sin();
            (bessel_j(0.5, x).unwrap_or(f64::NAN) - exact).abs()
        })
        .fold(0.0, f64::max);
    checks.push(Check::at_most("J_1/2 against sin closed form", half_order, 1e-12));
    Ok(SuiteReport::new(Suite::Oracle, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cutoff_sweep_passes() {
        let r = cutoff_report(&CutoffSweep {
            triples: 20,
            samples: 2000,
            seed: 3,
        });
        assert!(r.passed, "{r:?}");
        assert_eq!(r.checks.len(), 5);
    }

    #[test]
    fn slack_detects_a_wrong_bound() {
        let s = cutoff_slack(0.5, 1.0, 0.1, 5000, 1);
        assert!(s.worst() >= -1e-9);
        assert!(s.slope_bound < 0.2, "bound should be nearly attained: {s:?}");
    }

    #[test]
    fn commutator_suite_is_exact() {
        let r = commutator_report(6);
        assert!(r.passed);
        assert_eq!(r.checks[0].value, 0.0);
    }

    #[test]
    fn empty_report_fails() {
        assert!(!SuiteReport::new(Suite::Oracle, Vec::new()).passed);
    }

    #[test]
    fn oracle_suite_passes() {
        let r = oracle_report().unwrap();
        let bad: Vec<_> = r.failures().collect();
        assert!(bad.is_empty(), "{bad:#?}");
    }

    #[test]
    fn short_ledger_family_decays() {
        let fam = ledger_family(&[5, 10, 20]).unwrap();
        assert!(remainder_slope(&fam) >= 0.9);
        assert!(ledger_report(&fam).passed);
    }
}
