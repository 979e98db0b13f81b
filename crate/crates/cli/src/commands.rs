use std::path::Path;

use horocycle_core::closed_forms::{geodesic_center_field, geodesic_endpoint_field, horocycle_unit_field};
use horocycle_core::config::test_sets;
use horocycle_core::flows::{detect_period, integrate_cotangent, integrate_tangent, PeriodOptions};
use horocycle_core::hj::{check_level, graph_deviation, residual, residual_report};
use horocycle_core::mane::{estimate, CurveFamily};
use horocycle_core::{
    AdHoc, Config, CotangentState, Covector, Family, FlowError, GridSpec, HJSolution, HalfPlanePoint, Potential,
    SystemKind, TangencyPoint, TangentState, TangentVector, SCHEMA_VERSION,
};
use serde::Serialize;

use crate::args::*;
use crate::output::{csv_preamble, emit, json, num, trajectory_csv};
use crate::CliError;

fn point(x: f64, y: f64) -> Result<HalfPlanePoint, CliError> {
    HalfPlanePoint::new(x, y).map_err(|e| CliError::Usage(e.to_string()))
}

fn step(cli_dt: Option<f64>, cfg: &Config) -> Result<f64, CliError> {
    let dt = cli_dt.unwrap_or(cfg.dt);
    if dt.is_finite() && dt > 0.0 {
        Ok(dt)
    } else {
        Err(CliError::Usage(format!("--dt must be positive, got {dt}")))
    }
}

fn write(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    emit(path, bytes).map_err(|e| {
        CliError::Io(format!("writing {}: {e}", path.map_or("stdout".into(), |p| p.display().to_string())))
    })
}

pub fn simulate(args: &SimulateArgs, cfg: &Config) -> Result<(), CliError> {
    let dt = step(args.dt, cfg)?;
    if !(args.duration.is_finite() && args.duration > 0.0) || dt > args.duration {
        return Err(CliError::Usage(format!("need 0 < dt <= T, got dt = {dt}, T = {}", args.duration)));
    }
    let q = point(args.q0.0, args.q0.1)?;
    let result = match (args.bundle, args.v0, args.p0) {
        (BundleArg::Tangent, Some((vx, vy)), None) => {
            integrate_tangent(args.system, &TangentState::new(q, TangentVector::new(vx, vy)), args.duration, dt)
        }
        (BundleArg::Cotangent, None, Some((px, py))) => {
            integrate_cotangent(args.system, &CotangentState::new(q, Covector::new(px, py)), args.duration, dt)
        }
        (BundleArg::Tangent, _, _) => return Err(CliError::Usage("tangent flows take --v0 (and no --p0)".into())),
        (BundleArg::Cotangent, _, _) => return Err(CliError::Usage("cotangent flows take --p0 (and no --v0)".into())),
    };
    match result {
        Ok(traj) => write(args.out.as_deref(), trajectory_csv(&traj).as_bytes()),
        Err(FlowError::BoundaryEscape { t, partial }) => {
            write(args.out.as_deref(), trajectory_csv(&partial).as_bytes())?;
            Err(CliError::BoundaryEscape(format!(
                "trajectory reached the boundary near t = {t}; wrote {} samples up to t = {}",
                partial.samples.len(),
                partial.duration()
            )))
        }
        Err(e) => Err(CliError::Usage(e.to_string())),
    }
}

enum Candidate {
    Catalog(HJSolution),
    AdHoc(AdHoc),
}

impl Candidate {
    fn potential(&self) -> &dyn Potential {
        match self {
            Candidate::Catalog(u) => u,
            Candidate::AdHoc(u) => u,
        }
    }
}

fn verify_candidate(args: &VerifyArgs) -> Result<(Candidate, SystemKind), CliError> {
    let family = match args.family {
        CandidateFamily::AdhocX => {
            if args.a.is_some() {
                return Err(CliError::Usage("adhoc-x takes no --a".into()));
            }
            return Ok((Candidate::AdHoc(AdHoc::LinearX), args.system.unwrap_or(SystemKind::Magnetic)));
        }
        CandidateFamily::Arctan => Family::MagneticArctan,
        CandidateFamily::Constant => Family::Constant,
        CandidateFamily::LogVertical => Family::GeodesicLogVertical,
        CandidateFamily::LogEndpoint => Family::GeodesicLogEndpoint,
        CandidateFamily::Arcsinh => Family::GeodesicArcsinh,
    };
    let needs_a = matches!(family, Family::MagneticArctan | Family::GeodesicLogEndpoint | Family::GeodesicArcsinh);
    let a = match (needs_a, args.a) {
        (true, Some(a)) => a,
        (true, None) => return Err(CliError::Usage(format!("family {family} needs --a"))),
        (false, None) => TangencyPoint::Infinity,
        (false, Some(_)) => return Err(CliError::Usage(format!("family {family} takes no --a"))),
    };
    let system = args.system.unwrap_or(family.system());
    if system != family.system() {
        return Err(CliError::Usage(format!("family {family} solves the {} system, not {system}", family.system())));
    }
    let u = HJSolution::from_parts(family, a, args.sign, args.c).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok((Candidate::Catalog(u), system))
}

#[derive(Debug, Serialize)]
struct Tolerances {
    residual: f64,
    fd_residual: f64,
    gradient: f64,
    level: f64,
    invariance: f64,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    schema_version: u32,
    solution: String,
    system: SystemKind,
    grid: GridSpec,
    max_residual: f64,
    mean_residual: f64,
    max_residual_fd: f64,
    max_grad_mismatch: f64,
    max_level_deviation: f64,
    invariance_deviation: Option<f64>,
    reference_point: [f64; 2],
    reference_residual: f64,
    tolerances: Tolerances,
    diagnostics: Vec<String>,
    pass: bool,
}

/// Residual magnitude at `(0, 1)`, quoted in every report.
const REFERENCE_POINT: (f64, f64) = (0.0, 1.0);

pub fn verify(args: &VerifyArgs, cfg: &Config) -> Result<(), CliError> {
    let dt = step(args.dt, cfg)?;
    let grid = match args.grid {
        Some(g) => g,
        None => cfg.grid().map_err(|e| CliError::Usage(e.to_string()))?,
    };
    let (candidate, system) = verify_candidate(args)?;
    let u = candidate.potential();
    let tol = cfg.residual_tolerances();
    let res = residual_report(system, u, &grid, 0.5, &tol);
    let level = check_level(system, u, &grid);

    let mut diagnostics = Vec::new();
    let mut invariance: Option<f64> = Some(0.0);
    for &(x, y) in &test_sets::INVARIANCE_STARTS {
        let q = point(x, y)?;
        match graph_deviation(system, u, &CotangentState::new(q, u.gradient(&q)), cfg.invariance_duration, dt) {
            Ok(d) => invariance = invariance.map(|m| m.max(d)),
            Err(e) => {
                diagnostics.push(format!("graph invariance from ({x}, {y}): {e}"));
                invariance = None;
            }
        }
    }
    let reference = point(REFERENCE_POINT.0, REFERENCE_POINT.1)?;
    let reference_residual = residual(system, u, &reference, 0.5).abs();

    if !res.pass {
        diagnostics.push(format!(
            "residual check failed: max {:e} (fd {:e}), gradient mismatch {:e}",
            res.max_residual, res.max_residual_fd, res.max_grad_mismatch
        ));
    }
    let on_level = level < cfg.level_tol;
    if !on_level {
        diagnostics.push(format!("level deviation {level:e} exceeds {:e}", cfg.level_tol));
    }
    let invariant = invariance.is_some_and(|d| d < cfg.invariance_tol);
    if let Some(d) = invariance.filter(|_| !invariant) {
        diagnostics.push(format!("graph deviation {d:e} exceeds {:e}", cfg.invariance_tol));
    }
    let pass = res.pass && on_level && invariant;
    let report = VerifyReport {
        schema_version: SCHEMA_VERSION,
        solution: res.solution,
        system,
        grid,
        max_residual: res.max_residual,
        mean_residual: res.mean_residual,
        max_residual_fd: res.max_residual_fd,
        max_grad_mismatch: res.max_grad_mismatch,
        max_level_deviation: level,
        invariance_deviation: invariance,
        reference_point: [REFERENCE_POINT.0, REFERENCE_POINT.1],
        reference_residual,
        tolerances: Tolerances {
            residual: tol.analytic,
            fd_residual: tol.finite_difference,
            gradient: tol.gradient,
            level: cfg.level_tol,
            invariance: cfg.invariance_tol,
        },
        diagnostics,
        pass,
    };
    write(args.out.as_deref(), &json(&report))?;
    if pass {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(format!("{} does not pass verification", report.solution)))
    }
}

#[derive(Debug, Serialize)]
struct PeriodSample {
    q0: [f64; 2],
    v0: [f64; 2],
    period: f64,
}

#[derive(Debug, Serialize)]
struct PeriodReport {
    schema_version: u32,
    k: f64,
    samples: Vec<PeriodSample>,
    max_relative_spread: f64,
    tolerance: f64,
    pass: bool,
}

/// Start states at energy `k`: the first `n` entries of the versioned set.
pub fn period_starts(k: f64, n: usize) -> Vec<TangentState> {
    let speed = (2.0 * k).sqrt();
    test_sets::PERIOD_STARTS[..n]
        .iter()
        .map(|&(x, y, angle)| {
            let q = HalfPlanePoint::new(x, y).expect("versioned start points lie in the half-plane");
            let v = TangentVector::new(y * speed * angle.cos(), y * speed * angle.sin());
            TangentState::new(q, v)
        })
        .collect()
}

pub fn period(args: &PeriodArgs, cfg: &Config) -> Result<(), CliError> {
    if !(args.k.is_finite() && args.k > 0.0) {
        return Err(CliError::Usage(format!("--k must be positive, got {}", args.k)));
    }
    if args.k >= 0.5 {
        return Err(CliError::Usage(format!(
            "--k {} is not subcritical: at k = 1/2 the horocycle flow has no periodic orbits, \
             and above it orbits run to the boundary",
            args.k
        )));
    }
    let max = test_sets::PERIOD_STARTS.len();
    if args.samples == 0 || args.samples > max {
        return Err(CliError::Usage(format!("--samples must be between 1 and {max}")));
    }
    let opts = PeriodOptions { dt: step(args.dt, cfg)?, tolerance: cfg.return_tol, budget: cfg.period_budget };
    let mut samples = Vec::new();
    for s0 in period_starts(args.k, args.samples) {
        // recompute k from the state so the energy precondition holds exactly
        let k = horocycle_core::mechanics::energy(&s0);
        let period = match detect_period(k, &s0, opts) {
            Ok(p) => p,
            Err(e @ FlowError::NoReturn { .. }) => return Err(CliError::NoReturn(e.to_string())),
            Err(e) => return Err(CliError::Usage(e.to_string())),
        };
        samples.push(PeriodSample { q0: [s0.q.x(), s0.q.y()], v0: [s0.v.vx, s0.v.vy], period });
    }
    let periods: Vec<f64> = samples.iter().map(|s| s.period).collect();
    let lo = periods.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = periods.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = periods.iter().sum::<f64>() / periods.len() as f64;
    let spread = (hi - lo) / mean;
    let pass = spread < cfg.spread_tol;
    let report = PeriodReport {
        schema_version: SCHEMA_VERSION,
        k: args.k,
        samples,
        max_relative_spread: spread,
        tolerance: cfg.spread_tol,
        pass,
    };
    write(args.out.as_deref(), &json(&report))?;
    if pass {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(format!("period spread {spread:e} exceeds {:e}", cfg.spread_tol)))
    }
}

#[derive(Debug, Serialize)]
struct ManeReport {
    schema_version: u32,
    upper: f64,
    lower: f64,
    gap: f64,
    candidate: String,
    curves: String,
    best_curve: String,
    upper_variance: f64,
}

pub fn mane(args: &ManeArgs, cfg: &Config) -> Result<(), CliError> {
    let grid = match args.grid {
        Some(g) => g,
        None => cfg.grid().map_err(|e| CliError::Usage(e.to_string()))?,
    };
    let candidate = match args.candidate {
        ManeCandidate::Arctan => Candidate::Catalog(HJSolution::magnetic(args.a)),
        ManeCandidate::Constant => Candidate::Catalog(HJSolution::constant(0.0)),
        ManeCandidate::AdhocX => Candidate::AdHoc(AdHoc::LinearX),
    };
    let family = match args.curves {
        CurveFamilyArg::Hyperbolic => CurveFamily::hyperbolic_standard(),
        CurveFamilyArg::HyperbolicRefined => CurveFamily::hyperbolic_refined(),
        CurveFamilyArg::Euclidean => CurveFamily::euclidean_standard(),
    };
    let est = estimate(candidate.potential(), &grid, &family).map_err(|e| CliError::Usage(e.to_string()))?;
    let report = ManeReport {
        schema_version: SCHEMA_VERSION,
        upper: est.upper,
        lower: est.lower,
        gap: est.gap,
        candidate: est.candidate,
        curves: est.curves,
        best_curve: est.best_curve,
        upper_variance: est.upper_variance,
    };
    write(args.out.as_deref(), &json(&report))
}

pub fn foliation(args: &FoliationArgs, cfg: &Config) -> Result<(), CliError> {
    let grid = match args.grid {
        Some(g) => g,
        None => cfg.grid().map_err(|e| CliError::Usage(e.to_string()))?,
    };
    let field: Box<dyn Fn(&HalfPlanePoint) -> TangentVector> = match (args.kind, args.a) {
        (FoliationKind::Horocycle, a) => Box::new(move |q| horocycle_unit_field(a, q)),
        (FoliationKind::GeodesicEndpoint, a) => Box::new(move |q| geodesic_endpoint_field(a, q)),
        (FoliationKind::GeodesicCenter, TangencyPoint::Finite(a)) => Box::new(move |q| geodesic_center_field(a, q)),
        (FoliationKind::GeodesicCenter, TangencyPoint::Infinity) => {
            return Err(CliError::Usage("geodesic-center needs a finite --a".into()))
        }
    };
    let mut out = csv_preamble("x,y,vx,vy");
    for q in grid.points() {
        let v = field(&q);
        out.push_str(&format!("{},{},{},{}\n", num(q.x()), num(q.y()), num(v.vx), num(v.vy)));
    }
    write(args.out.as_deref(), out.as_bytes())
}
