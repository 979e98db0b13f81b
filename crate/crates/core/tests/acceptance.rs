//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion, and exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use horocycle_core::closed_forms::{geodesic_circle, geodesic_vertical, horocycle, horocycle_invert};
use horocycle_core::config::test_sets::{CATALOG_A, INVARIANCE_STARTS, ORACLE_AB, PERIOD_STARTS, RNG_SEED, VERTICAL_B};
use horocycle_core::flows::{detect_period, integrate_cotangent, integrate_tangent, PeriodOptions};
use horocycle_core::hj::{
    catalog, check_closed, check_exact, check_graph_invariance, check_level, foliation_to_graph, geodesic_center_graph,
    geodesic_endpoint_graph, gradient_form, graph_deviation, residual_report, square_loop, ResidualTolerances, FD_STEP,
    LOOP_NODES,
};
use horocycle_core::mane::{upper_bound, CurveFamily};
use horocycle_core::mechanics::{energy, legendre};
use horocycle_core::quadrature::simpson;
use horocycle_core::{
    AdHoc, CotangentState, GridSpec, HJSolution, HalfPlanePoint, OneForm, Potential, Sign, SystemKind, TangencyPoint,
    TangentState, TangentVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DT: f64 = 1e-3;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn pt(x: f64, y: f64) -> HalfPlanePoint {
    HalfPlanePoint::new(x, y).unwrap()
}

fn a_set() -> Vec<TangencyPoint> {
    let mut out: Vec<_> = CATALOG_A.iter().map(|&a| TangencyPoint::Finite(a)).collect();
    out.push(TangencyPoint::Infinity);
    out
}

fn state_error(s: &[f64; 4], exact: &TangentState) -> f64 {
    exact.to_array().iter().zip(s).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn hj_residuals() -> Outcome {
    let start = Instant::now();
    let tol = ResidualTolerances::default();
    let mut worst = (0.0f64, 0.0f64);
    let mut failures = Vec::new();
    let members = catalog(&CATALOG_A);
    for u in &members {
        let r = residual_report(u.system(), u, &GridSpec::STANDARD, 0.5, &tol);
        worst = (worst.0.max(r.max_residual), worst.1.max(r.max_residual_fd));
        if !(r.max_residual < 1e-12 && r.max_residual_fd < 1e-5) {
            failures.push(r.solution);
        }
    }
    let elapsed = start.elapsed();
    let fast = elapsed < Duration::from_secs(5);
    Outcome::new(
        failures.is_empty() && fast,
        format!(
            "{} solutions, max residual {:.2e} (analytic) {:.2e} (fd), {:.2?}{}",
            members.len(),
            worst.0,
            worst.1,
            elapsed,
            if failures.is_empty() { String::new() } else { format!(", failing: {failures:?}") }
        ),
    )
}

fn level_check() -> Outcome {
    let worst = catalog(&CATALOG_A).iter().map(|u| check_level(u.system(), u, &GridSpec::STANDARD)).fold(0.0, f64::max);
    Outcome::new(worst < 1e-12, format!("max |H(q, du) - 1/2| = {worst:.2e}"))
}

fn graph_invariance() -> Outcome {
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for u in catalog(&CATALOG_A) {
        for &(x, y) in &INVARIANCE_STARTS {
            match check_graph_invariance(u.system(), &u, &pt(x, y), 5.0, DT) {
                Ok(d) => worst = worst.max(d),
                Err(e) => errors.push(format!("{} from ({x}, {y}): {e}", u.label())),
            }
        }
    }
    // du ≡ 0: the flow must stay on the zero section
    let mut zero = 0.0f64;
    for u in [HJSolution::constant(0.0), HJSolution::magnetic(TangencyPoint::Infinity)] {
        for &(x, y) in &INVARIANCE_STARTS {
            zero =
                zero.max(check_graph_invariance(SystemKind::Magnetic, &u, &pt(x, y), 5.0, DT).unwrap_or(f64::INFINITY));
        }
    }
    let perturbed = AdHoc::Perturbed { base: HJSolution::magnetic(TangencyPoint::Finite(0.0)), eps: 0.1 };
    let q0 = pt(0.0, 1.0);
    let control =
        graph_deviation(SystemKind::Magnetic, &perturbed, &CotangentState::new(q0, perturbed.gradient(&q0)), 5.0, DT)
            .unwrap_or(f64::INFINITY);
    Outcome::new(
        errors.is_empty() && worst < 1e-6 && zero < 1e-12 && control > 1e-2,
        format!(
            "max graph deviation {worst:.2e}, zero section {zero:.2e}, perturbed control {control:.2e}{}",
            if errors.is_empty() { String::new() } else { format!(", errors: {errors:?}") }
        ),
    )
}

/// Largest pointwise state error against a closed form over `[0, 5]`.
fn oracle_error<F>(kind: SystemKind, exact: F, dt: f64) -> f64
where
    F: Fn(f64) -> TangentState,
{
    let traj = integrate_tangent(kind, &exact(0.0), 5.0, dt).expect("oracle orbits stay inside");
    traj.samples.iter().map(|s| state_error(&s.state, &exact(s.t))).fold(0.0, f64::max)
}

fn endpoint_error(dt: f64) -> f64 {
    let exact = |t: f64| horocycle(0.0, 1.0, t).unwrap();
    let traj = integrate_tangent(SystemKind::Magnetic, &exact(0.0), 5.0, dt).unwrap();
    state_error(&traj.last().state, &exact(5.0))
}

fn integrator_vs_closed_form() -> Outcome {
    let mut worst = 0.0f64;
    for &(a, b) in &ORACLE_AB {
        worst = worst.max(oracle_error(SystemKind::Magnetic, |t| horocycle(a, b, t).unwrap(), DT));
        worst = worst.max(oracle_error(SystemKind::Kinetic, |t| geodesic_circle(a, b, t).unwrap(), DT));
    }
    for &b in &VERTICAL_B {
        for dir in [Sign::Plus, Sign::Minus] {
            worst = worst.max(oracle_error(SystemKind::Kinetic, |t| geodesic_vertical(b, t, dir).unwrap(), DT));
        }
    }
    let steps = [0.16, 0.08, 0.04, 0.02, 0.01];
    let errors: Vec<f64> = steps.iter().map(|&dt| endpoint_error(dt)).collect();
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    let fourth_order = ratios.iter().all(|r| (12.0..=20.0).contains(r));
    Outcome::new(
        worst < 1e-6 && fourth_order,
        format!(
            "max oracle error {worst:.2e}; step-halving ratios {}",
            ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn conservation() -> Outcome {
    let starts = [
        (0.0, 1.0, 0.5, 0.0),
        (1.0, 2.0, -2.0, 0.0),
        (-2.0, 0.5, 0.1, 0.3),
        (3.0, 3.0, 1.0, 2.0),
        (0.0, 4.0, -3.0, 3.0),
    ];
    let (mut de, mut dp) = (0.0f64, 0.0f64);
    let mut legendre_gap = 0.0f64;
    for &(x, y, vx, vy) in &starts {
        let s0 = TangentState::new(pt(x, y), TangentVector::new(vx, vy));
        let t = integrate_tangent(SystemKind::Magnetic, &s0, 10.0, DT).unwrap();
        de = de.max(t.drift.energy);
        dp = dp.max(t.drift.momentum_x);
        for kind in [SystemKind::Magnetic, SystemKind::Kinetic] {
            let el = integrate_tangent(kind, &s0, 5.0, DT).unwrap();
            let ham = integrate_cotangent(kind, &legendre(kind, &s0), 5.0, DT).unwrap();
            for (a, b) in el.samples.iter().zip(&ham.samples) {
                let [x, y, vx, vy] = a.state;
                let p = legendre(kind, &TangentState::new(pt(x, y), TangentVector::new(vx, vy)));
                let gap = p.to_array().iter().zip(&b.state).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
                legendre_gap = legendre_gap.max(gap);
            }
        }
    }
    Outcome::new(
        de < 1e-8 && dp < 1e-8 && legendre_gap < 1e-7,
        format!("energy drift {de:.2e}, momentum drift {dp:.2e}, Legendre conjugacy {legendre_gap:.2e}"),
    )
}

/// `∫∫ dx dy / y²` over a rectangle.
fn enclosed_area(x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    simpson(|_| simpson(|y| 1.0 / (y * y), y0, y1, 400), x0, x1, 4)
}

fn closedness_exactness() -> Outcome {
    let grid = GridSpec::STANDARD;
    let mut forms: Vec<OneForm> = Vec::new();
    for a in a_set() {
        forms.push(foliation_to_graph(a));
        forms.push(geodesic_endpoint_graph(a));
        if let TangencyPoint::Finite(a) = a {
            forms.push(geodesic_center_graph(a));
        }
    }
    let members = catalog(&CATALOG_A);
    forms.extend(members.iter().map(gradient_form));
    let curl = forms.iter().map(|f| check_closed(f, &grid, FD_STEP)).fold(0.0, f64::max);
    let loops = [square_loop(&pt(0.5, 1.0), 0.5), square_loop(&pt(-1.0, 3.0), 2.0), square_loop(&pt(2.0, 0.5), 0.3)];
    let exact =
        forms.iter().flat_map(|f| loops.iter().map(move |l| check_exact(f, l, LOOP_NODES).abs())).fold(0.0, f64::max);
    let eta_loop = check_exact(&OneForm::eta(), &square_loop(&pt(0.0, 2.0), 1.0), LOOP_NODES);
    let stokes = (eta_loop - enclosed_area(-1.0, 1.0, 1.0, 3.0)).abs();
    Outcome::new(
        curl < 1e-6 && exact < 1e-8 && stokes < 1e-6,
        format!(
            "{} forms: max curl {curl:.2e}, max loop integral {exact:.2e}, Stokes control {stokes:.2e}",
            forms.len()
        ),
    )
}

/// Orbits at energy `k < ½` are hyperbolic circles of radius `R` with
/// `tanh R = √(2k)` and length `2π sinh R`, traversed at speed `√(2k)`.
fn period_oracle(k: f64) -> f64 {
    2.0 * PI / (1.0 - 2.0 * k).sqrt()
}

/// Frozen outputs of `detect_period` at dt = 1e−3.
const PINNED_PERIODS: [(f64, f64); 2] = [(0.125, 7.255_197_456_936_9), (0.245, 8.798_219_249_901_2)];

fn subcritical_periodicity() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    let mut means = Vec::new();
    for (k, pinned) in PINNED_PERIODS {
        let speed = (2.0 * k).sqrt();
        let mut periods = Vec::new();
        for &(x, y, angle) in &PERIOD_STARTS {
            let s0 = TangentState::new(pt(x, y), TangentVector::new(y * speed * angle.cos(), y * speed * angle.sin()));
            match detect_period(energy(&s0), &s0, PeriodOptions::default()) {
                Ok(p) => periods.push(p),
                Err(e) => {
                    pass = false;
                    details.push(format!("k={k}: {e}"));
                }
            }
        }
        if periods.len() < 5 {
            pass = false;
            continue;
        }
        let lo = periods.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = periods.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = periods.iter().sum::<f64>() / periods.len() as f64;
        let spread = (hi - lo) / mean;
        let pinned_err = (mean - pinned).abs() / pinned;
        let oracle_err = (mean - period_oracle(k)).abs() / period_oracle(k);
        pass &= spread < 1e-4 && pinned_err < 1e-9 && oracle_err < 1e-6;
        means.push(mean);
        details.push(format!("k={k}: period {mean:.10} over {} starts, spread {spread:.1e}", periods.len()));
    }
    pass &= means.len() == 2 && (means[0] - means[1]).abs() > 1e-3;
    Outcome::new(pass, details.join("; "))
}

fn mane_value() -> Outcome {
    let start = Instant::now();
    let mut candidates: Vec<HJSolution> = a_set().into_iter().map(HJSolution::magnetic).collect();
    candidates.push(HJSolution::constant(0.0));
    let (mut upper_err, mut variance) = (0.0f64, 0.0f64);
    for u in &candidates {
        let b = upper_bound(u, &GridSpec::STANDARD);
        upper_err = upper_err.max((b.value - 0.5).abs());
        variance = variance.max(b.variance);
    }
    let lower = CurveFamily::hyperbolic_standard().lower_bound().map(|l| l.value).unwrap_or(f64::NAN);
    let elapsed = start.elapsed();
    Outcome::new(
        upper_err < 1e-9
            && variance < 1e-18
            && (0.48..=0.5 + 1e-6).contains(&lower)
            && elapsed < Duration::from_secs(30),
        format!("upper 0.5 ± {upper_err:.1e} (variance {variance:.1e}), lower {lower:.6}, {elapsed:.2?}"),
    )
}

fn foliation_well_defined() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED);
    let (mut round_trip, mut leaf) = (0.0f64, 0.0f64);
    for &a in &CATALOG_A {
        for _ in 0..10_000 {
            let q = pt(rng.gen_range(-5.0..5.0), rng.gen_range(0.1..10.0));
            let (t, b) = horocycle_invert(a, &q);
            let back = horocycle(a, b, t).unwrap().q;
            round_trip = round_trip.max((back.x() - q.x()).abs().max((back.y() - q.y()).abs()));
            // another point of the same leaf carries the same index
            let other = horocycle(a, b, t + rng.gen_range(-3.0..3.0)).unwrap().q;
            leaf = leaf.max((horocycle_invert(a, &other).1 - b).abs() / b);
        }
    }
    Outcome::new(
        round_trip < 1e-12 && leaf < 1e-12,
        format!("round trip {round_trip:.2e}, leaf index spread {leaf:.2e} over 3 x 10^4 points"),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 HJ residual suite", hj_residuals),
        ("2 level check", level_check),
        ("3 graph invariance", graph_invariance),
        ("4 integrator vs closed form", integrator_vs_closed_form),
        ("5 conservation and Legendre conjugacy", conservation),
        ("6 closedness and exactness", closedness_exactness),
        ("7 subcritical periodicity", subcritical_periodicity),
        ("8 Mane critical value", mane_value),
        ("9 foliation well-definedness", foliation_well_defined),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = check();
        if !outcome.pass {
            failed += 1;
        }
        println!("{} {name}: {}", if outcome.pass { "PASS" } else { "FAIL" }, outcome.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
