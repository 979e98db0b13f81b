//! Smooth Hamilton-Jacobi solutions and the checks that certify them.
//!
//! The magnetic catalog is `{c} ∪ {2·arctan((x−a)/y) + c}`. The kinetic
//! catalog contains `±log y`, `±(log y − log((x−a)² + y²))` and
//! `±arcsinh((x−a)/y)`, each up to a constant; it is not exhaustive.
//!
//! Verification covers the PDE residual, the level `H(q, du) = ½`, the
//! closedness and exactness of the associated 1-forms, and invariance of the
//! graph `{(q, du(q))}` under the Hamiltonian flow.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::closed_forms::{geodesic_center_field, geodesic_endpoint_field, horocycle_unit_field, Sign, TangencyPoint};
use crate::flows::{integrate_cotangent, FlowError};
use crate::geom::{dual_norm, Covector, HalfPlanePoint, OneForm};
use crate::grid::GridSpec;
use crate::mechanics::{hamiltonian, legendre, CotangentState, SystemKind, TangentState};
use crate::quadrature::simpson;

/// Simpson nodes per polyline edge used by default for loop integrals.
pub const LOOP_NODES: usize = 1000;

/// Relative finite-difference step: `h = FD_STEP · max(1, |x|, y)`.
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HjError {
    #[error("family {family} requires a finite tangency point")]
    NeedsFinitePoint { family: Family },
    #[error("start point is off the level set: |H - 1/2| = {0:e}")]
    OffLevel(f64),
    #[error(transparent)]
    Flow(#[from] FlowErrorSummary),
}

/// Flow failures without the partial trajectory, so `HjError` stays cheap to clone.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct FlowErrorSummary(pub String);

impl From<FlowError> for HjError {
    fn from(e: FlowError) -> Self {
        HjError::Flow(FlowErrorSummary(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    MagneticArctan,
    Constant,
    GeodesicLogVertical,
    GeodesicLogEndpoint,
    GeodesicArcsinh,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::MagneticArctan,
        Family::Constant,
        Family::GeodesicLogVertical,
        Family::GeodesicLogEndpoint,
        Family::GeodesicArcsinh,
    ];

    /// The system whose Hamilton-Jacobi equation this family solves.
    pub fn system(self) -> SystemKind {
        match self {
            Family::MagneticArctan | Family::Constant => SystemKind::Magnetic,
            _ => SystemKind::Kinetic,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Family::MagneticArctan => "arctan",
            Family::Constant => "constant",
            Family::GeodesicLogVertical => "log-vertical",
            Family::GeodesicLogEndpoint => "log-endpoint",
            Family::GeodesicArcsinh => "arcsinh",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL.into_iter().find(|f| f.as_str() == s).ok_or_else(|| format!("unknown family `{s}`"))
    }
}

/// A scalar function on the half-plane with an analytic gradient.
pub trait Potential: Send + Sync {
    fn label(&self) -> String;
    fn value(&self, q: &HalfPlanePoint) -> f64;
    fn gradient(&self, q: &HalfPlanePoint) -> Covector;
}

/// One member of the solution catalog.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HJSolution {
    family: Family,
    a: TangencyPoint,
    sign: Sign,
    c: f64,
}

impl HJSolution {
    /// `2·arctan((x−a)/y)`; `a = ∞` gives `u ≡ 0`.
    pub fn magnetic(a: TangencyPoint) -> Self {
        Self { family: Family::MagneticArctan, a, sign: Sign::Plus, c: 0.0 }
    }

    pub fn constant(c: f64) -> Self {
        Self { family: Family::Constant, a: TangencyPoint::Infinity, sign: Sign::Plus, c }
    }

    /// `±log y`.
    pub fn log_vertical(sign: Sign) -> Self {
        Self { family: Family::GeodesicLogVertical, a: TangencyPoint::Infinity, sign, c: 0.0 }
    }

    /// `±(log y − log((x−a)² + y²))`; `a = ∞` gives `±log y`.
    pub fn log_endpoint(a: TangencyPoint, sign: Sign) -> Self {
        Self { family: Family::GeodesicLogEndpoint, a, sign, c: 0.0 }
    }

    /// `±arcsinh((x−a)/y)`.
    pub fn arcsinh(a: f64, sign: Sign) -> Self {
        Self { family: Family::GeodesicArcsinh, a: TangencyPoint::Finite(a), sign, c: 0.0 }
    }

    /// Generic constructor with validation of the family/parameter combination.
    pub fn from_parts(family: Family, a: TangencyPoint, sign: Sign, c: f64) -> Result<Self, HjError> {
        let base = match family {
            Family::MagneticArctan => Self::magnetic(a),
            Family::Constant => Self::constant(0.0),
            Family::GeodesicLogVertical => Self::log_vertical(sign),
            Family::GeodesicLogEndpoint => Self::log_endpoint(a, sign),
            Family::GeodesicArcsinh => match a {
                TangencyPoint::Finite(a) => Self::arcsinh(a, sign),
                TangencyPoint::Infinity => return Err(HjError::NeedsFinitePoint { family }),
            },
        };
        Ok(base.with_constant(c))
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    /// The same solution with the opposite sign (geodesic families only;
    /// magnetic members are returned unchanged).
    pub fn negated(mut self) -> Self {
        if self.family.system() == SystemKind::Kinetic {
            self.sign = self.sign.flip();
            self.c = -self.c;
        }
        self
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn a(&self) -> TangencyPoint {
        self.a
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn constant_term(&self) -> f64 {
        self.c
    }

    pub fn system(&self) -> SystemKind {
        self.family.system()
    }

    /// Value of the solution without sign or additive constant.
    fn base_value(&self, q: &HalfPlanePoint) -> f64 {
        let (x, y) = (q.x(), q.y());
        match (self.family, self.a) {
            (Family::Constant, _) | (Family::MagneticArctan, TangencyPoint::Infinity) => 0.0,
            (Family::MagneticArctan, TangencyPoint::Finite(a)) => 2.0 * ((x - a) / y).atan(),
            (Family::GeodesicLogVertical, _) | (Family::GeodesicLogEndpoint, TangencyPoint::Infinity) => y.ln(),
            (Family::GeodesicLogEndpoint, TangencyPoint::Finite(a)) => {
                let dx = x - a;
                y.ln() - (dx * dx + y * y).ln()
            }
            (Family::GeodesicArcsinh, TangencyPoint::Finite(a)) => ((x - a) / y).asinh(),
            (Family::GeodesicArcsinh, TangencyPoint::Infinity) => unreachable!("validated at construction"),
        }
    }

    fn base_gradient(&self, q: &HalfPlanePoint) -> Covector {
        let (x, y) = (q.x(), q.y());
        match (self.family, self.a) {
            (Family::Constant, _) | (Family::MagneticArctan, TangencyPoint::Infinity) => Covector::new(0.0, 0.0),
            (Family::MagneticArctan, TangencyPoint::Finite(a)) => {
                let dx = x - a;
                let s = dx * dx + y * y;
                Covector::new(2.0 * y / s, -2.0 * dx / s)
            }
            (Family::GeodesicLogVertical, _) | (Family::GeodesicLogEndpoint, TangencyPoint::Infinity) => {
                Covector::new(0.0, 1.0 / y)
            }
            (Family::GeodesicLogEndpoint, TangencyPoint::Finite(a)) => {
                let dx = x - a;
                let s = dx * dx + y * y;
                Covector::new(-2.0 * dx / s, (dx * dx - y * y) / (y * s))
            }
            (Family::GeodesicArcsinh, TangencyPoint::Finite(a)) => {
                let dx = x - a;
                let r = dx.hypot(y);
                Covector::new(1.0 / r, -dx / (y * r))
            }
            (Family::GeodesicArcsinh, TangencyPoint::Infinity) => unreachable!("validated at construction"),
        }
    }
}

impl Potential for HJSolution {
    fn label(&self) -> String {
        let mut s = match self.family {
            Family::Constant => "constant".to_string(),
            Family::GeodesicLogVertical => format!("{}log-vertical", self.sign),
            Family::MagneticArctan => format!("arctan[a={}]", self.a),
            f => format!("{}{}[a={}]", self.sign, f, self.a),
        };
        if self.c != 0.0 || self.family == Family::Constant {
            s.push_str(&format!("{:+}", self.c));
        }
        s
    }

    fn value(&self, q: &HalfPlanePoint) -> f64 {
        self.sign.value() * self.base_value(q) + self.c
    }

    fn gradient(&self, q: &HalfPlanePoint) -> Covector {
        let g = self.base_gradient(q);
        let s = self.sign.value();
        Covector::new(s * g.px, s * g.py)
    }
}

/// Functions outside the catalog, used as negative controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdHoc {
    /// `u(x, y) = x`.
    LinearX,
    /// `u + ε·x` for a catalog member `u`.
    Perturbed { base: HJSolution, eps: f64 },
}

impl Potential for AdHoc {
    fn label(&self) -> String {
        match self {
            AdHoc::LinearX => "adhoc-x".to_string(),
            AdHoc::Perturbed { base, eps } => format!("{}{:+}*x", base.label(), eps),
        }
    }

    fn value(&self, q: &HalfPlanePoint) -> f64 {
        match self {
            AdHoc::LinearX => q.x(),
            AdHoc::Perturbed { base, eps } => base.value(q) + eps * q.x(),
        }
    }

    fn gradient(&self, q: &HalfPlanePoint) -> Covector {
        match self {
            AdHoc::LinearX => Covector::new(1.0, 0.0),
            AdHoc::Perturbed { base, eps } => base.gradient(q) + Covector::new(*eps, 0.0),
        }
    }
}

pub fn evaluate<P: Potential + ?Sized>(u: &P, q: &HalfPlanePoint) -> f64 {
    u.value(q)
}

pub fn gradient<P: Potential + ?Sized>(u: &P, q: &HalfPlanePoint) -> Covector {
    u.gradient(q)
}

fn fd_step(q: &HalfPlanePoint) -> f64 {
    FD_STEP * 1f64.max(q.x().abs()).max(q.y())
}

/// Central-difference gradient of `u` at `q`.
pub fn fd_gradient<P: Potential + ?Sized>(u: &P, q: &HalfPlanePoint) -> Covector {
    let h = fd_step(q);
    let at = |x: f64, y: f64| u.value(&HalfPlanePoint::new(x, y).expect("fd stencil stays in the half-plane"));
    let (x, y) = (q.x(), q.y());
    Covector::new((at(x + h, y) - at(x - h, y)) / (2.0 * h), (at(x, y + h) - at(x, y - h)) / (2.0 * h))
}

/// Hamilton-Jacobi residual for a given covector `du` at `q`.
///
/// Magnetic: `(y²/2)|du|² − y·u_x − (k − ½)`. Kinetic: `|du|² − 2k/y²`.
pub fn residual_of_covector(kind: SystemKind, q: &HalfPlanePoint, du: Covector, k: f64) -> f64 {
    let y = q.y();
    let g2 = du.px * du.px + du.py * du.py;
    match kind {
        SystemKind::Magnetic => 0.5 * y * y * g2 - y * du.px - (k - 0.5),
        SystemKind::Kinetic => g2 - 2.0 * k / (y * y),
    }
}

pub fn residual<P: Potential + ?Sized>(kind: SystemKind, u: &P, q: &HalfPlanePoint, k: f64) -> f64 {
    residual_of_covector(kind, q, u.gradient(q), k)
}

/// Distance of `H(q, du(q))` from ½.
pub fn level_deviation<P: Potential + ?Sized>(kind: SystemKind, u: &P, q: &HalfPlanePoint) -> f64 {
    (hamiltonian(kind, &CotangentState::new(*q, u.gradient(q))) - 0.5).abs()
}

/// `max_q |H(q, du(q)) − ½|` over the grid.
pub fn check_level<P: Potential + ?Sized>(kind: SystemKind, u: &P, grid: &GridSpec) -> f64 {
    grid.points().par_iter().map(|q| level_deviation(kind, u, q)).reduce(|| 0.0, f64::max)
}

/// `∂_y α_x − ∂_x α_y` at `q` by central differences.
pub fn fd_curl(alpha: &OneForm, q: &HalfPlanePoint, h_rel: f64) -> f64 {
    let h = h_rel * 1f64.max(q.x().abs()).max(q.y());
    let at = |x: f64, y: f64| alpha.at(&HalfPlanePoint::new(x, y).expect("fd stencil stays in the half-plane"));
    let (x, y) = (q.x(), q.y());
    let dy_ax = (at(x, y + h).px - at(x, y - h).px) / (2.0 * h);
    let dx_ay = (at(x + h, y).py - at(x - h, y).py) / (2.0 * h);
    dy_ax - dx_ay
}

/// Largest finite-difference curl magnitude of `alpha` over the grid.
pub fn check_closed(alpha: &OneForm, grid: &GridSpec, h_rel: f64) -> f64 {
    grid.points().par_iter().map(|q| fd_curl(alpha, q, h_rel).abs()).reduce(|| 0.0, f64::max)
}

/// Line integral of `alpha` around the closed polyline through `vertices`
/// (the last vertex joins the first), with composite Simpson on each edge.
pub fn check_exact(alpha: &OneForm, vertices: &[HalfPlanePoint], nodes_per_edge: usize) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| {
            let (p, r) = (vertices[i], vertices[(i + 1) % n]);
            let (dx, dy) = (r.x() - p.x(), r.y() - p.y());
            simpson(
                |s| {
                    let q = HalfPlanePoint::new(p.x() + s * dx, p.y() + s * dy)
                        .expect("edge between half-plane points stays in the half-plane");
                    let a = alpha.at(&q);
                    a.px * dx + a.py * dy
                },
                0.0,
                1.0,
                nodes_per_edge,
            )
        })
        .sum()
}

/// Axis-aligned square loop, counterclockwise, with half-side `half`.
pub fn square_loop(center: &HalfPlanePoint, half: f64) -> Vec<HalfPlanePoint> {
    let (x, y) = (center.x(), center.y());
    [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
        .iter()
        .map(|(sx, sy)| HalfPlanePoint::new(x + sx * half, y + sy * half).expect("square must lie in the half-plane"))
        .collect()
}

/// The 1-form `du` of a potential.
pub fn gradient_form<P: Potential + Clone + 'static>(u: &P) -> OneForm {
    let u2 = u.clone();
    OneForm::new(format!("d({})", u.label()), move |q| u2.gradient(q))
}

/// `Σ_a`: the magnetic Legendre image of the horocycle foliation at `a`, as a 1-form.
pub fn foliation_to_graph(a: TangencyPoint) -> OneForm {
    OneForm::new(format!("sigma[a={a}]"), move |q| {
        legendre(SystemKind::Magnetic, &TangentState::new(*q, horocycle_unit_field(a, q))).p
    })
}

/// Kinetic Legendre image of the geodesic foliation ending at `a`.
pub fn geodesic_endpoint_graph(a: TangencyPoint) -> OneForm {
    OneForm::new(format!("sigma-endpoint[a={a}]"), move |q| {
        legendre(SystemKind::Kinetic, &TangentState::new(*q, geodesic_endpoint_field(a, q))).p
    })
}

/// Kinetic Legendre image of the geodesic foliation centered at `a`.
pub fn geodesic_center_graph(a: f64) -> OneForm {
    OneForm::new(format!("sigma-center[a={a}]"), move |q| {
        legendre(SystemKind::Kinetic, &TangentState::new(*q, geodesic_center_field(a, q))).p
    })
}

/// Runs the Hamiltonian flow from `start` and returns the largest
/// `‖p(t) − du(q(t))‖_{q(t)}` over the samples. No level check.
pub fn graph_deviation<P: Potential + ?Sized>(
    kind: SystemKind,
    u: &P,
    start: &CotangentState,
    duration: f64,
    dt: f64,
) -> Result<f64, FlowError> {
    let traj = integrate_cotangent(kind, start, duration, dt)?;
    Ok(traj
        .samples
        .iter()
        .map(|s| {
            let q = HalfPlanePoint::new(s.state[0], s.state[1]).expect("trajectory samples are valid");
            dual_norm(&q, Covector::new(s.state[2], s.state[3]) - u.gradient(&q))
        })
        .fold(0.0, f64::max))
}

/// Invariance of the graph of `du` under the Hamiltonian flow, starting on
/// the graph at `q0`. Requires `|H(q0, du(q0)) − ½| ≤ 1e−10`.
pub fn check_graph_invariance<P: Potential + ?Sized>(
    kind: SystemKind,
    u: &P,
    q0: &HalfPlanePoint,
    duration: f64,
    dt: f64,
) -> Result<f64, HjError> {
    let dev = level_deviation(kind, u, q0);
    if dev > 1e-10 {
        return Err(HjError::OffLevel(dev));
    }
    Ok(graph_deviation(kind, u, &CotangentState::new(*q0, u.gradient(q0)), duration, dt)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualTolerances {
    pub analytic: f64,
    pub finite_difference: f64,
    pub gradient: f64,
}

impl Default for ResidualTolerances {
    fn default() -> Self {
        Self { analytic: 1e-12, finite_difference: 1e-5, gradient: 1e-5 }
    }
}

/// Residual statistics of one candidate over a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub solution: String,
    pub system: SystemKind,
    pub level: f64,
    pub grid: GridSpec,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub max_residual_fd: f64,
    pub max_grad_mismatch: f64,
    pub pass: bool,
}

/// Sweeps the grid computing the residual with analytic and finite-difference
/// gradients, and the mismatch between the two gradients.
pub fn residual_report<P: Potential + ?Sized>(
    kind: SystemKind,
    u: &P,
    grid: &GridSpec,
    k: f64,
    tol: &ResidualTolerances,
) -> ResidualReport {
    let points = grid.points();
    let per_point: Vec<(f64, f64, f64)> = points
        .par_iter()
        .map(|q| {
            let g = u.gradient(q);
            let gfd = fd_gradient(u, q);
            let r = residual_of_covector(kind, q, g, k).abs();
            let rfd = residual_of_covector(kind, q, gfd, k).abs();
            let mismatch = (g.px - gfd.px).abs().max((g.py - gfd.py).abs());
            (r, rfd, mismatch)
        })
        .collect();
    let max_residual = per_point.iter().map(|p| p.0).fold(0.0, f64::max);
    let mean_residual = per_point.iter().map(|p| p.0).sum::<f64>() / per_point.len() as f64;
    let max_residual_fd = per_point.iter().map(|p| p.1).fold(0.0, f64::max);
    let max_grad_mismatch = per_point.iter().map(|p| p.2).fold(0.0, f64::max);
    let pass =
        max_residual < tol.analytic && max_residual_fd < tol.finite_difference && max_grad_mismatch < tol.gradient;
    ResidualReport {
        solution: u.label(),
        system: kind,
        level: k,
        grid: *grid,
        max_residual,
        mean_residual,
        max_residual_fd,
        max_grad_mismatch,
        pass,
    }
}

/// Every catalog member used by the verification suites, for the tangency
/// points `a_values` (∞ added where the family defines it).
pub fn catalog(a_values: &[f64]) -> Vec<HJSolution> {
    let mut out = Vec::new();
    let with_inf: Vec<TangencyPoint> =
        a_values.iter().map(|&a| TangencyPoint::Finite(a)).chain(std::iter::once(TangencyPoint::Infinity)).collect();
    for &a in &with_inf {
        out.push(HJSolution::magnetic(a));
    }
    out.push(HJSolution::constant(0.0));
    for sign in [Sign::Plus, Sign::Minus] {
        out.push(HJSolution::log_vertical(sign));
        for &a in &with_inf {
            out.push(HJSolution::log_endpoint(a, sign));
        }
        for &a in a_values {
            out.push(HJSolution::arcsinh(a, sign));
        }
    }
    out
}
