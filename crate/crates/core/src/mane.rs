//! Two-sided numerical bounds on the Mañé critical value of the magnetic
//! Lagrangian.
//!
//! * Upper bound: for any smooth `u`, `c(L) ≤ sup_q ½‖du − η‖²_q`.
//! * Lower bound: for any closed curve `γ` of period `τ`,
//!   `c(L) ≥ −(1/τ) ∫₀^τ L(γ, γ̇) dt`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::closed_forms::Sign;
use crate::geom::{dual_norm, eta, GeomError, HalfPlanePoint, TangentVector};
use crate::grid::GridSpec;
use crate::hj::Potential;
use crate::mechanics::{lagrangian, SystemKind, TangentState};
use crate::quadrature::{periodic_mean, Rule};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ManeError {
    #[error("curve {label} leaves the half-plane: {source}")]
    CurveLeavesDomain { label: String, source: GeomError },
    #[error("invalid curve parameter: {0}")]
    InvalidParameter(String),
    #[error("empty curve family")]
    EmptyFamily,
}

/// A smooth closed curve `γ: ℝ/τℤ → ℍ` with its velocity.
pub trait ClosedCurve: Send + Sync {
    fn label(&self) -> String;
    fn period(&self) -> f64;
    fn state(&self, t: f64) -> Result<TangentState, GeomError>;
}

/// Hyperbolic circle traversed at constant hyperbolic speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicCircle {
    center: HalfPlanePoint,
    radius: f64,
    speed: f64,
    orientation: Sign,
}

impl HyperbolicCircle {
    /// `radius` and `speed` are hyperbolic. `Minus` is clockwise.
    pub fn new(center: HalfPlanePoint, radius: f64, speed: f64, orientation: Sign) -> Result<Self, ManeError> {
        if !(radius > 0.0 && radius.is_finite()) || !(speed > 0.0 && speed.is_finite()) {
            return Err(ManeError::InvalidParameter(format!("radius {radius}, speed {speed}")));
        }
        Ok(Self { center, radius, speed, orientation })
    }
}

impl ClosedCurve for HyperbolicCircle {
    fn label(&self) -> String {
        format!(
            "hcircle[c={}, R={}, speed={}, {}]",
            self.center,
            self.radius,
            self.speed,
            if self.orientation == Sign::Plus { "ccw" } else { "cw" }
        )
    }

    fn period(&self) -> f64 {
        2.0 * PI * self.radius.sinh() / self.speed
    }

    /// The image under `w ↦ x₀ + y₀·i(1 + w)/(1 − w)` of a uniformly rotating
    /// point of the disk model at radius `tanh(R/2)`.
    fn state(&self, t: f64) -> Result<TangentState, GeomError> {
        let rho = (0.5 * self.radius).tanh();
        let omega = self.orientation.value() * 2.0 * PI / self.period();
        let w = Complex64::from_polar(rho, omega * t);
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let (x0, y0) = (self.center.x(), self.center.y());
        let z = x0 + y0 * i * (one + w) / (one - w);
        let dw = i * omega * w;
        let dz = y0 * 2.0 * i / ((one - w) * (one - w)) * dw;
        Ok(TangentState::new(HalfPlanePoint::new(z.re, z.im)?, TangentVector::new(dz.re, dz.im)))
    }
}

/// Euclidean circle centered at `(0, center_y)` traversed at constant
/// Euclidean speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanCircle {
    center_y: f64,
    radius: f64,
    speed: f64,
    orientation: Sign,
}

impl EuclideanCircle {
    pub fn new(center_y: f64, radius: f64, speed: f64, orientation: Sign) -> Result<Self, ManeError> {
        if !(radius > 0.0) || !(speed > 0.0) || !(center_y > 0.0) {
            return Err(ManeError::InvalidParameter(format!("center {center_y}, radius {radius}, speed {speed}")));
        }
        Ok(Self { center_y, radius, speed, orientation })
    }
}

impl ClosedCurve for EuclideanCircle {
    fn label(&self) -> String {
        format!(
            "ecircle[y0={}, r={}, speed={}, {}]",
            self.center_y,
            self.radius,
            self.speed,
            if self.orientation == Sign::Plus { "ccw" } else { "cw" }
        )
    }

    fn period(&self) -> f64 {
        2.0 * PI * self.radius / self.speed
    }

    fn state(&self, t: f64) -> Result<TangentState, GeomError> {
        let omega = self.orientation.value() * self.speed / self.radius;
        let (s, c) = (omega * t).sin_cos();
        let q = HalfPlanePoint::new(self.radius * c, self.center_y + self.radius * s)?;
        Ok(TangentState::new(q, TangentVector::new(-self.radius * omega * s, self.radius * omega * c)))
    }
}

fn curve_mean<C: ClosedCurve + ?Sized, F>(curve: &C, rule: Rule, nodes: usize, f: F) -> Result<f64, ManeError>
where
    F: Fn(&TangentState) -> f64,
{
    let tau = curve.period();
    // validate every node before integrating
    let h = tau / nodes.max(1) as f64;
    for i in 0..nodes.max(1) {
        curve.state(h * i as f64).map_err(|source| ManeError::CurveLeavesDomain { label: curve.label(), source })?;
    }
    Ok(periodic_mean(rule, |t| f(&curve.state(t).expect("validated above")), tau, nodes))
}

/// `(1/τ) ∫ L(γ, γ̇) dt` for the magnetic Lagrangian.
pub fn average_action<C: ClosedCurve + ?Sized>(curve: &C, rule: Rule, nodes: usize) -> Result<f64, ManeError> {
    curve_mean(curve, rule, nodes, |s| lagrangian(SystemKind::Magnetic, s))
}

/// `(1/τ) ∫ η(γ̇) dt`, the magnetic part of the average action.
pub fn average_magnetic_term<C: ClosedCurve + ?Sized>(curve: &C, rule: Rule, nodes: usize) -> Result<f64, ManeError> {
    curve_mean(curve, rule, nodes, |s| eta(&s.q).apply(s.v))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBound {
    pub value: f64,
    pub best_curve: String,
    pub curves: usize,
}

/// `max_γ −(1/τ)∫L` over the given curves. Each term is a valid lower bound
/// for `c(L)`; ties resolve to the earliest curve.
pub fn lower_bound<C: ClosedCurve>(curves: &[C], rule: Rule, nodes: usize) -> Result<LowerBound, ManeError> {
    if curves.is_empty() {
        return Err(ManeError::EmptyFamily);
    }
    let values: Vec<f64> =
        curves.par_iter().map(|c| average_action(c, rule, nodes).map(|a| -a)).collect::<Result<_, _>>()?;
    let (best, value) =
        values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    Ok(LowerBound { value, best_curve: curves[best].label(), curves: curves.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpperBound {
    /// `sup` of the integrand over the grid.
    pub value: f64,
    pub mean: f64,
    pub variance: f64,
}

/// `sup_q ½‖du(q) − η(q)‖²_q` over the grid, with the integrand's mean and
/// variance.
pub fn upper_bound<P: Potential + ?Sized>(u: &P, grid: &GridSpec) -> UpperBound {
    let values: Vec<f64> = grid
        .points()
        .par_iter()
        .map(|q| {
            let n = dual_norm(q, u.gradient(q) - eta(q));
            0.5 * n * n
        })
        .collect();
    let len = values.len() as f64;
    let value = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / len;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / len;
    UpperBound { value, mean, variance }
}

/// Sampled parameter sets for the lower bound.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveFamily {
    Hyperbolic { label: String, curves: Vec<HyperbolicCircle>, rule: Rule, nodes: usize },
    Euclidean { label: String, curves: Vec<EuclideanCircle>, rule: Rule, nodes: usize },
}

fn steps(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

impl CurveFamily {
    fn hyperbolic(label: &str, heights: &[f64], radii: &[f64], speeds: &[f64], nodes: usize) -> Self {
        let mut curves = Vec::new();
        for &y0 in heights {
            let center = HalfPlanePoint::new(0.0, y0).expect("positive height");
            for &r in radii {
                for &s in speeds {
                    for o in [Sign::Minus, Sign::Plus] {
                        curves.push(HyperbolicCircle::new(center, r, s, o).expect("positive parameters"));
                    }
                }
            }
        }
        CurveFamily::Hyperbolic { label: label.to_string(), curves, rule: Rule::Trapezoid, nodes }
    }

    /// Centers at heights {1, 2, 4}, hyperbolic radius 0.25..5, speed
    /// 0.05..1.5, both orientations, 2048 trapezoid nodes.
    pub fn hyperbolic_standard() -> Self {
        Self::hyperbolic("hyperbolic-circles", &[1.0, 2.0, 4.0], &steps(0.25, 5.0, 0.25), &steps(0.05, 1.5, 0.05), 2048)
    }

    /// Radii 5..7.5 and speeds 0.9..1.05 around the optimum `σ = tanh(R/2)`,
    /// 16384 nodes.
    pub fn hyperbolic_refined() -> Self {
        Self::hyperbolic("hyperbolic-circles-refined", &[1.0], &steps(5.0, 7.5, 0.5), &steps(0.9, 1.05, 0.005), 16384)
    }

    /// Centers at heights {1, 2, 4}, radius ratio r/y₀ ∈ {0.1, …, 0.9},
    /// Euclidean speed {0.1, …, 1.5}, both orientations, Simpson with 2048 nodes.
    pub fn euclidean_standard() -> Self {
        let mut curves = Vec::new();
        for y0 in [1.0, 2.0, 4.0] {
            for ratio in steps(0.1, 0.9, 0.1) {
                for s in steps(0.1, 1.5, 0.1) {
                    for o in [Sign::Minus, Sign::Plus] {
                        curves.push(EuclideanCircle::new(y0, ratio * y0, s, o).expect("positive parameters"));
                    }
                }
            }
        }
        CurveFamily::Euclidean { label: "euclidean-circles".to_string(), curves, rule: Rule::Simpson, nodes: 2048 }
    }

    pub fn label(&self) -> &str {
        match self {
            CurveFamily::Hyperbolic { label, .. } | CurveFamily::Euclidean { label, .. } => label,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            CurveFamily::Hyperbolic { curves, .. } => curves.len(),
            CurveFamily::Euclidean { curves, .. } => curves.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lower_bound(&self) -> Result<LowerBound, ManeError> {
        match self {
            CurveFamily::Hyperbolic { curves, rule, nodes, .. } => lower_bound(curves, *rule, *nodes),
            CurveFamily::Euclidean { curves, rule, nodes, .. } => lower_bound(curves, *rule, *nodes),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalEstimate {
    pub upper: f64,
    pub lower: f64,
    pub gap: f64,
    pub candidate: String,
    pub curves: String,
    pub upper_variance: f64,
    pub best_curve: String,
}

/// Both bounds for one candidate and one curve family.
pub fn estimate<P: Potential + ?Sized>(
    u: &P,
    grid: &GridSpec,
    family: &CurveFamily,
) -> Result<CriticalEstimate, ManeError> {
    let up = upper_bound(u, grid);
    let lo = family.lower_bound()?;
    Ok(CriticalEstimate {
        upper: up.value,
        lower: lo.value,
        gap: up.value - lo.value,
        candidate: u.label(),
        curves: family.label().to_string(),
        upper_variance: up.variance,
        best_curve: lo.best_curve,
    })
}
