//! Exact curves of the two flows and the unit tangent fields of their
//! invariant foliations.
//!
//! Horocycles tangent to the boundary at `a` are the projected orbits of the
//! magnetic flow at energy ½; semicircles and vertical lines are the geodesics.
//! Every tangent field here has hyperbolic norm 1.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::geom::{GeomError, HalfPlanePoint, TangentVector};
use crate::mechanics::TangentState;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ClosedFormError {
    #[error("horocycle index b must be positive, got {0}")]
    NonPositiveIndex(f64),
    #[error("geodesic_circle is degenerate at b = 0; use geodesic_vertical")]
    DegenerateIndex,
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("angle {theta} outside the open interval (0, {upper})")]
    AngleOutOfRange { theta: f64, upper: f64 },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// A point of the ideal boundary `ℝ ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TangencyPoint {
    Finite(f64),
    Infinity,
}

impl TangencyPoint {
    pub fn finite(self) -> Option<f64> {
        match self {
            TangencyPoint::Finite(a) => Some(a),
            TangencyPoint::Infinity => None,
        }
    }
}

impl fmt::Display for TangencyPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TangencyPoint::Finite(a) => write!(f, "{a}"),
            TangencyPoint::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for TangencyPoint {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(TangencyPoint::Infinity),
            other => match other.parse::<f64>() {
                Ok(a) if a.is_finite() => Ok(TangencyPoint::Finite(a)),
                _ => Err(format!("invalid boundary point `{other}` (expected a finite real or `inf`)")),
            },
        }
    }
}

impl Serialize for TangencyPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            TangencyPoint::Finite(a) => s.serialize_f64(*a),
            TangencyPoint::Infinity => s.serialize_str("inf"),
        }
    }
}

/// Orientation of a curve or sign of a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl FromStr for Sign {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+" | "plus" | "1" | "+1" => Ok(Sign::Plus),
            "-" | "minus" | "-1" => Ok(Sign::Minus),
            other => Err(format!("invalid sign `{other}` (expected + or -)")),
        }
    }
}

fn state(x: f64, y: f64, vx: f64, vy: f64) -> Result<TangentState, ClosedFormError> {
    Ok(TangentState::new(HalfPlanePoint::new(x, y)?, TangentVector::new(vx, vy)))
}

/// Arc-length horocycle tangent to the boundary at `a`, with leaf index `b`
/// (Euclidean diameter `1/b`).
pub fn horocycle(a: f64, b: f64, t: f64) -> Result<TangentState, ClosedFormError> {
    if !(b > 0.0) {
        return Err(ClosedFormError::NonPositiveIndex(b));
    }
    let w = 1.0 + t * t;
    let x = a + t / (b * w);
    let y = 1.0 / (b * w);
    let c = 1.0 / (b * w * w);
    state(x, y, c * (1.0 - t * t), c * (-2.0 * t))
}

/// Inverse of the horocycle parametrization: the `(t, b)` with
/// `horocycle(a, b, t).q == q`.
pub fn horocycle_invert(a: f64, q: &HalfPlanePoint) -> (f64, f64) {
    let dx = q.x() - a;
    let y = q.y();
    (dx / y, y / (dx * dx + y * y))
}

/// Unit tangent to the leaf through `q` of the horocycle foliation at `a`.
pub fn horocycle_unit_field(a: TangencyPoint, q: &HalfPlanePoint) -> TangentVector {
    let y = q.y();
    match a {
        TangencyPoint::Infinity => TangentVector::new(-y, 0.0),
        TangencyPoint::Finite(a) => {
            let dx = q.x() - a;
            let k = y / (dx * dx + y * y);
            TangentVector::new(k * (y * y - dx * dx), k * (-2.0 * dx * y))
        }
    }
}

/// Arc-length geodesic ending at `a` as `t → +∞`; `b` selects the leaf.
pub fn geodesic_circle(a: f64, b: f64, t: f64) -> Result<TangentState, ClosedFormError> {
    if b == 0.0 {
        return Err(ClosedFormError::DegenerateIndex);
    }
    let et = t.exp();
    let e2t = et * et;
    let d = b * b + e2t;
    let x = a - b / d;
    let y = et / d;
    let c = et / (d * d);
    state(x, y, c * 2.0 * et * b, c * (b * b - e2t))
}

/// `(t, b)` locating `q` on the geodesic foliation ending at `a`.
pub fn geodesic_circle_invert(a: f64, q: &HalfPlanePoint) -> (f64, f64) {
    let dx = q.x() - a;
    let y = q.y();
    let et = y / (dx * dx + y * y);
    (et.ln(), -et * dx / y)
}

/// Vertical geodesic through `x = b`; `Plus` moves upward (`y = e^t`),
/// `Minus` downward (`y = e^{-t}`).
pub fn geodesic_vertical(b: f64, t: f64, direction: Sign) -> Result<TangentState, ClosedFormError> {
    let s = direction.value();
    let y = (s * t).exp();
    state(b, y, 0.0, s * y)
}

/// Unit tangent field of the geodesic foliation whose leaves all end at `a`
/// (vertical lines, pointing up, for `a = ∞`).
pub fn geodesic_endpoint_field(a: TangencyPoint, q: &HalfPlanePoint) -> TangentVector {
    let y = q.y();
    match a {
        TangencyPoint::Infinity => TangentVector::new(0.0, y),
        TangencyPoint::Finite(a) => {
            let dx = q.x() - a;
            let k = y / (dx * dx + y * y);
            TangentVector::new(k * (-2.0 * dx * y), k * (dx * dx - y * y))
        }
    }
}

/// Unit tangent field of the foliation by geodesic semicircles centered at `a`,
/// oriented clockwise (increasing `x` at the top).
pub fn geodesic_center_field(a: f64, q: &HalfPlanePoint) -> TangentVector {
    let dx = q.x() - a;
    let y = q.y();
    let k = y / dx.hypot(y);
    TangentVector::new(k * y, -k * dx)
}

fn check_angle(theta: f64, upper: f64) -> Result<(), ClosedFormError> {
    if theta > 0.0 && theta < upper {
        Ok(())
    } else {
        Err(ClosedFormError::AngleOutOfRange { theta, upper })
    }
}

/// Polar chart of the horocycle foliation at 0: `r` is the Euclidean radius
/// of the leaf, `θ ∈ (0, 2π)` the position along it.
pub fn polar_horocycle(r: f64, theta: f64) -> Result<TangentState, ClosedFormError> {
    if !(r > 0.0) {
        return Err(ClosedFormError::NonPositiveRadius(r));
    }
    check_angle(theta, 2.0 * PI)?;
    let (s, c) = theta.sin_cos();
    let y = r * (1.0 - c);
    state(-r * s, y, -y * c, y * s)
}

/// `(r, θ)` of `q` in the chart of [`polar_horocycle`].
pub fn polar_horocycle_coords(q: &HalfPlanePoint) -> (f64, f64) {
    let (x, y) = (q.x(), q.y());
    let n = x * x + y * y;
    let sin = -2.0 * x * y / n;
    let cos = (x * x - y * y) / n;
    let mut theta = sin.atan2(cos);
    if theta <= 0.0 {
        theta += 2.0 * PI;
    }
    (n / (2.0 * y), theta)
}

/// Polar chart of the geodesic foliation centered at 0: `r` is the Euclidean
/// radius, `θ ∈ (0, π)`.
pub fn polar_geodesic(r: f64, theta: f64) -> Result<TangentState, ClosedFormError> {
    if !(r > 0.0) {
        return Err(ClosedFormError::NonPositiveRadius(r));
    }
    check_angle(theta, PI)?;
    let (s, c) = theta.sin_cos();
    let k = r * s;
    state(-r * c, k, k * s, k * c)
}
