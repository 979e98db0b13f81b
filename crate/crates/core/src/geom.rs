//! Primitives on the upper half-plane model of the hyperbolic plane.
//!
//! The metric is `g = (dx² + dy²) / y²` (curvature −1). The magnetic
//! potential is the 1-form `η = dx / y`, whose differential is the hyperbolic
//! area form.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Points with `y <= Y_MIN` are treated as having reached the ideal boundary.
pub const Y_MIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GeomError {
    #[error("point ({x}, {y}) is outside the half-plane (y must exceed {Y_MIN})")]
    OutsideHalfPlane { x: f64, y: f64 },
    #[error("non-finite coordinate in ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
}

/// A point `q = (x, y)` of the half-plane, `y > Y_MIN`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint {
    x: f64,
    y: f64,
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self, GeomError> {
        if !x.is_finite() || !y.is_finite() {
            return Err(GeomError::NonFinite { x, y });
        }
        if y <= Y_MIN {
            return Err(GeomError::OutsideHalfPlane { x, y });
        }
        Ok(Self { x, y })
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }
}

impl fmt::Display for HalfPlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Components `(v_x, v_y)` of a tangent vector at some basepoint.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TangentVector {
    pub vx: f64,
    pub vy: f64,
}

impl TangentVector {
    pub const fn new(vx: f64, vy: f64) -> Self {
        Self { vx, vy }
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(s * self.vx, s * self.vy)
    }
}

/// Components `(p_x, p_y)` of a covector at some basepoint.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Covector {
    pub px: f64,
    pub py: f64,
}

impl Covector {
    pub const fn new(px: f64, py: f64) -> Self {
        Self { px, py }
    }

    /// Pairing `α(v)`.
    pub fn apply(&self, v: TangentVector) -> f64 {
        self.px * v.vx + self.py * v.vy
    }
}

impl std::ops::Sub for Covector {
    type Output = Covector;
    fn sub(self, rhs: Covector) -> Covector {
        Covector::new(self.px - rhs.px, self.py - rhs.py)
    }
}

impl std::ops::Add for Covector {
    type Output = Covector;
    fn add(self, rhs: Covector) -> Covector {
        Covector::new(self.px + rhs.px, self.py + rhs.py)
    }
}

type Evaluator = dyn Fn(&HalfPlanePoint) -> Covector + Send + Sync;

/// A named covector field `q ↦ α_q` on the half-plane.
#[derive(Clone)]
pub struct OneForm {
    label: String,
    evaluator: Arc<Evaluator>,
}

impl OneForm {
    pub fn new<F>(label: impl Into<String>, evaluator: F) -> Self
    where
        F: Fn(&HalfPlanePoint) -> Covector + Send + Sync + 'static,
    {
        Self { label: label.into(), evaluator: Arc::new(evaluator) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn at(&self, q: &HalfPlanePoint) -> Covector {
        (self.evaluator)(q)
    }

    /// The magnetic potential `η = dx/y`.
    pub fn eta() -> Self {
        Self::new("eta", eta)
    }
}

impl fmt::Debug for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OneForm").field("label", &self.label).finish()
    }
}

/// Hyperbolic norm `‖v‖_q = |v|_E / y`.
pub fn metric_norm(q: &HalfPlanePoint, v: TangentVector) -> f64 {
    v.vx.hypot(v.vy) / q.y
}

/// Metric inner product `g_q(u, v)`.
pub fn metric_inner(q: &HalfPlanePoint, u: TangentVector, v: TangentVector) -> f64 {
    (u.vx * v.vx + u.vy * v.vy) / (q.y * q.y)
}

/// Dual norm `‖p‖_q = y |p|_E` induced on covectors.
pub fn dual_norm(q: &HalfPlanePoint, p: Covector) -> f64 {
    q.y * p.px.hypot(p.py)
}

pub fn eta(q: &HalfPlanePoint) -> Covector {
    Covector::new(1.0 / q.y, 0.0)
}

/// The Lorentz force `Y(u) = J u = (−u_y, u_x)`, defined by `dη(u, v) = g(Y u, v)`.
pub fn lorentz_force(u: TangentVector) -> TangentVector {
    TangentVector::new(-u.vy, u.vx)
}

/// `dη_q(u, v) = (u_x v_y − u_y v_x) / y²`.
pub fn area_form(q: &HalfPlanePoint, u: TangentVector, v: TangentVector) -> f64 {
    (u.vx * v.vy - u.vy * v.vx) / (q.y * q.y)
}
