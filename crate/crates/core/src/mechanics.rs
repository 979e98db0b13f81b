//! Lagrangian and Hamiltonian quantities for the two systems on the half-plane.
//!
//! * `Magnetic`: `L = ½‖v‖² + η(v)`, dual `H = ½‖p − η‖²`.
//! * `Kinetic`: `L = ½‖v‖²`, dual `H = ½‖p‖²` (geodesic flow).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geom::{dual_norm, eta, metric_norm, Covector, HalfPlanePoint, TangentVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Magnetic,
    Kinetic,
}

impl SystemKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SystemKind::Magnetic => "magnetic",
            SystemKind::Kinetic => "kinetic",
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SystemKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "magnetic" => Ok(SystemKind::Magnetic),
            "kinetic" => Ok(SystemKind::Kinetic),
            other => Err(format!("unknown system kind `{other}` (expected magnetic|kinetic)")),
        }
    }
}

/// A point `(q, v)` of the tangent bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentState {
    pub q: HalfPlanePoint,
    pub v: TangentVector,
}

impl TangentState {
    pub fn new(q: HalfPlanePoint, v: TangentVector) -> Self {
        Self { q, v }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.q.x(), self.q.y(), self.v.vx, self.v.vy]
    }
}

/// A point `(q, p)` of the cotangent bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CotangentState {
    pub q: HalfPlanePoint,
    pub p: Covector,
}

impl CotangentState {
    pub fn new(q: HalfPlanePoint, p: Covector) -> Self {
        Self { q, p }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.q.x(), self.q.y(), self.p.px, self.p.py]
    }
}

pub fn lagrangian(kind: SystemKind, s: &TangentState) -> f64 {
    let y = s.q.y();
    let kinetic = (s.v.vx * s.v.vx + s.v.vy * s.v.vy) / (2.0 * y * y);
    match kind {
        SystemKind::Magnetic => kinetic + s.v.vx / y,
        SystemKind::Kinetic => kinetic,
    }
}

/// `E = ½‖v‖²_q`, the same for both systems.
pub fn energy(s: &TangentState) -> f64 {
    let n = metric_norm(&s.q, s.v);
    0.5 * n * n
}

/// Conjugate momentum `p_x = ∂L/∂v_x` of the magnetic system; a first integral.
pub fn momentum_x(s: &TangentState) -> f64 {
    let y = s.q.y();
    s.v.vx / (y * y) + 1.0 / y
}

/// Coordinate form of the Hamiltonian.
pub fn hamiltonian(kind: SystemKind, s: &CotangentState) -> f64 {
    let y = s.q.y();
    let Covector { px, py } = s.p;
    let kinetic = 0.5 * y * y * (px * px + py * py);
    match kind {
        SystemKind::Magnetic => kinetic - y * px + 0.5,
        SystemKind::Kinetic => kinetic,
    }
}

/// Norm form of the Hamiltonian, `½‖p − η‖²` or `½‖p‖²`.
///
/// Kept separate from [`hamiltonian`] so the two can be checked against each other.
pub fn hamiltonian_norm_form(kind: SystemKind, s: &CotangentState) -> f64 {
    let shifted = match kind {
        SystemKind::Magnetic => s.p - eta(&s.q),
        SystemKind::Kinetic => s.p,
    };
    let n = dual_norm(&s.q, shifted);
    0.5 * n * n
}

/// Fiber derivative `(q, v) ↦ (q, ∂L/∂v)`.
pub fn legendre(kind: SystemKind, s: &TangentState) -> CotangentState {
    let y = s.q.y();
    let y2 = y * y;
    let p = match kind {
        SystemKind::Magnetic => Covector::new(s.v.vx / y2 + 1.0 / y, s.v.vy / y2),
        SystemKind::Kinetic => Covector::new(s.v.vx / y2, s.v.vy / y2),
    };
    CotangentState::new(s.q, p)
}

pub fn legendre_inverse(kind: SystemKind, s: &CotangentState) -> TangentState {
    let y = s.q.y();
    let y2 = y * y;
    let v = match kind {
        SystemKind::Magnetic => TangentVector::new(y2 * s.p.px - y, y2 * s.p.py),
        SystemKind::Kinetic => TangentVector::new(y2 * s.p.px, y2 * s.p.py),
    };
    TangentState::new(s.q, v)
}
