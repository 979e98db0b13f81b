//! Euler-Lagrange and Hamiltonian vector fields, a fixed-step RK4 integrator
//! that records conserved quantities, and return-time detection for the
//! periodic subcritical magnetic orbits.
//!
//! States are packed as `[x, y, v_x, v_y]` on the tangent bundle and
//! `[x, y, p_x, p_y]` on the cotangent bundle.

use std::fmt;

use thiserror::Error;

use crate::geom::{Covector, GeomError, HalfPlanePoint, TangentVector, Y_MIN};
use crate::mechanics::{self, CotangentState, SystemKind, TangentState};

pub type Phase = [f64; 4];

/// Time step used when no other is configured.
pub const DEFAULT_DT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bundle {
    Tangent,
    Cotangent,
}

/// Which first-order system to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    pub kind: SystemKind,
    pub bundle: Bundle,
}

impl Field {
    pub const fn euler_lagrange(kind: SystemKind) -> Self {
        Self { kind, bundle: Bundle::Tangent }
    }

    pub const fn hamiltonian(kind: SystemKind) -> Self {
        Self { kind, bundle: Bundle::Cotangent }
    }

    /// Evaluates the field on a packed state; fails if `y <= Y_MIN`.
    pub fn eval(&self, s: &Phase) -> Result<Phase, GeomError> {
        let q = HalfPlanePoint::new(s[0], s[1])?;
        Ok(match self.bundle {
            Bundle::Tangent => el_vector_field(self.kind, &TangentState::new(q, TangentVector::new(s[2], s[3]))),
            Bundle::Cotangent => ham_vector_field(self.kind, &CotangentState::new(q, Covector::new(s[2], s[3]))),
        })
    }

    /// Energy (tangent) or Hamiltonian (cotangent) of a packed state.
    pub fn energy(&self, s: &Phase) -> Result<f64, GeomError> {
        let q = HalfPlanePoint::new(s[0], s[1])?;
        Ok(match self.bundle {
            Bundle::Tangent => mechanics::energy(&TangentState::new(q, TangentVector::new(s[2], s[3]))),
            Bundle::Cotangent => mechanics::hamiltonian(self.kind, &CotangentState::new(q, Covector::new(s[2], s[3]))),
        })
    }

    /// Conjugate momentum `p_x`, a first integral of both systems.
    pub fn momentum_x(&self, s: &Phase) -> Result<f64, GeomError> {
        let q = HalfPlanePoint::new(s[0], s[1])?;
        Ok(match self.bundle {
            Bundle::Tangent => {
                mechanics::legendre(self.kind, &TangentState::new(q, TangentVector::new(s[2], s[3]))).p.px
            }
            Bundle::Cotangent => s[2],
        })
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = match self.bundle {
            Bundle::Tangent => "euler-lagrange",
            Bundle::Cotangent => "hamiltonian",
        };
        write!(f, "{} {}", self.kind, b)
    }
}

/// `(ẋ, ẏ, v̇_x, v̇_y)` of the Euler-Lagrange flow.
///
/// Magnetic: expanding `d/dt(v_x/y² + 1/y) = 0` and
/// `d/dt(v_y/y²) = −(v_x² + v_y²)/y³ − v_x/y²` gives
/// `v̇_x = 2 v_x v_y / y + v_y`, `v̇_y = (v_y² − v_x²)/y − v_x`.
/// Kinetic drops the two terms linear in `v`.
pub fn el_vector_field(kind: SystemKind, s: &TangentState) -> Phase {
    let y = s.q.y();
    let TangentVector { vx, vy } = s.v;
    let ax = 2.0 * vx * vy / y;
    let ay = (vy * vy - vx * vx) / y;
    match kind {
        SystemKind::Magnetic => [vx, vy, ax + vy, ay - vx],
        SystemKind::Kinetic => [vx, vy, ax, ay],
    }
}

/// Canonical equations `(∂H/∂p, −∂H/∂q)` for the coordinate Hamiltonian.
pub fn ham_vector_field(kind: SystemKind, s: &CotangentState) -> Phase {
    let y = s.q.y();
    let Covector { px, py } = s.p;
    let p2 = px * px + py * py;
    match kind {
        SystemKind::Magnetic => [y * y * px - y, y * y * py, 0.0, px - y * p2],
        SystemKind::Kinetic => [y * y * px, y * y * py, 0.0, -y * p2],
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub state: Phase,
    /// `E` for tangent flows, `H` for cotangent flows.
    pub energy: f64,
    pub momentum_x: f64,
}

/// Largest deviations of the first integrals from their initial values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Drift {
    pub energy: f64,
    pub momentum_x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub field: Field,
    pub dt: f64,
    pub samples: Vec<TrajectorySample>,
    pub drift: Drift,
}

impl Trajectory {
    fn new(field: Field, dt: f64) -> Self {
        Self { field, dt, samples: Vec::new(), drift: Drift::default() }
    }

    fn push(&mut self, t: f64, state: Phase) -> Result<(), GeomError> {
        let energy = self.field.energy(&state)?;
        let momentum_x = self.field.momentum_x(&state)?;
        if let Some(first) = self.samples.first() {
            self.drift.energy = self.drift.energy.max((energy - first.energy).abs());
            self.drift.momentum_x = self.drift.momentum_x.max((momentum_x - first.momentum_x).abs());
        }
        self.samples.push(TrajectorySample { t, state, energy, momentum_x });
        Ok(())
    }

    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory always holds the initial sample")
    }

    pub fn duration(&self) -> f64 {
        self.last().t
    }
}

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("invalid step: dt = {dt}, duration = {duration} (need 0 < dt <= duration)")]
    StepSize { dt: f64, duration: f64 },
    #[error("invalid initial state: {0}")]
    InitialState(#[from] GeomError),
    #[error("trajectory reached the boundary (y <= {Y_MIN}) near t = {t}")]
    BoundaryEscape { t: f64, partial: Box<Trajectory> },
    #[error("{0}")]
    Precondition(String),
    #[error("no return to the initial state within t = {budget}")]
    NoReturn { budget: f64 },
}

fn axpy(s: &Phase, h: f64, k: &Phase) -> Phase {
    [s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2], s[3] + h * k[3]]
}

/// One classical Runge-Kutta step. Fails if any stage leaves the half-plane.
pub fn rk4_step(field: &Field, s: &Phase, h: f64) -> Result<Phase, GeomError> {
    let k1 = field.eval(s)?;
    let k2 = field.eval(&axpy(s, 0.5 * h, &k1))?;
    let k3 = field.eval(&axpy(s, 0.5 * h, &k2))?;
    let k4 = field.eval(&axpy(s, h, &k3))?;
    let mut out = *s;
    for i in 0..4 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if out.iter().any(|c| !c.is_finite()) {
        return Err(GeomError::NonFinite { x: out[0], y: out[1] });
    }
    HalfPlanePoint::new(out[0], out[1])?;
    Ok(out)
}

/// Step schedule covering `[0, duration]`: full steps of `dt`, the last one
/// shortened to land exactly on `duration`.
fn step_count(duration: f64, dt: f64) -> usize {
    let n = duration / dt;
    let rounded = n.round();
    if (n - rounded).abs() <= 1e-9 * n.max(1.0) {
        rounded as usize
    } else {
        n.ceil() as usize
    }
}

/// Integrates `field` from `s0` over `[0, duration]` with fixed step `dt`,
/// recording every step.
pub fn integrate(field: Field, s0: Phase, duration: f64, dt: f64) -> Result<Trajectory, FlowError> {
    if !(dt > 0.0) || !(duration > 0.0) || dt > duration || !dt.is_finite() || !duration.is_finite() {
        return Err(FlowError::StepSize { dt, duration });
    }
    let mut traj = Trajectory::new(field, dt);
    traj.push(0.0, s0)?;
    let n = step_count(duration, dt);
    let mut s = s0;
    for i in 1..=n {
        let t_prev = (i - 1) as f64 * dt;
        let t = if i == n { duration } else { i as f64 * dt };
        match rk4_step(&field, &s, t - t_prev) {
            Ok(next) => s = next,
            Err(_) => return Err(FlowError::BoundaryEscape { t: t_prev, partial: Box::new(traj) }),
        }
        traj.push(t, s).map_err(|_| FlowError::BoundaryEscape { t, partial: Box::new(traj.clone()) })?;
    }
    Ok(traj)
}

pub fn integrate_tangent(kind: SystemKind, s0: &TangentState, duration: f64, dt: f64) -> Result<Trajectory, FlowError> {
    integrate(Field::euler_lagrange(kind), s0.to_array(), duration, dt)
}

pub fn integrate_cotangent(
    kind: SystemKind,
    s0: &CotangentState,
    duration: f64,
    dt: f64,
) -> Result<Trajectory, FlowError> {
    integrate(Field::hamiltonian(kind), s0.to_array(), duration, dt)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodOptions {
    pub dt: f64,
    /// Maximal scaled phase-space distance accepted as a return.
    pub tolerance: f64,
    /// Give up after this much flow time.
    pub budget: f64,
}

impl Default for PeriodOptions {
    fn default() -> Self {
        Self { dt: DEFAULT_DT, tolerance: 1e-6, budget: 1000.0 }
    }
}

/// Phase-space distance scaled by the initial height, so that it is
/// unchanged by the dilations `(x, y) ↦ λ(x, y)`.
fn scaled_distance(s: &Phase, s0: &Phase) -> f64 {
    let d: f64 = s.iter().zip(s0).map(|(a, b)| (a - b) * (a - b)).sum();
    d.sqrt() / s0[1]
}

/// Derivative of `½|s − s0|²` along the field; crosses zero upward at each
/// local minimum of the distance to `s0`.
fn approach_rate(field: &Field, s: &Phase, s0: &Phase) -> Result<f64, GeomError> {
    let f = field.eval(s)?;
    Ok((0..4).map(|i| (s[i] - s0[i]) * f[i]).sum())
}

/// First return time of the magnetic Euler-Lagrange orbit through `s0`,
/// whose energy `k` must be below ½.
///
/// Local minima of the phase-space distance to `s0` are located between grid
/// steps by bisection on [`approach_rate`]; the first minimum closer than
/// `opts.tolerance` is the period.
pub fn detect_period(k: f64, s0: &TangentState, opts: PeriodOptions) -> Result<f64, FlowError> {
    if !(k < 0.5) {
        return Err(FlowError::Precondition(format!(
            "energy k = {k} is not subcritical; at k = 1/2 the horocycle flow has no periodic orbits"
        )));
    }
    if !(k > 0.0) {
        return Err(FlowError::Precondition(format!("energy k = {k} must be positive")));
    }
    let e = mechanics::energy(s0);
    if (e - k).abs() > 1e-12 {
        return Err(FlowError::Precondition(format!("initial state has energy {e}, expected {k}")));
    }
    if !(opts.dt > 0.0) || !(opts.budget > opts.dt) {
        return Err(FlowError::StepSize { dt: opts.dt, duration: opts.budget });
    }
    let field = Field::euler_lagrange(SystemKind::Magnetic);
    let origin = s0.to_array();
    let escape = |t: f64| FlowError::BoundaryEscape { t, partial: Box::new(Trajectory::new(field, opts.dt)) };

    let mut s = origin;
    let mut rate = 0.0;
    let mut step = 0usize;
    loop {
        let t = step as f64 * opts.dt;
        if t > opts.budget {
            return Err(FlowError::NoReturn { budget: opts.budget });
        }
        let next = rk4_step(&field, &s, opts.dt).map_err(|_| escape(t))?;
        let next_rate = approach_rate(&field, &next, &origin).map_err(|_| escape(t))?;
        if step > 0 && rate < 0.0 && next_rate >= 0.0 {
            let (h, at) = bisect_minimum(&field, &s, &origin, opts.dt).map_err(|_| escape(t))?;
            if scaled_distance(&at, &origin) < opts.tolerance {
                return Ok(t + h);
            }
        }
        s = next;
        rate = next_rate;
        step += 1;
    }
}

/// Finds `h ∈ [0, dt]` where the approach rate changes sign along an RK4
/// substep from `s`.
fn bisect_minimum(field: &Field, s: &Phase, origin: &Phase, dt: f64) -> Result<(f64, Phase), GeomError> {
    let (mut lo, mut hi) = (0.0, dt);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let at = rk4_step(field, s, mid)?;
        if approach_rate(field, &at, origin)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let h = 0.5 * (lo + hi);
    Ok((h, rk4_step(field, s, h)?))
}
