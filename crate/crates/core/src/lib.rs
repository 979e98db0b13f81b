//! Magnetic (horocycle) and geodesic flows on the hyperbolic half-plane
//! `ℍ = {(x, y) : y > 0}` with metric `(dx² + dy²)/y²` and magnetic form
//! `η = dx/y`, plus numerical verification of the smooth Hamilton-Jacobi
//! solutions and of the Mañé critical value `c(L) = ½`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_forms;
pub mod config;
pub mod flows;
pub mod geom;
pub mod grid;
pub mod hj;
pub mod mane;
pub mod mechanics;
pub mod quadrature;

pub use closed_forms::{Sign, TangencyPoint};
pub use config::{Config, SCHEMA_VERSION};
pub use flows::{Field, FlowError, Phase, Trajectory};
pub use geom::{Covector, GeomError, HalfPlanePoint, OneForm, TangentVector};
pub use grid::GridSpec;
pub use hj::{AdHoc, Family, HJSolution, Potential};
pub use mane::CriticalEstimate;
pub use mechanics::{CotangentState, SystemKind, TangentState};
