//! Rectangular sampling grids over the half-plane.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{HalfPlanePoint, Y_MIN};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GridError {
    #[error("grid needs at least one point per axis")]
    Empty,
    #[error("grid bounds are inverted or non-finite")]
    Bounds,
    #[error("grid reaches y = {0}, below the half-plane cutoff {Y_MIN}")]
    BelowCutoff(f64),
}

/// `nx × ny` points spaced uniformly in `[x_min, x_max] × [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl GridSpec {
    /// The standard verification grid `[−5, 5] × [0.1, 10]`, 101 × 101 points.
    pub const STANDARD: GridSpec = GridSpec { x_min: -5.0, x_max: 5.0, nx: 101, y_min: 0.1, y_max: 10.0, ny: 101 };

    pub fn new(x_min: f64, x_max: f64, nx: usize, y_min: f64, y_max: f64, ny: usize) -> Result<Self, GridError> {
        let g = Self { x_min, x_max, nx, y_min, y_max, ny };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if self.nx == 0 || self.ny == 0 {
            return Err(GridError::Empty);
        }
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite());
        if !finite || self.x_max < self.x_min || self.y_max < self.y_min {
            return Err(GridError::Bounds);
        }
        if self.y_min <= Y_MIN {
            return Err(GridError::BelowCutoff(self.y_min));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn axis(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
        if n == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    }

    /// Row-major points (x varies fastest).
    pub fn points(&self) -> Vec<HalfPlanePoint> {
        let mut out = Vec::with_capacity(self.len());
        for j in 0..self.ny {
            let y = Self::axis(self.y_min, self.y_max, self.ny, j);
            for i in 0..self.nx {
                let x = Self::axis(self.x_min, self.x_max, self.nx, i);
                out.push(HalfPlanePoint::new(x, y).expect("validated grid lies in the half-plane"));
            }
        }
        out
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::STANDARD
    }
}
