use serde::{Deserialize, Serialize};

use crate::error::{Result, TailError};

/// Axis-aligned rectangle `[x_lo, x_hi] × [y_lo, y_hi]` in the positive quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Rectangle {
    pub fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Result<Self> {
        let ok = [x_lo, x_hi, y_lo, y_hi].iter().all(|v| v.is_finite() && *v >= 0.0)
            && x_lo <= x_hi
            && y_lo <= y_hi;
        if !ok {
            return Err(TailError::InvalidInput(format!(
                "rectangle [{x_lo}, {x_hi}] x [{y_lo}, {y_hi}] must satisfy 0 <= lo <= hi"
            )));
        }
        Ok(Self { x_lo, x_hi, y_lo, y_hi })
    }

    /// `[lo, hi]²`
    pub fn square(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, lo, hi)
    }

    pub fn area(&self) -> f64 {
        (self.x_hi - self.x_lo) * (self.y_hi - self.y_lo)
    }

    pub fn is_degenerate(&self) -> bool {
        self.area() <= 0.0
    }

    pub fn max_corner(&self) -> f64 {
        self.x_hi.max(self.y_hi)
    }

    /// Rectangle scaled by `t` around the origin.
    pub fn scaled(&self, t: f64) -> Self {
        Self {
            x_lo: self.x_lo * t,
            x_hi: self.x_hi * t,
            y_lo: self.y_lo * t,
            y_hi: self.y_hi * t,
        }
    }
}
