//! Rectangular barrier-well regularization of the delta-prime potential.
//!
//! A barrier of width `l` on `[0, l)` followed, after a gap `rho`, by a well
//! of the same width on `[l + rho, 2l + rho)`. Heights are `±1 / (l (l + rho))`
//! so that the profile has zero area and unit negative dipole moment.

use crate::error::{finite, positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectProfile {
    l: f64,
    rho: f64,
    lambda: f64,
}

impl RectProfile {
    pub fn new(l: f64, rho: f64, lambda: f64) -> Result<Self> {
        positive("l", l)?;
        if finite("rho", rho)? < 0.0 {
            return Err(Error::invalid("rho", format!("must be >= 0, got {rho}")));
        }
        finite("lambda", lambda)?;
        Ok(RectProfile { l, rho, lambda })
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Height of the unit-coupling barrier, `1 / (l (l + rho))`.
    pub fn height(&self) -> f64 {
        1.0 / (self.l * (self.l + self.rho))
    }

    /// Total range `x0 = 2l + rho`.
    pub fn range(&self) -> f64 {
        2.0 * self.l + self.rho
    }

    /// Support `[0, 2l + rho]`.
    pub fn support(&self) -> (f64, f64) {
        (0.0, self.range())
    }

    /// Potential `lambda * Δ'(x)`, with half-open pieces `[0, l)` and
    /// `[l + rho, 2l + rho)`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let (l, rho) = (self.l, self.rho);
        if (0.0..l).contains(&x) {
            self.lambda * self.height()
        } else if (l + rho..2.0 * l + rho).contains(&x) {
            -self.lambda * self.height()
        } else {
            0.0
        }
    }

    /// Zeroth and first moments of the unit-coupling profile, integrated
    /// piecewise in closed form. Always `(0, -1)` up to rounding.
    pub fn moments(&self) -> (f64, f64) {
        let (l, rho) = (self.l, self.rho);
        let h = self.height();
        // barrier and well share the width l
        let (barrier_width, well_width) = (l, l);
        let m0 = h * barrier_width - h * well_width;
        // ∫_a^b x dx = (b - a)(b + a) / 2
        let barrier = l * l / 2.0;
        let well = l * (3.0 * l + 2.0 * rho) / 2.0;
        let m1 = h * (barrier - well);
        (m0, m1)
    }
}
