//! Points of the open unit interval stored together with their complement.
//!
//! Near `x = 1` the difference `1 - x` cannot be recovered from `x` alone
//! once `x` has been rounded, and the kernels are singular there. Every
//! quadrature node therefore carries both coordinates, each computed from
//! the side where it is small.

use crate::error::{check_open_unit, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitPoint {
    x: f64,
    xc: f64,
}

impl UnitPoint {
    pub fn new(x: f64) -> Result<Self> {
        check_open_unit("point", x)?;
        Ok(Self { x, xc: 1.0 - x })
    }

    /// Builds the point `1 - xc` from its distance to 1.
    pub fn from_complement(xc: f64) -> Result<Self> {
        check_open_unit("complement", xc)?;
        Ok(Self { x: 1.0 - xc, xc })
    }

    /// Both coordinates supplied by the caller; they must sum to one up to rounding.
    pub(crate) fn from_parts(x: f64, xc: f64) -> Self {
        debug_assert!(x > 0.0 && xc > 0.0, "point ({x}, {xc}) left the interval");
        Self { x, xc }
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    /// `1 - x`, accurate to full relative precision.
    #[inline]
    pub fn complement(&self) -> f64 {
        self.xc
    }

    /// The mirrored point `1 - x`.
    #[inline]
    pub fn reflect(&self) -> Self {
        Self {
            x: self.xc,
            xc: self.x,
        }
    }

    /// `ln x`, switching to `ln_1p` when `x` is close to one.
    #[inline]
    pub fn ln(&self) -> f64 {
        if self.x > 0.5 {
            (-self.xc).ln_1p()
        } else {
            self.x.ln()
        }
    }

    /// `ln(1 - x)` with the same care.
    #[inline]
    pub fn ln_complement(&self) -> f64 {
        if self.xc > 0.5 {
            (-self.x).ln_1p()
        } else {
            self.xc.ln()
        }
    }
}
