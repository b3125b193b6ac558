//! Numerical foundation: Normal special functions, adaptive quadrature and
//! bracketed root finding.

pub mod quadrature;
pub mod roots;
pub mod special;

pub use quadrature::{integrate, integrate_with_breaks};
pub use roots::find_root;
pub use special::{std_normal_cdf, std_normal_log_cdf, std_normal_pdf, std_normal_quantile};

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` of the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::InvalidArgument("interval bounds are NaN".into()));
        }
        Ok(Interval { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Smallest interval covering both.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }
}

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Half-width, in prior standard deviations, of the default window used
    /// for prior-weighted integrands.
    pub tail_halfwidth_sigmas: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 1 << 16,
            tail_halfwidth_sigmas: 10.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "quadrature tolerances must be positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidArgument(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        if !(self.tail_halfwidth_sigmas >= 6.0) {
            return Err(Error::InvalidArgument(format!(
                "tail_halfwidth_sigmas must be >= 6, got {}",
                self.tail_halfwidth_sigmas
            )));
        }
        Ok(())
    }
}

/// A search interval for [`find_root`]. The sign change is checked when the
/// solver runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "bracket needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Bracket { lo, hi })
    }
}
