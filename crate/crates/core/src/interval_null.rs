//! Tests of the interval null `θ ∈ [-δ, δ]` in the Normal model.
//!
//! Size is controlled at the boundary `|θ| = δ`, so the critical value solves
//! `Φ(√nδ - c) + Φ(-√nδ - c) = α` and grows like `√nδ`. The size equation is
//! solved in log space, which keeps it meaningful when `√nδ` is in the
//! hundreds and the second term is far below the smallest double.

use crate::error::{Error, Result};
use crate::normal_model::{ConditionalPosterior, NormalPrior, SignificanceEvent};
use crate::numerics::special::{self, log_add_exp, log_cdf};
use crate::numerics::{find_root, Bracket};

/// Interval-null design with its solved critical value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalNullDesign {
    n: u64,
    delta: f64,
    alpha: f64,
    c: f64,
}

impl IntervalNullDesign {
    /// Solve for the critical value and build the design.
    pub fn new(n: u64, delta: f64, alpha: f64) -> Result<Self> {
        let c = solve_critical_value(n, delta, alpha)?;
        Ok(IntervalNullDesign { n, delta, alpha, c })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn sqrt_n(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    /// Rejection probability at the null boundary; equals `alpha` up to the
    /// solver tolerance.
    pub fn size(&self) -> f64 {
        log_size(self.sqrt_n() * self.delta, self.c).exp()
    }
}

fn check_inputs(n: u64, delta: f64, alpha: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size n must be >= 1".into()));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Domain {
            what: "interval half-width delta (must be > 0)",
            value: delta,
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain {
            what: "test size alpha",
            value: alpha,
        });
    }
    Ok(())
}

/// `ln(Φ(r - c) + Φ(-r - c))` with `r = √nδ`.
fn log_size(r: f64, c: f64) -> f64 {
    log_add_exp(log_cdf(r - c), log_cdf(-r - c))
}

/// Critical value `c` solving `Φ(√nδ - c) + Φ(-√nδ - c) = α`.
///
/// The size is strictly decreasing in `c`. For `α < 1/2` the root lies in
/// `[√nδ, √nδ + 10]` for any `α ≥ Φ(-10)`; the upper end is pushed out for
/// smaller `α`, and for `α ≥ 1/2` the search starts at `c = 0`.
pub fn solve_critical_value(n: u64, delta: f64, alpha: f64) -> Result<f64> {
    check_inputs(n, delta, alpha)?;
    let r = (n as f64).sqrt() * delta;
    let lo = if alpha < 0.5 { r } else { 0.0 };
    let reach = 10f64.max((-2.0 * alpha.ln()).sqrt() + 2.0);
    let hi = r + reach;
    let ln_alpha = alpha.ln();
    let tol = 1e-15 * hi.max(1.0);
    find_root(|c| log_size(r, c) - ln_alpha, Bracket::new(lo, hi)?, tol)
}

/// `Φ⁻¹(1 - α) + √nδ`, accurate once `√nδ` is a few units.
pub fn approximate_critical_value(n: u64, delta: f64, alpha: f64) -> Result<f64> {
    check_inputs(n, delta, alpha)?;
    Ok(-special::quantile(alpha) + (n as f64).sqrt() * delta)
}

/// `ln P(√n|θ̂| > c | θ)` under the interval-null design.
pub fn log_interval_rejection_probability(theta: f64, design: &IntervalNullDesign) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
        });
    }
    let m = design.sqrt_n() * theta;
    Ok(log_add_exp(log_cdf(m - design.c), log_cdf(-m - design.c)))
}

/// `ln P(√n|θ̂| ≤ c | θ)`.
pub fn log_interval_acceptance_probability(theta: f64, design: &IntervalNullDesign) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
        });
    }
    let m = design.sqrt_n() * theta;
    Ok(special::log_interval_prob(-design.c - m, design.c - m))
}

/// `P(√n|θ̂| > c | θ) = Φ(√nθ - c) + Φ(-√nθ - c)` with the solved `c`.
pub fn interval_rejection_probability(theta: f64, design: &IntervalNullDesign) -> Result<f64> {
    log_interval_rejection_probability(theta, design).map(f64::exp)
}

/// Finite-n posterior after the interval-null test.
///
/// As `n` grows, the significant posterior loses the mass inside `(-δ, δ)`
/// and the non-significant posterior keeps only that mass.
pub fn interval_posterior(
    prior: &NormalPrior,
    design: &IntervalNullDesign,
    significant: bool,
) -> Result<ConditionalPosterior> {
    let event = if significant {
        SignificanceEvent::Significant
    } else {
        SignificanceEvent::NonSignificant
    };
    ConditionalPosterior::new(*prior, design.n, event.region(design.c))
}
