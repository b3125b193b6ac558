//! Posteriors for a parameter when all you know is whether a test rejected.
//!
//! A study reports "significant" or "not significant", and perhaps the sign
//! of the estimate, but not the estimate itself. This crate computes what a
//! Bayesian with a given prior should believe about the parameter after
//! seeing only that outcome, and how much the outcome tells them.
//!
//! * [`normal_model`]: Normal prior, Normal estimator, two-sided z-test.
//!   Closed forms for event probabilities and conditional posteriors,
//!   including the sign-refined events.
//! * [`general_model`]: a prior with an atom at zero plus any continuous
//!   part, and any test described by its power curve. Large-sample limits.
//! * [`interval_null`]: tests of `θ ∈ [-δ, δ]` with size-controlled critical
//!   values.
//! * [`mc_oracle`]: a seeded Monte Carlo simulator of the whole generative
//!   process, used to cross-check everything else.
//! * [`numerics`]: the Normal CDF and quantile, log-space probability
//!   helpers, adaptive quadrature and a bracketing root finder.
//!
//! ```
//! use sigpost::normal_model::{event_probability, NormalPrior, PointNullDesign, SignificanceEvent};
//!
//! let prior = NormalPrior::new(1.0, 1.0)?;
//! let design = PointNullDesign::new(10, 1.96)?;
//! let p = event_probability(&prior, &design, SignificanceEvent::Significant);
//! assert!((p - 0.702_753_645).abs() < 1e-8);
//! # Ok::<(), sigpost::Error>(())
//! ```

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod general_model;
pub mod interval_null;
pub mod mc_oracle;
pub mod normal_model;
pub mod numerics;

pub use error::{Error, Result};
pub use general_model::{ContinuousPrior, MixedPosterior, MixedPrior, TestPowerCurve};
pub use interval_null::IntervalNullDesign;
pub use mc_oracle::{ConditionalHistogram, Experiment, McEstimate, SimulationPlan};
pub use normal_model::{ConditionalPosterior, NormalPrior, PointNullDesign, SignificanceEvent};
pub use numerics::{Interval, QuadratureSpec};
