//! Closed-form posteriors in the Normal–Normal model.
//!
//! The agent's prior is `θ ~ N(μ, σ²)` and the researcher observes
//! `θ̂ ~ N(θ, 1/n)`; measurement variance is normalized to one, so other
//! variances are handled by rescaling units. Every test outcome is an event on
//! the t-ratio `t = √n θ̂`, which is `N(√n θ, 1)` given `θ` and
//! `N(√n μ, 1 + nσ²)` under the prior predictive. Both the likelihood of an
//! event and its marginal probability are therefore Normal interval
//! probabilities, evaluated here in log space.

use crate::error::{Error, Result};
use crate::numerics::special::{self, log_interval_prob, log_sum_exp};
use crate::numerics::{integrate_with_breaks, Interval, QuadratureSpec};

/// Events below this probability cannot be conditioned on.
pub const MIN_EVENT_PROBABILITY: f64 = 1e-300;

/// Prior `θ ~ N(mu, sigma²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalPrior {
    mu: f64,
    sigma: f64,
}

impl NormalPrior {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::Domain {
                what: "prior mean",
                value: mu,
            });
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::Domain {
                what: "prior standard deviation (must be > 0)",
                value: sigma,
            });
        }
        Ok(NormalPrior { mu, sigma })
    }

    /// The standard Normal prior.
    pub fn standard() -> Self {
        NormalPrior {
            mu: 0.0,
            sigma: 1.0,
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn density(&self, theta: f64) -> f64 {
        special::pdf((theta - self.mu) / self.sigma) / self.sigma
    }

    pub fn log_density(&self, theta: f64) -> f64 {
        special::log_pdf((theta - self.mu) / self.sigma) - self.sigma.ln()
    }

    pub fn quantile(&self, u: f64) -> f64 {
        self.mu + self.sigma * special::quantile(u)
    }

    /// `[μ - kσ, μ + kσ]`
    pub fn window(&self, k: f64) -> Interval {
        Interval {
            lo: self.mu - k * self.sigma,
            hi: self.mu + k * self.sigma,
        }
    }
}

/// A two-sided test of `θ = 0` that rejects when `√n |θ̂| > c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointNullDesign {
    n: u64,
    c: f64,
}

impl PointNullDesign {
    /// `c = 0` is accepted: it is the test that always rejects.
    pub fn new(n: u64, c: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("sample size n must be >= 1".into()));
        }
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::Domain {
                what: "critical value c (must be >= 0)",
                value: c,
            });
        }
        Ok(PointNullDesign { n, c })
    }

    /// The design whose two-sided size is `alpha`, `c = Φ⁻¹(1 - α/2)`.
    pub fn with_size(n: u64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain {
                what: "test size alpha",
                value: alpha,
            });
        }
        Self::new(n, -special::quantile(0.5 * alpha))
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn sqrt_n(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    /// Size at the null, `2Φ(-c)`.
    pub fn size(&self) -> f64 {
        2.0 * special::cdf(-self.c)
    }
}

/// Outcome of a significance test, optionally refined by the sign of `θ̂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignificanceEvent {
    /// `√n|θ̂| > c`
    Significant,
    /// `√n|θ̂| ≤ c`
    NonSignificant,
    /// `√n θ̂ > c`
    SignificantPositive,
    /// `0 < √n θ̂ ≤ c`
    NonSignificantPositive,
    /// `√n θ̂ < -c`
    SignificantNegative,
    /// `-c ≤ √n θ̂ ≤ 0`
    NonSignificantNegative,
}

impl SignificanceEvent {
    pub const TWO_WAY: [SignificanceEvent; 2] = [
        SignificanceEvent::Significant,
        SignificanceEvent::NonSignificant,
    ];

    pub const SIGN_REFINED: [SignificanceEvent; 4] = [
        SignificanceEvent::SignificantPositive,
        SignificanceEvent::NonSignificantPositive,
        SignificanceEvent::SignificantNegative,
        SignificanceEvent::NonSignificantNegative,
    ];

    pub const ALL: [SignificanceEvent; 6] = [
        SignificanceEvent::Significant,
        SignificanceEvent::NonSignificant,
        SignificanceEvent::SignificantPositive,
        SignificanceEvent::NonSignificantPositive,
        SignificanceEvent::SignificantNegative,
        SignificanceEvent::NonSignificantNegative,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SignificanceEvent::Significant => "significant",
            SignificanceEvent::NonSignificant => "nonsignificant",
            SignificanceEvent::SignificantPositive => "significant-positive",
            SignificanceEvent::NonSignificantPositive => "nonsignificant-positive",
            SignificanceEvent::SignificantNegative => "significant-negative",
            SignificanceEvent::NonSignificantNegative => "nonsignificant-negative",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }

    pub fn is_significant(&self) -> bool {
        matches!(
            self,
            SignificanceEvent::Significant
                | SignificanceEvent::SignificantPositive
                | SignificanceEvent::SignificantNegative
        )
    }

    /// Whether a realized t-ratio `t = √n θ̂` falls in the event.
    pub fn contains(&self, t: f64, c: f64) -> bool {
        match self {
            SignificanceEvent::Significant => t.abs() > c,
            SignificanceEvent::NonSignificant => t.abs() <= c,
            SignificanceEvent::SignificantPositive => t > c,
            SignificanceEvent::NonSignificantPositive => t > 0.0 && t <= c,
            SignificanceEvent::SignificantNegative => t < -c,
            SignificanceEvent::NonSignificantNegative => (-c..=0.0).contains(&t),
        }
    }

    pub(crate) fn region(&self, c: f64) -> TRatioRegion {
        let inf = f64::INFINITY;
        let parts = match self {
            SignificanceEvent::Significant => vec![(-inf, -c), (c, inf)],
            SignificanceEvent::NonSignificant => vec![(-c, c)],
            SignificanceEvent::SignificantPositive => vec![(c, inf)],
            SignificanceEvent::NonSignificantPositive => vec![(0.0, c)],
            SignificanceEvent::SignificantNegative => vec![(-inf, -c)],
            SignificanceEvent::NonSignificantNegative => vec![(-c, 0.0)],
        };
        TRatioRegion { parts }
    }
}

impl std::fmt::Display for SignificanceEvent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A finite union of disjoint intervals of the t-ratio.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TRatioRegion {
    parts: Vec<(f64, f64)>,
}

impl TRatioRegion {
    /// `ln P(t ∈ region)` for `t ~ N(mean, sd²)`.
    pub(crate) fn log_prob(&self, mean: f64, sd: f64) -> f64 {
        let terms: Vec<f64> = self
            .parts
            .iter()
            .map(|&(l, u)| log_interval_prob((l - mean) / sd, (u - mean) / sd))
            .collect();
        log_sum_exp(&terms)
    }

    fn finite_endpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.parts
            .iter()
            .flat_map(|&(l, u)| [l, u])
            .filter(|x| x.is_finite())
    }
}

/// Range of `t ~ N(mean, sd²)` restricted to `(l, u)` holding all but a
/// negligible fraction of its mass, `k` sds wide at most.
fn truncated_reach(l: f64, u: f64, mean: f64, sd: f64, k: f64) -> (f64, f64) {
    let lo = l.max(mean - k * sd);
    let hi = u.min(mean + k * sd);
    if lo <= hi {
        (lo, hi)
    } else if mean < l {
        (l, u.min(l + k * sd))
    } else {
        (l.max(u - k * sd), u)
    }
}

/// Posterior density of `θ` given a test outcome, together with the prior
/// predictive probability of that outcome.
#[derive(Debug, Clone)]
pub struct ConditionalPosterior {
    prior: NormalPrior,
    sqrt_n: f64,
    region: TRatioRegion,
    log_event_probability: f64,
    support_hint: Interval,
    breaks: Vec<f64>,
}

impl ConditionalPosterior {
    pub(crate) fn new(prior: NormalPrior, n: u64, region: TRatioRegion) -> Result<Self> {
        let sqrt_n = (n as f64).sqrt();
        let predictive_sd = (1.0 + n as f64 * prior.sigma * prior.sigma).sqrt();
        let log_event_probability = region.log_prob(sqrt_n * prior.mu, predictive_sd);
        if !(log_event_probability >= MIN_EVENT_PROBABILITY.ln()) {
            return Err(Error::DegenerateConditioning {
                log_probability: log_event_probability,
            });
        }

        let reach = region.finite_endpoints().map(f64::abs).fold(0.0, f64::max);
        let local = (reach + 6.0) / sqrt_n;
        let mut support_hint = prior.window(10.0).hull(&Interval {
            lo: -local,
            hi: local,
        });

        // The likelihood changes over a band of width ~1/√n around each
        // region endpoint.
        let mut breaks: Vec<f64> = region
            .finite_endpoints()
            .flat_map(|e| [-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0].map(|k| (e + k) / sqrt_n))
            .collect();
        breaks.push(prior.mu);

        // Given t, θ is N(μ + gain·(t - √nμ), σ_n²). When the event sits far
        // in the predictive tail, t piles up at the nearest region edge and
        // the posterior can lie many prior sds away from μ, so the window is
        // widened to cover every part of the region.
        let t_mean = sqrt_n * prior.mu;
        let gain = sqrt_n * prior.sigma * prior.sigma / (predictive_sd * predictive_sd);
        let sigma_n = prior.sigma / predictive_sd;
        for &(l, u) in &region.parts {
            let (tl, tu) = truncated_reach(l, u, t_mean, predictive_sd, 12.0);
            support_hint = support_hint.hull(&Interval {
                lo: prior.mu + gain * (tl - t_mean) - 12.0 * sigma_n,
                hi: prior.mu + gain * (tu - t_mean) + 12.0 * sigma_n,
            });
            breaks.push(prior.mu + gain * (t_mean.clamp(l, u) - t_mean));
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();

        Ok(ConditionalPosterior {
            prior,
            sqrt_n,
            region,
            log_event_probability,
            support_hint,
            breaks,
        })
    }

    pub fn prior(&self) -> &NormalPrior {
        &self.prior
    }

    pub fn event_probability(&self) -> f64 {
        self.log_event_probability.exp()
    }

    pub fn log_event_probability(&self) -> f64 {
        self.log_event_probability
    }

    /// Window containing all but a negligible fraction of the posterior mass,
    /// including the band around the test's transition points.
    pub fn support_hint(&self) -> Interval {
        self.support_hint
    }

    /// Points where the density can change quickly; pass these to quadrature.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    /// `ln P(event | θ)`.
    pub fn log_likelihood(&self, theta: f64) -> f64 {
        self.region.log_prob(self.sqrt_n * theta, 1.0)
    }

    pub fn likelihood(&self, theta: f64) -> f64 {
        self.log_likelihood(theta).exp()
    }

    pub fn log_density(&self, theta: f64) -> f64 {
        self.prior.log_density(theta) + self.log_likelihood(theta) - self.log_event_probability
    }

    pub fn density(&self, theta: f64) -> f64 {
        self.log_density(theta).exp()
    }

    /// Ratio of posterior to prior density, `P(event | θ) / P(event)`.
    pub fn ratio_to_prior(&self, theta: f64) -> f64 {
        (self.log_likelihood(theta) - self.log_event_probability).exp()
    }

    /// Posterior probability of `[lo, hi]`.
    pub fn mass(&self, interval: Interval, spec: &QuadratureSpec) -> Result<f64> {
        integrate_with_breaks(|t| self.density(t), interval, &self.breaks, spec)
    }

    /// Integral of the density over the support hint; 1 up to quadrature error.
    pub fn total_mass(&self, spec: &QuadratureSpec) -> Result<f64> {
        self.mass(self.support_hint, spec)
    }

    /// Posterior mean and standard deviation by quadrature.
    pub fn mean_and_sd(&self, spec: &QuadratureSpec) -> Result<(f64, f64)> {
        let w = self.support_hint;
        let m0 = self.total_mass(spec)?;
        let m1 = integrate_with_breaks(|t| t * self.density(t), w, &self.breaks, spec)? / m0;
        let var = integrate_with_breaks(
            |t| (t - m1) * (t - m1) * self.density(t),
            w,
            &self.breaks,
            spec,
        )? / m0;
        Ok((m1, var.sqrt()))
    }
}

/// Posterior `N(mu_n, sigma_n²)` given the full sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullInfoPosterior {
    pub mu_n: f64,
    pub sigma_n: f64,
}

impl FullInfoPosterior {
    pub fn density(&self, theta: f64) -> f64 {
        special::pdf((theta - self.mu_n) / self.sigma_n) / self.sigma_n
    }
}

fn check_finite(x: f64, what: &'static str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Domain { what, value: x })
    }
}

/// `P(√n|θ̂| > c | θ) = Φ(√nθ - c) + Φ(-√nθ - c)`.
pub fn rejection_probability_given_theta(theta: f64, design: &PointNullDesign) -> Result<f64> {
    log_rejection_probability_given_theta(theta, design).map(f64::exp)
}

/// Log of [`rejection_probability_given_theta`], finite far into the tails.
pub fn log_rejection_probability_given_theta(theta: f64, design: &PointNullDesign) -> Result<f64> {
    check_finite(theta, "theta")?;
    Ok(SignificanceEvent::Significant
        .region(design.c)
        .log_prob(design.sqrt_n() * theta, 1.0))
}

/// Prior predictive probability of significance,
/// `Φ((√nμ - c)/√(1+nσ²)) + Φ((-√nμ - c)/√(1+nσ²))`.
pub fn marginal_rejection_probability(prior: &NormalPrior, design: &PointNullDesign) -> f64 {
    event_probability(prior, design, SignificanceEvent::Significant)
}

/// Prior predictive probability of any event.
pub fn event_probability(
    prior: &NormalPrior,
    design: &PointNullDesign,
    event: SignificanceEvent,
) -> f64 {
    let sd = (1.0 + design.n as f64 * prior.sigma * prior.sigma).sqrt();
    event
        .region(design.c)
        .log_prob(design.sqrt_n() * prior.mu, sd)
        .exp()
}

/// Limited-information posterior of `θ` given `event`.
pub fn posterior_given_event(
    prior: &NormalPrior,
    design: &PointNullDesign,
    event: SignificanceEvent,
) -> Result<ConditionalPosterior> {
    ConditionalPosterior::new(*prior, design.n, event.region(design.c))
}

/// Conjugate update: `μ_n = (μ + nσ²θ̂)/(1 + nσ²)`, `σ_n² = σ²/(1 + nσ²)`.
pub fn full_information_posterior(
    prior: &NormalPrior,
    n: u64,
    theta_hat: f64,
) -> Result<FullInfoPosterior> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size n must be >= 1".into()));
    }
    check_finite(theta_hat, "theta_hat")?;
    let ns2 = n as f64 * prior.sigma * prior.sigma;
    Ok(FullInfoPosterior {
        mu_n: (prior.mu + ns2 * theta_hat) / (1.0 + ns2),
        sigma_n: prior.sigma / (1.0 + ns2).sqrt(),
    })
}

/// Recover `θ̂` from a two-sided P-value `2Φ(-√n|θ̂|)` and the sign of the
/// estimate. Together with [`full_information_posterior`] this shows the pair
/// carries the full information in this model.
pub fn theta_hat_from_p_value(p_value: f64, positive: bool, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size n must be >= 1".into()));
    }
    if !(p_value > 0.0 && p_value <= 1.0) {
        return Err(Error::Domain {
            what: "P-value",
            value: p_value,
        });
    }
    let t = -special::quantile(0.5 * p_value);
    let t = if p_value == 1.0 { 0.0 } else { t };
    Ok(if positive { t } else { -t } / (n as f64).sqrt())
}

/// A real number or `+∞`, for limits that diverge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(x) => x,
            ExtendedReal::PosInfinity => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedReal::PosInfinity)
    }
}

impl std::fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::PosInfinity => f.write_str("inf"),
        }
    }
}

/// Large-n limit of `p(θ | √nθ̂ > c) / p(θ)`: 0 below zero,
/// `Φ(-c)/Φ(μ/σ)` at zero, `1/Φ(μ/σ)` above.
pub fn sign_ratio_limit_significant(
    prior: &NormalPrior,
    c: f64,
    theta: f64,
) -> Result<ExtendedReal> {
    check_finite(theta, "theta")?;
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Domain {
            what: "critical value c (must be > 0)",
            value: c,
        });
    }
    let log_positive = special::log_cdf(prior.mu / prior.sigma);
    let v = if theta < 0.0 {
        0.0
    } else if theta == 0.0 {
        (special::log_cdf(-c) - log_positive).exp()
    } else {
        (-log_positive).exp()
    };
    Ok(ExtendedReal::Finite(v))
}

/// Large-n limit of `p(θ | 0 < √nθ̂ ≤ c) / p(θ)`: `+∞` at zero, 0 elsewhere.
pub fn sign_ratio_limit_nonsignificant(theta: f64) -> Result<ExtendedReal> {
    check_finite(theta, "theta")?;
    Ok(if theta == 0.0 {
        ExtendedReal::PosInfinity
    } else {
        ExtendedReal::Finite(0.0)
    })
}
