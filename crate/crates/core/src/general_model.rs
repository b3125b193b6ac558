//! Posteriors after a generic consistent test.
//!
//! The test statistic is never modelled directly. A [`TestPowerCurve`] gives
//! its asymptotic size `α` and its Type II error `β_n(θ) = P(T̂_n ≤ c | θ)`,
//! and nothing else enters the posterior. The prior is a [`MixedPrior`]: an
//! optional atom of mass `q` at zero plus a continuous component. The atom is
//! carried as an exact probability throughout, never smoothed.
//!
//! Finite-n quantities are computed by quadrature. The large-n limits are
//! exposed separately as closed forms.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::normal_model::{NormalPrior, SignificanceEvent, MIN_EVENT_PROBABILITY};
use crate::numerics::special::{self, log_interval_prob, log_one_minus_exp};
use crate::numerics::{integrate_with_breaks, Interval, QuadratureSpec};

/// A continuous prior component.
///
/// Implementations must be reentrant: densities are evaluated from several
/// threads during quadrature and simulation.
pub trait ContinuousPrior: Send + Sync + fmt::Debug {
    fn density(&self, theta: f64) -> f64;

    /// Window holding all but a negligible part of the mass.
    fn support(&self) -> Interval;

    /// Inverse distribution function, needed only by the Monte Carlo oracle.
    fn quantile(&self, _u: f64) -> Option<f64> {
        None
    }

    /// Extra quadrature breakpoints (modes, kinks).
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl ContinuousPrior for NormalPrior {
    fn density(&self, theta: f64) -> f64 {
        NormalPrior::density(self, theta)
    }

    fn support(&self) -> Interval {
        self.window(QuadratureSpec::default().tail_halfwidth_sigmas)
    }

    fn quantile(&self, u: f64) -> Option<f64> {
        Some(NormalPrior::quantile(self, u))
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.mu()]
    }
}

type DensityFn = dyn Fn(f64) -> f64 + Send + Sync;

/// An arbitrary density on a finite window, sampled through a tabulated
/// distribution function.
pub struct TabulatedDensity {
    f: Arc<DensityFn>,
    support: Interval,
    grid: Vec<f64>,
    cumulative: Vec<f64>,
}

impl TabulatedDensity {
    const CELLS: usize = 1 << 14;

    pub fn new<F>(f: F, support: Interval) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(support.lo.is_finite() && support.hi.is_finite() && support.lo < support.hi) {
            return Err(Error::InvalidArgument(format!(
                "tabulated density needs a finite window, got [{}, {}]",
                support.lo, support.hi
            )));
        }
        let h = support.width() / Self::CELLS as f64;
        let grid: Vec<f64> = (0..=Self::CELLS)
            .map(|i| support.lo + h * i as f64)
            .collect();
        let mut cumulative = Vec::with_capacity(grid.len());
        cumulative.push(0.0);
        let mut acc = 0.0;
        for w in grid.windows(2) {
            let (a, b) = (w[0], w[1]);
            let v = f(a) + 4.0 * f(0.5 * (a + b)) + f(b);
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "density is negative or non-finite near {a}"
                )));
            }
            acc += h / 6.0 * v;
            cumulative.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::InvalidArgument("density has zero mass".into()));
        }
        Ok(TabulatedDensity {
            f: Arc::new(f),
            support,
            grid,
            cumulative,
        })
    }
}

impl fmt::Debug for TabulatedDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TabulatedDensity")
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

impl ContinuousPrior for TabulatedDensity {
    fn density(&self, theta: f64) -> f64 {
        if self.support.contains(theta) {
            (self.f)(theta)
        } else {
            0.0
        }
    }

    fn support(&self) -> Interval {
        self.support
    }

    fn quantile(&self, u: f64) -> Option<f64> {
        let total = *self.cumulative.last()?;
        let target = u * total;
        let i = self
            .cumulative
            .partition_point(|&c| c < target)
            .clamp(1, self.grid.len() - 1);
        let (c0, c1) = (self.cumulative[i - 1], self.cumulative[i]);
        let frac = if c1 > c0 {
            (target - c0) / (c1 - c0)
        } else {
            0.5
        };
        Some(self.grid[i - 1] + frac * (self.grid[i] - self.grid[i - 1]))
    }
}

/// Prior with mass `q` at `θ = 0` and a continuous component carrying `1 - q`.
#[derive(Debug, Clone)]
pub struct MixedPrior {
    q: f64,
    continuous: Arc<dyn ContinuousPrior>,
    quadrature: QuadratureSpec,
}

impl MixedPrior {
    pub fn new(q: f64, continuous: Arc<dyn ContinuousPrior>) -> Result<Self> {
        Self::with_quadrature(q, continuous, QuadratureSpec::default())
    }

    pub fn with_quadrature(
        q: f64,
        continuous: Arc<dyn ContinuousPrior>,
        quadrature: QuadratureSpec,
    ) -> Result<Self> {
        quadrature.validate()?;
        if !(0.0..1.0).contains(&q) {
            return Err(Error::Domain {
                what: "point mass q (must satisfy 0 <= q < 1)",
                value: q,
            });
        }
        let at_zero = continuous.density(0.0);
        if !(at_zero > 0.0 && at_zero.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "continuous prior density must be positive at zero, got {at_zero}"
            )));
        }
        let mut breaks = continuous.breakpoints();
        breaks.push(0.0);
        let total = integrate_with_breaks(
            |t| continuous.density(t),
            continuous.support(),
            &breaks,
            &quadrature,
        )?;
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidArgument(format!(
                "continuous prior integrates to {total} over its support, expected 1"
            )));
        }
        Ok(MixedPrior {
            q,
            continuous,
            quadrature,
        })
    }

    /// Atom `q` at zero plus a Normal continuous part.
    pub fn normal(q: f64, prior: NormalPrior) -> Result<Self> {
        Self::new(q, Arc::new(prior))
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn continuous(&self) -> &Arc<dyn ContinuousPrior> {
        &self.continuous
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quadrature
    }

    /// Density of the continuous component alone (integrates to 1).
    pub fn continuous_density(&self, theta: f64) -> f64 {
        self.continuous.density(theta)
    }

    /// Integrate `g(θ)·p(θ)` over the continuous component, resolving the
    /// `1/√n` band around zero.
    fn integrate_against(&self, n: u64, g: impl Fn(f64) -> f64) -> Result<f64> {
        let breaks = local_breaks(n, self.continuous.breakpoints());
        let f = |t: f64| g(t) * self.continuous.density(t);
        let window = self.continuous.support();
        let first = integrate_with_breaks(f, window, &breaks, &self.quadrature)?;
        // Tiny integrals are swamped by the absolute tolerance; redo them
        // relative to their own size.
        if first.abs() < 1e3 * self.quadrature.abs_tol && first != 0.0 {
            let spec = QuadratureSpec {
                abs_tol: (first.abs() * self.quadrature.rel_tol).max(f64::MIN_POSITIVE),
                ..self.quadrature.clone()
            };
            return integrate_with_breaks(f, window, &breaks, &spec);
        }
        Ok(first)
    }
}

fn local_breaks(n: u64, mut extra: Vec<f64>) -> Vec<f64> {
    let root_n = (n as f64).sqrt();
    extra.push(0.0);
    for j in -2..=6 {
        let z = 2f64.powi(j) / root_n;
        extra.push(z);
        extra.push(-z);
    }
    extra
}

type CurveFn = dyn Fn(f64, u64) -> f64 + Send + Sync;

/// Asymptotic size and Type II error curve of a test.
#[derive(Clone)]
pub struct TestPowerCurve {
    alpha: f64,
    log_type2: Arc<CurveFn>,
    log_power: Arc<CurveFn>,
}

impl fmt::Debug for TestPowerCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestPowerCurve")
            .field("alpha", &self.alpha)
            .finish_non_exhaustive()
    }
}

impl TestPowerCurve {
    /// Build from log-space Type II error and power. Both must be supplied
    /// so that neither is computed as `1 - (something close to 1)`.
    ///
    /// The curve is assumed consistent with asymptotic size `alpha` and not
    /// to have perfect local asymptotic power; see [`local_power_diagnostic`].
    pub fn new<B, P>(alpha: f64, log_type2: B, log_power: P) -> Result<Self>
    where
        B: Fn(f64, u64) -> f64 + Send + Sync + 'static,
        P: Fn(f64, u64) -> f64 + Send + Sync + 'static,
    {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain {
                what: "asymptotic size alpha",
                value: alpha,
            });
        }
        Ok(TestPowerCurve {
            alpha,
            log_type2: Arc::new(log_type2),
            log_power: Arc::new(log_power),
        })
    }

    /// Build from a plain `β_n(θ)`; power is taken as `1 - β`.
    pub fn from_type2<B>(alpha: f64, type2: B) -> Result<Self>
    where
        B: Fn(f64, u64) -> f64 + Send + Sync + 'static,
    {
        let type2 = Arc::new(type2);
        let t2 = Arc::clone(&type2);
        Self::new(
            alpha,
            move |theta, n| type2(theta, n).ln(),
            move |theta, n| (-t2(theta, n)).ln_1p(),
        )
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `β_n(θ) = P(T̂_n ≤ c | θ)`
    pub fn type2_at(&self, theta: f64, n: u64) -> f64 {
        (self.log_type2)(theta, n).exp()
    }

    pub fn log_type2_at(&self, theta: f64, n: u64) -> f64 {
        (self.log_type2)(theta, n)
    }

    /// `1 - β_n(θ)`
    pub fn power_at(&self, theta: f64, n: u64) -> f64 {
        (self.log_power)(theta, n).exp()
    }

    pub fn log_power_at(&self, theta: f64, n: u64) -> f64 {
        (self.log_power)(theta, n)
    }

    fn log_likelihood(&self, significant: bool, theta: f64, n: u64) -> f64 {
        if significant {
            self.log_power_at(theta, n)
        } else {
            self.log_type2_at(theta, n)
        }
    }
}

/// Power curve of the two-sided Normal test `√n|θ̂| > c`:
/// `β_n(θ) = Φ(c - √nθ) - Φ(-c - √nθ)`, `α = 2Φ(-c)`.
pub fn normal_power_curve(c: f64) -> Result<TestPowerCurve> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Domain {
            what: "critical value c (must be > 0)",
            value: c,
        });
    }
    let alpha = 2.0 * special::cdf(-c);
    TestPowerCurve::new(
        alpha,
        move |theta, n| {
            let m = (n as f64).sqrt() * theta;
            log_interval_prob(-c - m, c - m)
        },
        move |theta, n| {
            let m = (n as f64).sqrt() * theta;
            special::log_add_exp(special::log_cdf(m - c), special::log_cdf(-m - c))
        },
    )
}

/// Posterior after a test outcome under a [`MixedPrior`].
#[derive(Debug, Clone)]
pub struct MixedPosterior {
    mass_at_zero: f64,
    event_probability: f64,
    significant: bool,
    n: u64,
    prior: MixedPrior,
    curve: TestPowerCurve,
}

impl MixedPosterior {
    pub fn mass_at_zero(&self) -> f64 {
        self.mass_at_zero
    }

    /// Prior predictive probability of the conditioning outcome.
    pub fn event_probability(&self) -> f64 {
        self.event_probability
    }

    pub fn event(&self) -> SignificanceEvent {
        if self.significant {
            SignificanceEvent::Significant
        } else {
            SignificanceEvent::NonSignificant
        }
    }

    /// `P(outcome | θ)`.
    pub fn likelihood(&self, theta: f64) -> f64 {
        self.curve
            .log_likelihood(self.significant, theta, self.n)
            .exp()
    }

    /// Ratio of the continuous posterior density to the continuous prior
    /// density `(1 - q) p(θ)`; equals `P(outcome | θ) / P(outcome)`.
    pub fn ratio_to_prior(&self, theta: f64) -> f64 {
        (self.curve.log_likelihood(self.significant, theta, self.n) - self.event_probability.ln())
            .exp()
    }

    /// Density of the continuous part of the posterior. It integrates to
    /// `1 - mass_at_zero`.
    pub fn continuous_density(&self, theta: f64) -> f64 {
        let p = self.prior.continuous_density(theta);
        if p == 0.0 {
            return 0.0;
        }
        (1.0 - self.prior.q) * p * self.ratio_to_prior(theta)
    }

    pub fn continuous_mass(&self) -> Result<f64> {
        self.mass(self.prior.continuous.support())
    }

    /// Posterior mass of the continuous part on `window` (atom excluded).
    pub fn mass(&self, window: Interval) -> Result<f64> {
        let breaks = local_breaks(self.n, self.prior.continuous.breakpoints());
        integrate_with_breaks(
            |t| self.continuous_density(t),
            window,
            &breaks,
            &self.prior.quadrature,
        )
    }

    /// Posterior probability of `window`, counting the atom if `0 ∈ window`.
    pub fn probability(&self, window: Interval) -> Result<f64> {
        let atom = if window.contains(0.0) {
            self.mass_at_zero
        } else {
            0.0
        };
        Ok(atom + self.mass(window)?)
    }
}

/// Outcome probabilities `(P(T̂_n > c), P(T̂_n ≤ c))`, each integrated
/// directly so that a small one keeps its relative accuracy.
fn outcome_probabilities(prior: &MixedPrior, curve: &TestPowerCurve, n: u64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size n must be >= 1".into()));
    }
    let q = prior.q;
    let cont_sig = prior.integrate_against(n, |t| curve.power_at(t, n))?;
    let cont_nonsig = prior.integrate_against(n, |t| curve.type2_at(t, n))?;
    Ok((
        q * curve.power_at(0.0, n) + (1.0 - q) * cont_sig,
        q * curve.type2_at(0.0, n) + (1.0 - q) * cont_nonsig,
    ))
}

/// `P(T̂_n > c) = q(1 - β_n(0)) + (1 - q)∫(1 - β_n(θ)) p(θ) dθ`.
pub fn marginal_significance_probability(
    prior: &MixedPrior,
    curve: &TestPowerCurve,
    n: u64,
) -> Result<f64> {
    outcome_probabilities(prior, curve, n).map(|(sig, _)| sig)
}

/// `P(T̂_n ≤ c)`, integrated directly.
pub fn marginal_nonsignificance_probability(
    prior: &MixedPrior,
    curve: &TestPowerCurve,
    n: u64,
) -> Result<f64> {
    outcome_probabilities(prior, curve, n).map(|(_, nonsig)| nonsig)
}

fn posterior(
    prior: &MixedPrior,
    curve: &TestPowerCurve,
    n: u64,
    significant: bool,
) -> Result<MixedPosterior> {
    let (sig, nonsig) = outcome_probabilities(prior, curve, n)?;
    let p = if significant { sig } else { nonsig };
    if !(p >= MIN_EVENT_PROBABILITY) {
        return Err(Error::DegenerateConditioning {
            log_probability: p.ln(),
        });
    }
    let at_zero = curve.log_likelihood(significant, 0.0, n).exp();
    Ok(MixedPosterior {
        mass_at_zero: prior.q * at_zero / p,
        event_probability: p,
        significant,
        n,
        prior: prior.clone(),
        curve: curve.clone(),
    })
}

/// Exact finite-n update after a significant outcome.
pub fn posterior_given_significance(
    prior: &MixedPrior,
    curve: &TestPowerCurve,
    n: u64,
) -> Result<MixedPosterior> {
    posterior(prior, curve, n, true)
}

/// Exact finite-n update after a non-significant outcome.
pub fn posterior_given_nonsignificance(
    prior: &MixedPrior,
    curve: &TestPowerCurve,
    n: u64,
) -> Result<MixedPosterior> {
    posterior(prior, curve, n, false)
}

fn check_q_alpha(q: f64, alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::Domain {
            what: "point mass q (must satisfy 0 <= q < 1)",
            value: q,
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

/// Large-n limit of `P(T̂_n > c)` for a prior with atom `q`: `qα + (1 - q)`.
pub fn significance_probability_limit(q: f64, alpha: f64) -> Result<f64> {
    check_q_alpha(q, alpha)?;
    Ok(q * alpha + (1.0 - q))
}

/// Large-n posterior mass at zero after significance: `qα / (qα + 1 - q)`.
pub fn mass_at_zero_limit_significant(q: f64, alpha: f64) -> Result<f64> {
    check_q_alpha(q, alpha)?;
    Ok(q * alpha / (q * alpha + 1.0 - q))
}

/// Large-n posterior-to-prior density ratio at `θ ≠ 0` after significance,
/// `1 / (qα + 1 - q)`.
pub fn significance_ratio_limit(q: f64, alpha: f64) -> Result<f64> {
    check_q_alpha(q, alpha)?;
    Ok(1.0 / (q * alpha + 1.0 - q))
}

/// Smallest `q` for which significance at least doubles the limiting density
/// away from zero: `1 / (2(1 - α))`.
pub fn doubling_threshold(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::Domain {
            what: "test size alpha (must be in (0, 1/2))",
            value: alpha,
        });
    }
    Ok(1.0 / (2.0 * (1.0 - alpha)))
}

/// Estimate `d_θ = lim -(1/n) ln β_n(θ)` from a grid of sample sizes.
///
/// The sequence is extrapolated to `h = 1/√n → 0` by polynomial
/// (Neville) extrapolation through every grid point, which removes the
/// `O(n^{-1/2})` drift of root-n consistent statistics.
pub fn decay_rate_estimate(curve: &TestPowerCurve, theta: f64, n_grid: &[u64]) -> Result<f64> {
    if !theta.is_finite() || theta == 0.0 {
        return Err(Error::Domain {
            what: "theta (decay rate needs a fixed alternative, theta != 0)",
            value: theta,
        });
    }
    if n_grid.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "decay rate needs at least 3 sample sizes, got {}",
            n_grid.len()
        )));
    }
    if n_grid[0] == 0 || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "sample-size grid must be positive and strictly increasing".into(),
        ));
    }
    let h: Vec<f64> = n_grid.iter().map(|&n| 1.0 / (n as f64).sqrt()).collect();
    let mut table: Vec<f64> = n_grid
        .iter()
        .map(|&n| -curve.log_type2_at(theta, n) / n as f64)
        .collect();
    if table.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(
            "log Type II error is not finite on the grid",
        ));
    }
    // Neville's scheme evaluated at h = 0.
    let k = table.len();
    for level in 1..k {
        for i in 0..k - level {
            let (hi, hj) = (h[i], h[i + level]);
            table[i] = (hj * table[i] - hi * table[i + 1]) / (hj - hi);
        }
    }
    Ok(table[0])
}

/// `∫ β_n(z/√n) dz` over `|z| ≤ 200` at sample size `n`.
///
/// A value near zero means the curve has (close to) perfect local power,
/// which breaks the concentration of the posterior after non-significance.
/// Logs a warning below `1e-6`.
pub fn local_power_diagnostic(curve: &TestPowerCurve, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size n must be >= 1".into()));
    }
    let root_n = (n as f64).sqrt();
    let window = Interval {
        lo: -200.0,
        hi: 200.0,
    };
    let breaks: Vec<f64> = (-16..=16).map(|k| k as f64 * 2.0).collect();
    let v = integrate_with_breaks(
        |z| curve.type2_at(z / root_n, n),
        window,
        &breaks,
        &QuadratureSpec::default(),
    )?;
    if v < 1e-6 {
        log::warn!(
            "local Type II error integral {v:e} at n = {n}: the curve looks like it has perfect local power"
        );
    }
    Ok(v)
}

/// `ln(1 - β)` helper for curve authors who only have `ln β`.
pub fn log_power_from_log_type2(log_type2: f64) -> f64 {
    log_one_minus_exp(log_type2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_model::{posterior_given_event, PointNullDesign};

    fn std_mixed(q: f64) -> MixedPrior {
        MixedPrior::normal(q, NormalPrior::standard()).unwrap()
    }

    #[test]
    fn normal_curve_values() {
        let curve = normal_power_curve(1.96).unwrap();
        assert!((curve.alpha() - 0.049_995_790_296_440_87).abs() < 1e-15);
        for n in [1, 10, 1_000_000] {
            assert!((curve.type2_at(0.0, n) - (1.0 - curve.alpha())).abs() < 1e-15);
        }
        assert!(curve.type2_at(50.0, 10) < 1e-300);
        let b = curve.type2_at(0.5, 100);
        assert!((b - 0.001_182_890_741_403_043).abs() < 1e-15, "{b}");
        assert!(normal_power_curve(0.0).is_err());
    }

    #[test]
    fn limit_formulas() {
        assert_eq!(significance_ratio_limit(0.0, 0.05).unwrap(), 1.0);
        let r = significance_ratio_limit(0.5263, 0.05).unwrap();
        assert!((r - 2.0).abs() < 1e-3, "{r}");
        let r = significance_ratio_limit(0.9, 0.05).unwrap();
        assert!((r - 1.0 / 0.145).abs() < 1e-12);
        assert!(significance_ratio_limit(1.0, 0.05).is_err());

        assert!((doubling_threshold(0.05).unwrap() - 0.5263).abs() < 5e-5);
        assert!((doubling_threshold(0.005).unwrap() - 0.5025).abs() < 5e-5);
        assert!((doubling_threshold(1e-12).unwrap() - 0.5).abs() < 1e-11);
        assert!(doubling_threshold(0.5).is_err());

        let m = mass_at_zero_limit_significant(0.5, 0.05).unwrap();
        assert!((m - 0.047_619_047_619).abs() < 1e-10);
        // q → 1 sends the limiting significance probability to α.
        let near_one = significance_probability_limit(1.0 - 1e-12, 0.05).unwrap();
        assert!((near_one - 0.05).abs() < 1e-11);
    }

    #[test]
    fn marginal_significance_large_n() {
        let curve = normal_power_curve(1.96).unwrap();
        // 2Φ(-1.96/√10001) from mpmath; the approach to 1 is only O(1/√n).
        let p = marginal_significance_probability(&std_mixed(0.0), &curve, 10_000).unwrap();
        assert!((p - 0.984_363_245_552_059_9).abs() < 1e-9, "{p}");
        let p = marginal_significance_probability(&std_mixed(0.5), &curve, 1_000_000).unwrap();
        assert!((p - 0.525).abs() < 2e-3, "{p}");
        // exact value 0.5 α + 0.5 · 2Φ(1.96/√(1+10⁶))... from mpmath
        assert!((p - 0.524_215_969_170_237_4).abs() < 1e-9, "{p}");
    }

    #[test]
    fn matches_normal_model_when_atomless() {
        let curve = normal_power_curve(1.96).unwrap();
        let prior = std_mixed(0.0);
        let design = PointNullDesign::new(10, 1.96).unwrap();
        let normal = posterior_given_event(
            &NormalPrior::standard(),
            &design,
            SignificanceEvent::Significant,
        )
        .unwrap();
        let general = posterior_given_significance(&prior, &curve, 10).unwrap();
        for i in 0..=200 {
            let t = -5.0 + 0.05 * i as f64;
            assert!((normal.density(t) - general.continuous_density(t)).abs() < 1e-6);
        }
    }

    #[test]
    fn nonsignificance_with_huge_critical_value_leaves_prior() {
        let curve = normal_power_curve(10.0).unwrap();
        let prior = std_mixed(0.0);
        let post = posterior_given_nonsignificance(&prior, &curve, 1).unwrap();
        for i in 0..=80 {
            let t = -4.0 + 0.1 * i as f64;
            assert!((post.continuous_density(t) - prior.continuous_density(t)).abs() < 1e-4);
        }
    }

    #[test]
    fn significance_with_tiny_power_keeps_relative_accuracy() {
        // P(sig) ≈ 2Φ(-10/√2) ≈ 1.5e-12 would vanish under the absolute tolerance.
        let curve = normal_power_curve(10.0).unwrap();
        let prior = std_mixed(0.0);
        let p = marginal_significance_probability(&prior, &curve, 1).unwrap();
        let want = 2.0 * special::cdf(-10.0 / 2f64.sqrt());
        assert!(((p - want) / want).abs() < 1e-6, "{p} vs {want}");
        let post = posterior_given_significance(&prior, &curve, 1).unwrap();
        assert!((post.continuous_mass().unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn decay_rate_for_normal_curve() {
        let curve = normal_power_curve(1.96).unwrap();
        let d1 = decay_rate_estimate(&curve, 1.0, &[100, 1_000, 10_000]).unwrap();
        assert!((d1 - 0.5).abs() < 1e-2, "{d1}");
        let d2 = decay_rate_estimate(&curve, 2.0, &[100, 1_000, 10_000]).unwrap();
        assert!((d2 - 2.0).abs() < 5e-2, "{d2}");
        assert!(decay_rate_estimate(&curve, 0.0, &[100, 1_000, 10_000]).is_err());
        assert!(decay_rate_estimate(&curve, 1.0, &[100, 1_000]).is_err());
        assert!(decay_rate_estimate(&curve, 1.0, &[100, 100, 1_000]).is_err());
    }

    #[test]
    fn local_power_of_normal_curve_is_twice_c() {
        let curve = normal_power_curve(1.96).unwrap();
        let v = local_power_diagnostic(&curve, 1_000_000).unwrap();
        assert!((v - 3.92).abs() < 1e-8, "{v}");
    }

    #[test]
    fn mixed_prior_validation() {
        assert!(MixedPrior::normal(1.0, NormalPrior::standard()).is_err());
        assert!(MixedPrior::normal(-0.1, NormalPrior::standard()).is_err());
        let far = NormalPrior::new(100.0, 1.0).unwrap();
        assert!(
            MixedPrior::normal(0.2, far).is_err(),
            "density at zero underflows"
        );
        let half = TabulatedDensity::new(
            |t| 0.5 * special::pdf(t),
            Interval {
                lo: -10.0,
                hi: 10.0,
            },
        )
        .unwrap();
        assert!(MixedPrior::new(0.2, Arc::new(half)).is_err(), "mass 1/2");
    }

    #[test]
    fn tabulated_quantile_inverts_cdf() {
        let tri = TabulatedDensity::new(
            |t: f64| (1.0 - t.abs()).max(0.0),
            Interval { lo: -1.0, hi: 1.0 },
        )
        .unwrap();
        assert!((tri.quantile(0.5).unwrap()).abs() < 1e-9);
        // P(θ ≤ x) = (1 + x)²/2 for x ≤ 0
        let x = tri.quantile(0.125).unwrap();
        assert!((x + 0.5).abs() < 1e-6, "{x}");
        assert!(MixedPrior::new(0.3, Arc::new(tri)).is_ok());
    }

    #[test]
    fn custom_curve_from_type2() {
        // A one-sided-looking curve built from plain β.
        let c = 1.6448536269514722;
        let curve = TestPowerCurve::from_type2(0.05, move |theta, n| {
            special::cdf(c - (n as f64).sqrt() * theta.abs())
        })
        .unwrap();
        assert!((curve.type2_at(0.0, 50) - 0.95).abs() < 1e-12);
        assert!((curve.power_at(0.0, 50) - 0.05).abs() < 1e-12);
        let post = posterior_given_significance(&std_mixed(0.3), &curve, 400).unwrap();
        let total = post.mass_at_zero() + post.continuous_mass().unwrap();
        assert!((total - 1.0).abs() < 1e-6);
    }
}
