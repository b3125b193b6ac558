//! Brute-force Monte Carlo oracle.
//!
//! Simulates the whole generative process: `θ` from the prior, the t-ratio
//! (or the test outcome, for an opaque power curve) given `θ`, then
//! classifies the draw. It shares no code path with the closed forms beyond
//! the Normal quantile used to turn uniforms into variates.
//!
//! # Reproducibility
//!
//! Draws are split into fixed shards of `SHARD_SIZE`. Shard `k` reads its
//! uniforms from ChaCha8 seeded with `seed` on stream `k`, three 64-bit words
//! per draw (atom selector, prior quantile, noise quantile), each mapped to
//! `(0, 1)` as `((w >> 11) + 1/2)·2⁻⁵³`. Shards run in parallel and are merged
//! in shard order with integer counts, so results do not depend on the number
//! of worker threads.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::general_model::{MixedPrior, TestPowerCurve};
use crate::interval_null::IntervalNullDesign;
use crate::normal_model::{PointNullDesign, SignificanceEvent};
use crate::numerics::special;
use crate::numerics::{integrate_with_breaks, Interval, QuadratureSpec};

/// Draws per shard (and per random stream).
pub const SHARD_SIZE: u64 = 1 << 16;

/// Minimum retained draws for a conditional histogram.
pub const MIN_CONDITIONING_DRAWS: u64 = 100;

const MIN_PLAN_DRAWS: u64 = 10_000;
const MIN_PLAN_BINS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationPlan {
    draws: u64,
    seed: u64,
    bins: usize,
    range: Interval,
}

impl SimulationPlan {
    /// Requires at least 10⁴ draws and 20 bins over a range of positive width.
    pub fn new(draws: u64, seed: u64, bins: usize, range: Interval) -> Result<Self> {
        if draws < MIN_PLAN_DRAWS {
            return Err(Error::InvalidArgument(format!(
                "a simulation plan needs at least {MIN_PLAN_DRAWS} draws, got {draws}"
            )));
        }
        Self::permissive(draws, seed, bins, range)
    }

    /// Like [`SimulationPlan::new`] but accepts any positive number of draws.
    /// Standard-error based checks are weak below 10⁴ draws.
    pub fn permissive(draws: u64, seed: u64, bins: usize, range: Interval) -> Result<Self> {
        if draws == 0 {
            return Err(Error::InvalidArgument("draws must be positive".into()));
        }
        if bins < MIN_PLAN_BINS {
            return Err(Error::InvalidArgument(format!(
                "need at least {MIN_PLAN_BINS} bins, got {bins}"
            )));
        }
        if !(range.lo.is_finite() && range.hi.is_finite() && range.width() > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "histogram range [{}, {}] must be finite with positive width",
                range.lo, range.hi
            )));
        }
        Ok(SimulationPlan {
            draws,
            seed,
            bins,
            range,
        })
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn range(&self) -> Interval {
        self.range
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        SimulationPlan {
            seed,
            ..self.clone()
        }
    }
}

/// A frequency estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    /// Draws that landed in the event.
    pub hits: u64,
    pub draws_used: u64,
    /// No draw landed in the event.
    pub degenerate: bool,
}

impl McEstimate {
    fn from_counts(hits: u64, draws: u64) -> Self {
        let p = hits as f64 / draws as f64;
        McEstimate {
            value: p,
            std_error: (p * (1.0 - p) / draws as f64).sqrt(),
            hits,
            draws_used: draws,
            degenerate: hits == 0,
        }
    }

    /// `|value - target|` in units of the standard error. A zero standard
    /// error gives 0 on an exact match and `+∞` otherwise.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.value - target).abs();
        if self.std_error > 0.0 {
            d / self.std_error
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Histogram of `θ` over the draws that landed in the conditioning event.
///
/// The first and last bins are open-ended (`bin_edges` starts at `-∞` and
/// ends at `+∞`), so every retained continuous draw is binned. Draws of the
/// prior atom at zero are counted in `atom_draws` and never binned.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalHistogram {
    pub bin_edges: Vec<f64>,
    pub masses: Vec<f64>,
    pub conditioning_draws: u64,
    pub atom_draws: u64,
}

impl ConditionalHistogram {
    pub fn continuous_draws(&self) -> u64 {
        self.conditioning_draws - self.atom_draws
    }

    /// Fraction of retained draws that sit exactly at the atom.
    pub fn atom_fraction(&self) -> f64 {
        self.atom_draws as f64 / self.conditioning_draws as f64
    }
}

/// What is simulated given `θ`.
#[derive(Debug, Clone)]
pub enum Experiment {
    PointNull(PointNullDesign),
    IntervalNull(IntervalNullDesign),
    /// Only the binary outcome, drawn with probability `1 - β_n(θ)`.
    Curve {
        curve: TestPowerCurve,
        n: u64,
    },
}

impl From<PointNullDesign> for Experiment {
    fn from(d: PointNullDesign) -> Self {
        Experiment::PointNull(d)
    }
}

impl From<IntervalNullDesign> for Experiment {
    fn from(d: IntervalNullDesign) -> Self {
        Experiment::IntervalNull(d)
    }
}

impl Experiment {
    fn check_event(&self, event: SignificanceEvent) -> Result<()> {
        match self {
            Experiment::Curve { .. }
                if !SignificanceEvent::TWO_WAY.contains(&event) =>
            {
                Err(Error::Unsupported(format!(
                    "event {event} needs the sign of the estimate, which a power curve does not model"
                )))
            }
            Experiment::Curve { n: 0, .. } => {
                Err(Error::InvalidArgument("sample size n must be >= 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// Does a draw with parameter `theta` and noise uniform `u` land in `event`?
    fn lands_in(&self, event: SignificanceEvent, theta: f64, u: f64) -> bool {
        match self {
            Experiment::PointNull(d) => {
                let t = d.sqrt_n() * theta + special::quantile(u);
                event.contains(t, d.c())
            }
            Experiment::IntervalNull(d) => {
                let t = d.sqrt_n() * theta + special::quantile(u);
                event.contains(t, d.c())
            }
            Experiment::Curve { curve, n } => {
                let significant = u < curve.power_at(theta, *n);
                significant == event.is_significant()
            }
        }
    }
}

#[inline]
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// One simulated replication.
struct Draw {
    index: u64,
    theta: f64,
    atom: bool,
    noise: f64,
}

/// Run `fold` over every draw, shard by shard, and merge shard results in
/// order.
fn simulate<R, I, F, M>(
    prior: &MixedPrior,
    plan: &SimulationPlan,
    init: I,
    fold: F,
    merge: M,
) -> Result<R>
where
    R: Send,
    I: Fn() -> R + Sync,
    F: Fn(&mut R, &Draw) + Sync,
    M: Fn(R, R) -> R,
{
    let continuous = prior.continuous();
    if continuous.quantile(0.5).is_none() {
        return Err(Error::Unsupported(
            "continuous prior has no quantile function, cannot be sampled".into(),
        ));
    }
    let q = prior.q();
    let shards = plan.draws.div_ceil(SHARD_SIZE);
    let results: Vec<R> = (0..shards)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
            rng.set_stream(k);
            let start = k * SHARD_SIZE;
            let end = (start + SHARD_SIZE).min(plan.draws);
            let mut acc = init();
            for index in start..end {
                let selector = uniform(&mut rng);
                let u_prior = uniform(&mut rng);
                let noise = uniform(&mut rng);
                let atom = selector < q;
                let theta = if atom {
                    0.0
                } else {
                    continuous.quantile(u_prior).unwrap_or(f64::NAN)
                };
                fold(
                    &mut acc,
                    &Draw {
                        index,
                        theta,
                        atom,
                        noise,
                    },
                );
            }
            acc
        })
        .collect();
    let mut it = results.into_iter();
    let first = it.next().unwrap_or_else(&init);
    Ok(it.fold(first, merge))
}

/// Estimate `P(event)` under the prior predictive.
pub fn estimate_event_probability(
    prior: &MixedPrior,
    experiment: &Experiment,
    event: SignificanceEvent,
    plan: &SimulationPlan,
) -> Result<McEstimate> {
    let (first, second) = count_hits_by_half(prior, experiment, event, plan)?;
    Ok(McEstimate::from_counts(first + second, plan.draws))
}

/// Separate estimates from the first `⌊N/2⌋` draws and from the rest.
pub fn estimate_event_probability_split(
    prior: &MixedPrior,
    experiment: &Experiment,
    event: SignificanceEvent,
    plan: &SimulationPlan,
) -> Result<(McEstimate, McEstimate)> {
    let half = plan.draws / 2;
    if half == 0 {
        return Err(Error::InvalidArgument(
            "need at least 2 draws to split".into(),
        ));
    }
    let (first, second) = count_hits_by_half(prior, experiment, event, plan)?;
    Ok((
        McEstimate::from_counts(first, half),
        McEstimate::from_counts(second, plan.draws - half),
    ))
}

fn count_hits_by_half(
    prior: &MixedPrior,
    experiment: &Experiment,
    event: SignificanceEvent,
    plan: &SimulationPlan,
) -> Result<(u64, u64)> {
    experiment.check_event(event)?;
    let half = plan.draws / 2;
    simulate(
        prior,
        plan,
        || (0u64, 0u64),
        |acc, d| {
            if experiment.lands_in(event, d.theta, d.noise) {
                if d.index < half {
                    acc.0 += 1;
                } else {
                    acc.1 += 1;
                }
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    )
}

/// Estimate the probabilities of several events from one shared set of draws.
pub fn estimate_partition(
    prior: &MixedPrior,
    experiment: &Experiment,
    events: &[SignificanceEvent],
    plan: &SimulationPlan,
) -> Result<Vec<McEstimate>> {
    for &e in events {
        experiment.check_event(e)?;
    }
    let counts = simulate(
        prior,
        plan,
        || vec![0u64; events.len()],
        |acc, d| {
            for (slot, &e) in acc.iter_mut().zip(events) {
                if experiment.lands_in(e, d.theta, d.noise) {
                    *slot += 1;
                }
            }
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    )?;
    Ok(counts
        .into_iter()
        .map(|h| McEstimate::from_counts(h, plan.draws))
        .collect())
}

/// Histogram of `θ` among draws landing in `event`.
pub fn estimate_conditional_histogram(
    prior: &MixedPrior,
    experiment: &Experiment,
    event: SignificanceEvent,
    plan: &SimulationPlan,
) -> Result<ConditionalHistogram> {
    experiment.check_event(event)?;
    let bins = plan.bins;
    let Interval { lo, hi } = plan.range;
    let width = (hi - lo) / bins as f64;
    // slot 0: below lo, slots 1..=bins: interior, slot bins+1: at or above hi
    let slots = bins + 2;
    let (counts, atoms) = simulate(
        prior,
        plan,
        || (vec![0u64; slots], 0u64),
        |acc, d| {
            if !experiment.lands_in(event, d.theta, d.noise) {
                return;
            }
            if d.atom {
                acc.1 += 1;
                return;
            }
            let slot = if d.theta < lo {
                0
            } else if d.theta >= hi {
                bins + 1
            } else {
                (((d.theta - lo) / width) as usize).min(bins - 1) + 1
            };
            acc.0[slot] += 1;
        },
        |mut a, b| {
            a.0.iter_mut().zip(b.0).for_each(|(x, y)| *x += y);
            (a.0, a.1 + b.1)
        },
    )?;
    let continuous: u64 = counts.iter().sum();
    let retained = continuous + atoms;
    if retained < MIN_CONDITIONING_DRAWS {
        return Err(Error::InsufficientConditioning {
            retained,
            required: MIN_CONDITIONING_DRAWS,
        });
    }
    let mut bin_edges = Vec::with_capacity(slots + 1);
    bin_edges.push(f64::NEG_INFINITY);
    bin_edges.extend((0..=bins).map(|i| if i == bins { hi } else { lo + width * i as f64 }));
    bin_edges.push(f64::INFINITY);
    let masses = if continuous == 0 {
        vec![0.0; slots]
    } else {
        counts
            .iter()
            .map(|&c| c as f64 / continuous as f64)
            .collect()
    };
    Ok(ConditionalHistogram {
        bin_edges,
        masses,
        conditioning_draws: retained,
        atom_draws: atoms,
    })
}

/// Analytic mass of each histogram bin under `density`. Open-ended bins are
/// integrated out to ten histogram spans beyond the finite range.
pub fn analytic_bin_masses<F>(
    hist: &ConditionalHistogram,
    density: F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
{
    let k = hist.bin_edges.len();
    let lo = hist.bin_edges[1];
    let hi = hist.bin_edges[k - 2];
    let reach = 10.0 * (hi - lo);
    hist.bin_edges
        .windows(2)
        .map(|w| {
            let a = if w[0].is_finite() { w[0] } else { lo - reach };
            let b = if w[1].is_finite() { w[1] } else { hi + reach };
            integrate_with_breaks(&density, Interval { lo: a, hi: b }, breaks, spec)
        })
        .collect()
}

/// Largest per-bin discrepancy between the histogram and `density`, in units
/// of the multinomial standard error `√(p(1 - p)/N)` of that bin.
///
/// `density` must integrate to one; for a posterior with an atom, pass the
/// continuous density divided by `1 - mass_at_zero`.
pub fn compare_histogram_to_density<F>(hist: &ConditionalHistogram, density: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    compare_histogram_to_density_with(hist, density, &[], &QuadratureSpec::default())
}

/// [`compare_histogram_to_density`] with quadrature breakpoints and tolerances.
pub fn compare_histogram_to_density_with<F>(
    hist: &ConditionalHistogram,
    density: F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let expected = analytic_bin_masses(hist, density, breaks, spec)?;
    let n = hist.continuous_draws() as f64;
    Ok(hist
        .masses
        .iter()
        .zip(&expected)
        .map(|(&emp, &p)| {
            let p = p.clamp(0.0, 1.0);
            // √n is factored out so that bins with subnormal mass do not
            // underflow the standard error to zero.
            let sd = (p * (1.0 - p)).sqrt();
            let d = (emp - p).abs();
            if sd > 0.0 {
                d * n.sqrt() / sd
            } else if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_model::NormalPrior;

    fn plan(draws: u64, seed: u64) -> SimulationPlan {
        SimulationPlan::new(draws, seed, 40, Interval { lo: -3.0, hi: 5.0 }).unwrap()
    }

    #[test]
    fn subnormal_bin_mass_is_not_a_discrepancy() {
        let hist = ConditionalHistogram {
            bin_edges: vec![f64::NEG_INFINITY, -1.0, 38.2, 38.5, f64::INFINITY],
            masses: vec![0.158_655_253_931_457_05, 0.841_344_746_068_542_9, 0.0, 0.0],
            conditioning_draws: 1_000_000,
            atom_draws: 0,
        };
        // N(0, 1) puts a mass near 1e-319 on [38.2, 38.5]
        let z = compare_histogram_to_density(&hist, crate::numerics::special::pdf).unwrap();
        assert!(z < 1e-10, "{z}");
    }

    fn fig1_prior() -> MixedPrior {
        MixedPrior::normal(0.0, NormalPrior::new(1.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn plan_validation() {
        let r = Interval { lo: 0.0, hi: 1.0 };
        assert!(SimulationPlan::new(9_999, 1, 40, r).is_err());
        assert!(SimulationPlan::new(10_000, 1, 19, r).is_err());
        assert!(SimulationPlan::new(10_000, 1, 40, Interval { lo: 1.0, hi: 1.0 }).is_err());
        assert!(SimulationPlan::permissive(1_000, 1, 40, r).is_ok());
    }

    #[test]
    fn always_rejecting_test() {
        let exp = Experiment::PointNull(PointNullDesign::new(10, 0.0).unwrap());
        let est = estimate_event_probability(
            &fig1_prior(),
            &exp,
            SignificanceEvent::Significant,
            &plan(20_000, 3),
        )
        .unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn deterministic_given_seed() {
        let exp = Experiment::PointNull(PointNullDesign::new(10, 1.96).unwrap());
        let p = plan(150_000, 77);
        let a = estimate_conditional_histogram(
            &fig1_prior(),
            &exp,
            SignificanceEvent::NonSignificant,
            &p,
        )
        .unwrap();
        let b = estimate_conditional_histogram(
            &fig1_prior(),
            &exp,
            SignificanceEvent::NonSignificant,
            &p,
        )
        .unwrap();
        assert_eq!(a, b);
        let c = estimate_conditional_histogram(
            &fig1_prior(),
            &exp,
            SignificanceEvent::NonSignificant,
            &p.with_seed(78),
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn histogram_shape_invariants() {
        let exp = Experiment::PointNull(PointNullDesign::new(10, 1.96).unwrap());
        let h = estimate_conditional_histogram(
            &fig1_prior(),
            &exp,
            SignificanceEvent::Significant,
            &plan(50_000, 5),
        )
        .unwrap();
        assert_eq!(h.masses.len(), h.bin_edges.len() - 1);
        assert!((h.masses.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(h.bin_edges.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(h.atom_draws, 0);
    }

    #[test]
    fn sign_events_need_a_t_ratio() {
        let exp = Experiment::Curve {
            curve: crate::general_model::normal_power_curve(1.96).unwrap(),
            n: 10,
        };
        let err = estimate_event_probability(
            &fig1_prior(),
            &exp,
            SignificanceEvent::SignificantPositive,
            &plan(10_000, 1),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn rare_event_is_insufficient() {
        let exp = Experiment::PointNull(PointNullDesign::new(10, 6.0).unwrap());
        let prior = MixedPrior::normal(0.0, NormalPrior::new(0.0, 0.01).unwrap()).unwrap();
        let err = estimate_conditional_histogram(
            &prior,
            &exp,
            SignificanceEvent::Significant,
            &plan(10_000, 1),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InsufficientConditioning { .. }));
    }

    #[test]
    fn identical_histogram_scores_zero() {
        let hist = ConditionalHistogram {
            bin_edges: vec![f64::NEG_INFINITY, -1.0, 0.0, 1.0, f64::INFINITY],
            masses: vec![],
            conditioning_draws: 1_000,
            atom_draws: 0,
        };
        let expected =
            analytic_bin_masses(&hist, special::pdf, &[], &QuadratureSpec::default()).unwrap();
        let hist = ConditionalHistogram {
            masses: expected,
            ..hist
        };
        let z = compare_histogram_to_density(&hist, special::pdf).unwrap();
        assert!(z < 1e-6, "{z}");
    }

    #[test]
    fn uniforms_are_open_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10_000 {
            let u = uniform(&mut rng);
            assert!(u > 0.0 && u < 1.0);
        }
    }
}
