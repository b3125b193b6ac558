//! Monte Carlo cross-check of the analytic posteriors.
//!
//! Every check simulates once and yields a z-score: the event probability is
//! read off the number of retained draws, and the retained `θ` values are
//! binned and compared with the analytic posterior.

use serde_json::json;
use sigpost::general_model::{
    normal_power_curve, posterior_given_nonsignificance, posterior_given_significance,
    MixedPosterior, MixedPrior,
};
use sigpost::interval_null::{interval_posterior, IntervalNullDesign};
use sigpost::mc_oracle::{
    compare_histogram_to_density_with, estimate_conditional_histogram, ConditionalHistogram,
    Experiment, McEstimate, SimulationPlan,
};
use sigpost::normal_model::{
    posterior_given_event, ConditionalPosterior, NormalPrior, PointNullDesign, SignificanceEvent,
};
use sigpost::numerics::{Interval, QuadratureSpec};

use crate::error::{usage, CliResult};

/// Below this many draws the report is marked as weak.
pub const RECOMMENDED_DRAWS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub draws: u64,
    pub seed: u64,
    pub z_threshold: f64,
    pub bins: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            draws: 1_000_000,
            seed: 42,
            z_threshold: 4.0,
            bins: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    /// A z-score; `+∞` when the check could not be evaluated.
    pub statistic: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub options: VerifyOptions,
    pub weak: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Human-readable report. Identical options give identical text.
    pub fn render(&self) -> String {
        let o = &self.options;
        let mut s = format!(
            "# verify draws={} seed={} z_threshold={} bins={}\n",
            o.draws, o.seed, o.z_threshold, o.bins
        );
        if self.weak {
            s.push_str(&format!(
                "# warning: fewer than {RECOMMENDED_DRAWS} draws, results are weak\n"
            ));
        }
        for c in &self.checks {
            s.push_str(&format!(
                "{:<4} {:<48} z={:.4} {}\n",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.statistic,
                c.detail
            ));
        }
        let failed = self.failures().count();
        s.push_str(&format!(
            "result: {} ({} of {} checks passed)\n",
            if failed == 0 { "PASS" } else { "FAIL" },
            self.checks.len() - failed,
            self.checks.len()
        ));
        s
    }

    /// Machine-readable list of failed checks.
    pub fn failures_json(&self) -> String {
        let list: Vec<_> = self
            .failures()
            .map(|c| {
                json!({
                    "check": c.name,
                    "statistic": if c.statistic.is_finite() { json!(c.statistic) } else { json!(null) },
                    "threshold": self.options.z_threshold,
                    "detail": c.detail,
                })
            })
            .collect();
        serde_json::to_string_pretty(&json!({
            "seed": self.options.seed,
            "draws": self.options.draws,
            "failures": list,
        }))
        .expect("json values always serialize")
    }
}

struct Checker<'a> {
    opts: &'a VerifyOptions,
    weak: bool,
    spec: QuadratureSpec,
    checks: Vec<CheckResult>,
}

impl Checker<'_> {
    fn plan(&self, range: Interval, salt: u64) -> CliResult<SimulationPlan> {
        // Each check gets its own seed so that no two share draws.
        let seed = self
            .opts
            .seed
            .wrapping_add(salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let plan = if self.weak {
            SimulationPlan::permissive(self.opts.draws, seed, self.opts.bins, range)?
        } else {
            SimulationPlan::new(self.opts.draws, seed, self.opts.bins, range)?
        };
        Ok(plan)
    }

    fn push(&mut self, name: String, statistic: f64, detail: String) {
        let passed = statistic <= self.opts.z_threshold;
        self.checks.push(CheckResult {
            name,
            statistic,
            passed,
            detail,
        });
    }

    fn unavailable(&mut self, name: String, err: impl std::fmt::Display) {
        self.checks.push(CheckResult {
            name,
            statistic: f64::INFINITY,
            passed: false,
            detail: err.to_string(),
        });
    }

    fn simulate(
        &mut self,
        label: &str,
        prior: &MixedPrior,
        experiment: &Experiment,
        event: SignificanceEvent,
        plan: &SimulationPlan,
    ) -> Option<ConditionalHistogram> {
        match estimate_conditional_histogram(prior, experiment, event, plan) {
            Ok(h) => Some(h),
            Err(e) => {
                self.unavailable(format!("{label}/{event}"), e);
                None
            }
        }
    }

    fn probability(&mut self, name: String, hist: &ConditionalHistogram, draws: u64, exact: f64) {
        let p = hist.conditioning_draws as f64 / draws as f64;
        let est = McEstimate {
            value: p,
            std_error: (p * (1.0 - p) / draws as f64).sqrt(),
            hits: hist.conditioning_draws,
            draws_used: draws,
            degenerate: hist.conditioning_draws == 0,
        };
        let z = est.z_score(exact);
        self.push(name, z, format!("mc={:.6} exact={:.6}", est.value, exact));
    }

    fn histogram<F: Fn(f64) -> f64>(
        &mut self,
        name: String,
        hist: &ConditionalHistogram,
        density: F,
        breaks: &[f64],
    ) {
        match compare_histogram_to_density_with(hist, density, breaks, &self.spec) {
            Ok(z) => self.push(name, z, format!("retained={}", hist.continuous_draws())),
            Err(e) => self.unavailable(name, e),
        }
    }

    fn conditional(
        &mut self,
        label: &str,
        salt: u64,
        prior: &NormalPrior,
        experiment: &Experiment,
        event: SignificanceEvent,
        post: &ConditionalPosterior,
    ) -> CliResult<()> {
        let mixed = MixedPrior::normal(0.0, *prior)?;
        let plan = self.plan(prior.window(4.0), salt)?;
        if let Some(h) = self.simulate(label, &mixed, experiment, event, &plan) {
            self.probability(
                format!("{label}/{event}/probability"),
                &h,
                plan.draws(),
                post.event_probability(),
            );
            self.histogram(
                format!("{label}/{event}/histogram"),
                &h,
                |t| post.density(t),
                post.breakpoints(),
            );
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn mixed(
        &mut self,
        label: &str,
        salt: u64,
        prior: &MixedPrior,
        experiment: &Experiment,
        event: SignificanceEvent,
        post: &MixedPosterior,
        range: Interval,
    ) -> CliResult<()> {
        let plan = self.plan(range, salt)?;
        let Some(h) = self.simulate(label, prior, experiment, event, &plan) else {
            return Ok(());
        };
        self.probability(
            format!("{label}/{event}/probability"),
            &h,
            plan.draws(),
            post.event_probability(),
        );
        let m = post.mass_at_zero();
        let se = (m * (1.0 - m) / h.conditioning_draws as f64).sqrt();
        let d = (h.atom_fraction() - m).abs();
        let z = if se > 0.0 {
            d / se
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        self.push(
            format!("{label}/{event}/atom"),
            z,
            format!("mc={:.6} exact={:.6}", h.atom_fraction(), m),
        );
        let scale = 1.0 - m;
        if h.continuous_draws() > 0 && scale > 0.0 {
            self.histogram(
                format!("{label}/{event}/histogram"),
                &h,
                |t| post.continuous_density(t) / scale,
                &[0.0],
            );
        }
        Ok(())
    }
}

/// Run every cross-check.
pub fn cmd_verify(opts: &VerifyOptions) -> CliResult<VerifyReport> {
    if !(opts.z_threshold.is_finite() && opts.z_threshold > 0.0) {
        return Err(usage(format!(
            "--z-threshold must be positive, got {}",
            opts.z_threshold
        )));
    }
    if opts.draws == 0 {
        return Err(usage("--draws must be at least 1"));
    }
    if opts.bins < 1 {
        return Err(usage("--bins must be at least 1"));
    }
    let weak = opts.draws < RECOMMENDED_DRAWS;
    if weak {
        log::warn!(
            "{} draws is below the recommended {RECOMMENDED_DRAWS}; the verification is weak",
            opts.draws
        );
    }
    let mut ck = Checker {
        opts,
        weak,
        spec: QuadratureSpec::default(),
        checks: Vec::new(),
    };

    // Normal prior with a point null, every event.
    let prior = NormalPrior::new(1.0, 1.0)?;
    let design = PointNullDesign::new(10, 1.96)?;
    let experiment = Experiment::PointNull(design);
    for (i, event) in SignificanceEvent::ALL.into_iter().enumerate() {
        let post = posterior_given_event(&prior, &design, event)?;
        ck.conditional("normal", i as u64, &prior, &experiment, event, &post)?;
    }

    // Point mass at zero with a normal power curve.
    let mixed = MixedPrior::normal(0.5, NormalPrior::standard())?;
    let curve = normal_power_curve(1.96)?;
    let n = 100;
    let experiment = Experiment::Curve {
        curve: curve.clone(),
        n,
    };
    let range = Interval::new(-4.0, 4.0)?;
    let sig = posterior_given_significance(&mixed, &curve, n)?;
    ck.mixed(
        "atom",
        10,
        &mixed,
        &experiment,
        SignificanceEvent::Significant,
        &sig,
        range,
    )?;
    let non = posterior_given_nonsignificance(&mixed, &curve, n)?;
    ck.mixed(
        "atom",
        11,
        &mixed,
        &experiment,
        SignificanceEvent::NonSignificant,
        &non,
        range,
    )?;

    // Interval null.
    let design = IntervalNullDesign::new(10_000, 1.0, 0.05)?;
    let experiment = Experiment::IntervalNull(design);
    for (i, significant) in [true, false].into_iter().enumerate() {
        let post = interval_posterior(&prior, &design, significant)?;
        let event = if significant {
            SignificanceEvent::Significant
        } else {
            SignificanceEvent::NonSignificant
        };
        ck.conditional("interval", 20 + i as u64, &prior, &experiment, event, &post)?;
    }

    Ok(VerifyReport {
        options: opts.clone(),
        weak,
        checks: ck.checks,
    })
}
