//! Builders for the figure tables and the generic posterior table.

use sigpost::general_model::{
    doubling_threshold, normal_power_curve, posterior_given_nonsignificance,
    posterior_given_significance, significance_ratio_limit, MixedPrior,
};
use sigpost::interval_null::{interval_posterior, IntervalNullDesign};
use sigpost::normal_model::{
    event_probability, posterior_given_event, ConditionalPosterior, NormalPrior, PointNullDesign,
    SignificanceEvent,
};
use sigpost::numerics::special;
use sigpost::numerics::{Interval, QuadratureSpec};

use crate::error::{usage, CliResult};
use crate::table::{format_number, CurveTable};

/// Evaluation grid for θ. Unset ends fall back to a per-figure default.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub points: usize,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            points: 1001,
            lo: None,
            hi: None,
        }
    }
}

impl Grid {
    pub fn resolve(&self, default: Interval) -> CliResult<Vec<f64>> {
        let lo = self.lo.unwrap_or(default.lo);
        let hi = self.hi.unwrap_or(default.hi);
        if self.points < 2 {
            return Err(usage(format!(
                "--grid-points must be at least 2, got {}",
                self.points
            )));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(usage(format!(
                "grid range [{lo}, {hi}] must be finite and increasing"
            )));
        }
        let step = (hi - lo) / (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    hi
                } else {
                    lo + step * i as f64
                }
            })
            .collect())
    }
}

/// Prior and point-null design shared by several figures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalSetup {
    pub mu: f64,
    pub sigma: f64,
    pub n: u64,
    pub c: f64,
}

impl Default for NormalSetup {
    fn default() -> Self {
        NormalSetup {
            mu: 1.0,
            sigma: 1.0,
            n: 10,
            c: 1.96,
        }
    }
}

impl NormalSetup {
    fn build(&self) -> CliResult<(NormalPrior, PointNullDesign)> {
        Ok((
            NormalPrior::new(self.mu, self.sigma)?,
            PointNullDesign::new(self.n, self.c)?,
        ))
    }

    fn default_window(&self) -> Interval {
        Interval {
            lo: self.mu - 4.0 * self.sigma,
            hi: self.mu + 4.0 * self.sigma,
        }
    }

    fn record(&self, t: &mut CurveTable) {
        t.set_meta("mu", format_number(self.mu));
        t.set_meta("sigma", format_number(self.sigma));
        t.set_meta("n", self.n);
        t.set_meta("c", format_number(self.c));
    }
}

fn record_common(t: &mut CurveTable, command: &str, grid: &[f64]) {
    t.set_meta("command", command);
    t.set_meta("tool_version", env!("CARGO_PKG_VERSION"));
    t.set_meta("grid_points", grid.len());
    t.set_meta("theta_min", format_number(grid[0]));
    t.set_meta("theta_max", format_number(grid[grid.len() - 1]));
}

fn fill<F>(t: &mut CurveTable, grid: &[f64], row: F)
where
    F: Fn(f64) -> Vec<f64>,
{
    for &theta in grid {
        let mut r = vec![theta];
        r.extend(row(theta));
        t.push_row(r);
    }
}

/// Prior with the posteriors after a significant and a non-significant test.
pub fn cmd_figure1(setup: &NormalSetup, grid: &Grid) -> CliResult<CurveTable> {
    let (prior, design) = setup.build()?;
    let thetas = grid.resolve(setup.default_window())?;
    let sig = posterior_given_event(&prior, &design, SignificanceEvent::Significant)?;
    let non = posterior_given_event(&prior, &design, SignificanceEvent::NonSignificant)?;
    let mut t = CurveTable::new(
        ["theta", "prior", "post_significant", "post_nonsignificant"]
            .map(String::from)
            .to_vec(),
    );
    record_common(&mut t, "figure1", &thetas);
    setup.record(&mut t);
    t.set_meta("prob_significant", format_number(sig.event_probability()));
    fill(&mut t, &thetas, |x| {
        vec![prior.density(x), sig.density(x), non.density(x)]
    });
    Ok(t)
}

/// Prior and the significant posterior for each sample size in `n_list`.
pub fn cmd_figure2(
    mu: f64,
    sigma: f64,
    c: f64,
    n_list: &[u64],
    grid: &Grid,
) -> CliResult<CurveTable> {
    if n_list.is_empty() {
        return Err(usage("--n-list must name at least one sample size"));
    }
    let prior = NormalPrior::new(mu, sigma)?;
    let setup = NormalSetup {
        mu,
        sigma,
        n: n_list[0],
        c,
    };
    let thetas = grid.resolve(setup.default_window())?;
    let posts = n_list
        .iter()
        .map(|&n| {
            let design = PointNullDesign::new(n, c)?;
            Ok(posterior_given_event(
                &prior,
                &design,
                SignificanceEvent::Significant,
            )?)
        })
        .collect::<CliResult<Vec<ConditionalPosterior>>>()?;
    let mut names = vec!["theta".to_string(), "prior".to_string()];
    names.extend(n_list.iter().map(|n| format!("post_significant_n{n}")));
    let mut t = CurveTable::new(names);
    record_common(&mut t, "figure2", &thetas);
    t.set_meta("mu", format_number(mu));
    t.set_meta("sigma", format_number(sigma));
    t.set_meta("c", format_number(c));
    t.set_meta(
        "n_list",
        n_list
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    fill(&mut t, &thetas, |x| {
        std::iter::once(prior.density(x))
            .chain(posts.iter().map(|p| p.density(x)))
            .collect()
    });
    Ok(t)
}

/// Large-n posterior-to-prior ratio away from zero as a function of the
/// prior atom `q`, one column per test size.
pub fn cmd_figure3(alpha_list: &[f64], q_points: usize) -> CliResult<CurveTable> {
    if alpha_list.is_empty() {
        return Err(usage("--alpha-list must name at least one test size"));
    }
    if q_points < 2 {
        return Err(usage(format!(
            "--q-points must be at least 2, got {q_points}"
        )));
    }
    for &a in alpha_list {
        if !(a > 0.0 && a < 1.0) {
            return Err(usage(format!("test size {a} is outside (0, 1)")));
        }
    }
    let mut names = vec!["q".to_string()];
    names.extend(
        alpha_list
            .iter()
            .map(|a| format!("ratio_alpha_{}", format_number(*a))),
    );
    let mut t = CurveTable::new(names);
    t.set_meta("command", "figure3");
    t.set_meta("tool_version", env!("CARGO_PKG_VERSION"));
    t.set_meta("q_points", q_points);
    t.set_meta(
        "alpha_list",
        alpha_list
            .iter()
            .map(|a| format_number(*a))
            .collect::<Vec<_>>()
            .join(","),
    );
    for &a in alpha_list {
        if a < 0.5 {
            t.set_meta(
                &format!("doubling_q_alpha_{}", format_number(a)),
                format_number(doubling_threshold(a)?),
            );
        }
    }
    for i in 0..q_points {
        let q = i as f64 / q_points as f64;
        let mut row = vec![q];
        for &a in alpha_list {
            row.push(significance_ratio_limit(q, a)?);
        }
        t.push_row(row);
    }
    Ok(t)
}

/// Posteriors after an interval-null test for each half-width in `deltas`.
pub fn cmd_figure4(
    mu: f64,
    sigma: f64,
    alpha: f64,
    n: u64,
    deltas: &[f64],
    grid: &Grid,
) -> CliResult<CurveTable> {
    if deltas.is_empty() {
        return Err(usage("--delta-list must name at least one half-width"));
    }
    let prior = NormalPrior::new(mu, sigma)?;
    let thetas = grid.resolve(Interval { lo: -4.0, hi: 4.0 })?;
    let spec = QuadratureSpec::default();
    let mut names = vec!["theta".to_string(), "prior".to_string()];
    let mut posts = Vec::new();
    let mut t = CurveTable::new(Vec::new());
    for &delta in deltas {
        let design = IntervalNullDesign::new(n, delta, alpha)?;
        let key = format_number(delta);
        let sig = interval_posterior(&prior, &design, true)?;
        let non = interval_posterior(&prior, &design, false)?;
        let inside = Interval {
            lo: -delta,
            hi: delta,
        };
        t.set_meta(&format!("c_delta_{key}"), format_number(design.c()));
        t.set_meta(
            &format!("nonsig_mass_inside_delta_{key}"),
            format_number(non.mass(inside, &spec)?),
        );
        t.set_meta(
            &format!("sig_mass_inside_delta_{key}"),
            format_number(sig.mass(inside, &spec)?),
        );
        names.push(format!("post_significant_delta_{key}"));
        names.push(format!("post_nonsignificant_delta_{key}"));
        posts.push(sig);
        posts.push(non);
    }
    t.column_names = names;
    record_common(&mut t, "figure4", &thetas);
    t.set_meta("mu", format_number(mu));
    t.set_meta("sigma", format_number(sigma));
    t.set_meta("alpha", format_number(alpha));
    t.set_meta("n", n);
    t.set_meta(
        "delta_list",
        deltas
            .iter()
            .map(|d| format_number(*d))
            .collect::<Vec<_>>()
            .join(","),
    );
    fill(&mut t, &thetas, |x| {
        std::iter::once(prior.density(x))
            .chain(posts.iter().map(|p| p.density(x)))
            .collect()
    });
    Ok(t)
}

/// Posteriors after a significant and a non-significant test with a
/// positive estimate.
pub fn cmd_figure5(setup: &NormalSetup, grid: &Grid) -> CliResult<CurveTable> {
    let (prior, design) = setup.build()?;
    let thetas = grid.resolve(setup.default_window())?;
    let sig = posterior_given_event(&prior, &design, SignificanceEvent::SignificantPositive)?;
    let non = posterior_given_event(&prior, &design, SignificanceEvent::NonSignificantPositive)?;
    let mut t = CurveTable::new(
        [
            "theta",
            "prior",
            "post_sig_positive",
            "post_nonsig_positive",
        ]
        .map(String::from)
        .to_vec(),
    );
    record_common(&mut t, "figure5", &thetas);
    setup.record(&mut t);
    t.set_meta(
        "prob_significant_positive",
        format_number(sig.event_probability()),
    );
    t.set_meta(
        "prob_nonsignificant_positive",
        format_number(non.event_probability()),
    );
    fill(&mut t, &thetas, |x| {
        vec![prior.density(x), sig.density(x), non.density(x)]
    });
    Ok(t)
}

/// Flags of the generic `posterior` command.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorRequest {
    pub mu: f64,
    pub sigma: f64,
    pub n: u64,
    /// Critical value; derived from `alpha` when absent.
    pub c: Option<f64>,
    pub alpha: Option<f64>,
    pub event: SignificanceEvent,
    /// Prior mass at zero.
    pub q: f64,
    /// Half-width of an interval null; point null when absent.
    pub delta: Option<f64>,
}

/// Prior and posterior for any supported prior, design and event.
pub fn cmd_posterior(req: &PosteriorRequest, grid: &Grid) -> CliResult<CurveTable> {
    let prior = NormalPrior::new(req.mu, req.sigma)?;
    let thetas = grid.resolve(prior.window(4.0))?;
    let mut t = CurveTable::new(["theta", "prior", "posterior"].map(String::from).to_vec());
    record_common(&mut t, "posterior", &thetas);
    t.set_meta("mu", format_number(req.mu));
    t.set_meta("sigma", format_number(req.sigma));
    t.set_meta("n", req.n);
    t.set_meta("event", req.event);
    t.set_meta("q", format_number(req.q));

    if let Some(delta) = req.delta {
        let alpha = req
            .alpha
            .ok_or_else(|| usage("an interval null (--delta) needs --alpha to size the test"))?;
        if req.c.is_some() {
            return Err(usage(
                "--c cannot be combined with --delta; the critical value is solved from --alpha",
            ));
        }
        if req.q != 0.0 {
            return Err(usage("--q is only supported for point nulls"));
        }
        let significant = two_way(req.event)?;
        let design = IntervalNullDesign::new(req.n, delta, alpha)?;
        let post = interval_posterior(&prior, &design, significant)?;
        t.set_meta("delta", format_number(delta));
        t.set_meta("alpha", format_number(alpha));
        t.set_meta("c", format_number(design.c()));
        t.set_meta("event_probability", format_number(post.event_probability()));
        fill(&mut t, &thetas, |x| vec![prior.density(x), post.density(x)]);
        return Ok(t);
    }

    let c = match (req.c, req.alpha) {
        (Some(_), Some(_)) => return Err(usage("give either --c or --alpha, not both")),
        (Some(c), None) => c,
        (None, Some(a)) => {
            if !(a > 0.0 && a < 1.0) {
                return Err(usage(format!("--alpha {a} is outside (0, 1)")));
            }
            -special::quantile(0.5 * a)
        }
        (None, None) => 1.96,
    };
    t.set_meta("c", format_number(c));

    if req.q == 0.0 {
        let design = PointNullDesign::new(req.n, c)?;
        let post = posterior_given_event(&prior, &design, req.event)?;
        t.set_meta(
            "event_probability",
            format_number(event_probability(&prior, &design, req.event)),
        );
        fill(&mut t, &thetas, |x| vec![prior.density(x), post.density(x)]);
        return Ok(t);
    }

    // Atom at zero: the table holds the continuous parts, the atom goes to
    // the metadata.
    let significant = two_way(req.event)?;
    let mixed = MixedPrior::normal(req.q, prior)?;
    let curve = normal_power_curve(c)?;
    let post = if significant {
        posterior_given_significance(&mixed, &curve, req.n)?
    } else {
        posterior_given_nonsignificance(&mixed, &curve, req.n)?
    };
    t.set_meta("event_probability", format_number(post.event_probability()));
    t.set_meta("posterior_mass_at_zero", format_number(post.mass_at_zero()));
    fill(&mut t, &thetas, |x| {
        vec![(1.0 - req.q) * prior.density(x), post.continuous_density(x)]
    });
    Ok(t)
}

fn two_way(event: SignificanceEvent) -> CliResult<bool> {
    match event {
        SignificanceEvent::Significant => Ok(true),
        SignificanceEvent::NonSignificant => Ok(false),
        other => Err(usage(format!(
            "event '{other}' needs the sign of the estimate; only 'significant' and 'nonsignificant' are available here"
        ))),
    }
}
