use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sigpost::general_model::{
    decay_rate_estimate, doubling_threshold, normal_power_curve, significance_ratio_limit,
};
use sigpost::interval_null::{approximate_critical_value, solve_critical_value};
use sigpost::normal_model::SignificanceEvent;
use sigpost_cli::error::{CliError, CliResult};
use sigpost_cli::figures::{self, Grid, NormalSetup, PosteriorRequest};
use sigpost_cli::table::format_number;
use sigpost_cli::verify::{cmd_verify, VerifyOptions};
use sigpost_cli::{svg, CurveTable};

#[derive(Parser)]
#[command(
    name = "sigpost",
    version,
    about = "Posteriors that condition only on a significance-test outcome"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Output {
    /// Write the CSV table here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render the table as an SVG line plot.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct GridArgs {
    #[arg(long, default_value_t = 1001)]
    grid_points: usize,
    #[arg(long)]
    theta_min: Option<f64>,
    #[arg(long)]
    theta_max: Option<f64>,
}

impl From<&GridArgs> for Grid {
    fn from(g: &GridArgs) -> Self {
        Grid {
            points: g.grid_points,
            lo: g.theta_min,
            hi: g.theta_max,
        }
    }
}

#[derive(Args, Clone)]
struct NormalArgs {
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 10)]
    n: u64,
    #[arg(long, default_value_t = 1.96)]
    c: f64,
}

impl From<&NormalArgs> for NormalSetup {
    fn from(a: &NormalArgs) -> Self {
        NormalSetup {
            mu: a.mu,
            sigma: a.sigma,
            n: a.n,
            c: a.c,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Prior and posteriors after a significant or non-significant test.
    #[command(allow_negative_numbers = true)]
    Figure1 {
        #[command(flatten)]
        normal: NormalArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Significant posteriors for several sample sizes.
    #[command(allow_negative_numbers = true)]
    Figure2 {
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1.96)]
        c: f64,
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000")]
        n_list: Vec<u64>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Limiting posterior-to-prior ratio against the prior mass at zero.
    #[command(allow_negative_numbers = true)]
    Figure3 {
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.005")]
        alpha_list: Vec<f64>,
        #[arg(long, default_value_t = 1000)]
        q_points: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Posteriors after an interval-null test.
    #[command(allow_negative_numbers = true)]
    Figure4 {
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 10_000)]
        n: u64,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        delta_list: Vec<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Posteriors given significance and the sign of the estimate.
    #[command(allow_negative_numbers = true)]
    Figure5 {
        #[command(flatten)]
        normal: NormalArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Posterior for any supported prior, design and event.
    #[command(allow_negative_numbers = true)]
    Posterior {
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 10)]
        n: u64,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        /// significant, nonsignificant, or either with a -positive or
        /// -negative suffix.
        #[arg(long, default_value = "significant")]
        event: String,
        /// Prior mass at zero.
        #[arg(long, default_value_t = 0.0)]
        q: f64,
        /// Half-width of an interval null.
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Critical value of the interval-null test and its large-n approximation.
    #[command(allow_negative_numbers = true)]
    CriticalValue {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Large-n limits of the point-null test with a prior atom at zero.
    #[command(allow_negative_numbers = true)]
    Limits {
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Estimated decay rate of the type II error of the normal test at θ.
    #[command(allow_negative_numbers = true)]
    DecayRate {
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 1.96)]
        c: f64,
    },
    /// Cross-check the analytic posteriors by simulation.
    #[command(allow_negative_numbers = true)]
    Verify {
        #[arg(long, default_value_t = 1_000_000)]
        draws: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 4.0)]
        z_threshold: f64,
        #[arg(long, default_value_t = 40)]
        bins: usize,
        /// Write the JSON list of failed checks here.
        #[arg(long)]
        failures: Option<PathBuf>,
    },
}

fn emit(table: &CurveTable, output: &Output, title: &str) -> CliResult<()> {
    let csv = table.to_csv_string()?;
    match &output.out {
        Some(path) => fs::write(path, csv)?,
        None => io::stdout().write_all(csv.as_bytes())?,
    }
    if let Some(path) = &output.svg {
        fs::write(path, svg::render(table, title))?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Figure1 {
            normal,
            grid,
            output,
        } => {
            let t = figures::cmd_figure1(&(&normal).into(), &(&grid).into())?;
            emit(&t, &output, "Prior and conditional posteriors")?;
        }
        Command::Figure2 {
            mu,
            sigma,
            c,
            n_list,
            grid,
            output,
        } => {
            let t = figures::cmd_figure2(mu, sigma, c, &n_list, &(&grid).into())?;
            emit(&t, &output, "Posterior given significance by sample size")?;
        }
        Command::Figure3 {
            alpha_list,
            q_points,
            output,
        } => {
            let t = figures::cmd_figure3(&alpha_list, q_points)?;
            emit(&t, &output, "Limiting posterior-to-prior ratio")?;
        }
        Command::Figure4 {
            mu,
            sigma,
            alpha,
            n,
            delta_list,
            grid,
            output,
        } => {
            let t = figures::cmd_figure4(mu, sigma, alpha, n, &delta_list, &(&grid).into())?;
            emit(&t, &output, "Posteriors after an interval-null test")?;
        }
        Command::Figure5 {
            normal,
            grid,
            output,
        } => {
            let t = figures::cmd_figure5(&(&normal).into(), &(&grid).into())?;
            emit(&t, &output, "Posteriors given a positive estimate")?;
        }
        Command::Posterior {
            mu,
            sigma,
            n,
            c,
            alpha,
            event,
            q,
            delta,
            grid,
            output,
        } => {
            let event = SignificanceEvent::from_name(&event)
                .ok_or_else(|| CliError::Usage(format!("unknown event '{event}'")))?;
            let req = PosteriorRequest {
                mu,
                sigma,
                n,
                c,
                alpha,
                event,
                q,
                delta,
            };
            let t = figures::cmd_posterior(&req, &(&grid).into())?;
            emit(&t, &output, &format!("Posterior given {event}"))?;
        }
        Command::CriticalValue { n, delta, alpha } => {
            let exact = solve_critical_value(n, delta, alpha)?;
            let approx = approximate_critical_value(n, delta, alpha)?;
            println!("c={}", format_number(exact));
            println!("approximation={}", format_number(approx));
        }
        Command::Limits { q, alpha } => {
            println!(
                "ratio_away_from_zero={}",
                format_number(significance_ratio_limit(q, alpha)?)
            );
            println!("doubling_q={}", format_number(doubling_threshold(alpha)?));
        }
        Command::DecayRate { theta, c } => {
            let curve = normal_power_curve(c)?;
            let grid: Vec<u64> = (1..=8).map(|k| 100 * (1u64 << k)).collect();
            println!(
                "decay_rate={}",
                format_number(decay_rate_estimate(&curve, theta, &grid)?)
            );
            println!("closed_form={}", format_number(theta * theta / 2.0));
        }
        Command::Verify {
            draws,
            seed,
            z_threshold,
            bins,
            failures,
        } => {
            let report = cmd_verify(&VerifyOptions {
                draws,
                seed,
                z_threshold,
                bins,
            })?;
            print!("{}", report.render());
            let json = report.failures_json();
            match failures {
                Some(path) => fs::write(path, json)?,
                None if !report.passed() => eprintln!("{json}"),
                None => {}
            }
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
