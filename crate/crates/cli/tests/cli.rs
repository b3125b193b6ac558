use std::path::Path;
use std::process::{Command, Output};

use sigpost::interval_null::{interval_posterior, IntervalNullDesign};
use sigpost::normal_model::{
    posterior_given_event, NormalPrior, PointNullDesign, SignificanceEvent,
};
use sigpost::numerics::{Interval, QuadratureSpec};
use sigpost_cli::CurveTable;

fn sigpost(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sigpost"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn table(args: &[&str]) -> (CurveTable, String) {
    let out = sigpost(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    (CurveTable::read_csv(text.as_bytes()).unwrap(), text)
}

fn value_at(t: &CurveTable, col: &str, theta: f64) -> f64 {
    let i = t.column_index(col).unwrap();
    let row = t
        .rows
        .iter()
        .min_by(|a, b| (a[0] - theta).abs().total_cmp(&(b[0] - theta).abs()))
        .unwrap();
    row[i]
}

fn meta_f64(t: &CurveTable, key: &str) -> f64 {
    t.meta(key)
        .unwrap_or_else(|| panic!("missing {key}"))
        .parse()
        .unwrap()
}

#[test]
fn figure1_defaults() {
    let (t, _) = table(&["figure1"]);
    assert_eq!(
        t.column_names,
        ["theta", "prior", "post_significant", "post_nonsignificant"]
    );
    assert_eq!(t.rows.len(), 1001);
    assert_eq!(t.rows[0][0], -3.0);
    assert_eq!(t.rows[1000][0], 5.0);
    for (k, v) in [("mu", "1"), ("sigma", "1"), ("c", "1.96"), ("n", "10")] {
        assert_eq!(t.meta(k), Some(v), "{k}");
    }
    for col in ["post_significant", "post_nonsignificant"] {
        let m = t.trapezoid(col).unwrap();
        assert!((m - 1.0).abs() < 1e-3, "{col}: {m}");
    }
}

#[test]
fn figure1_nonsignificant_mode_near_zero() {
    let (t, _) = table(&["figure1"]);
    let i = t.column_index("post_nonsignificant").unwrap();
    let grid_mode = t.rows.iter().max_by(|a, b| a[i].total_cmp(&b[i])).unwrap()[0];
    assert!((-0.3..=0.3).contains(&grid_mode), "{grid_mode}");

    // Golden-section search on the analytic density for the true mode.
    let post = posterior_given_event(
        &NormalPrior::new(1.0, 1.0).unwrap(),
        &PointNullDesign::new(10, 1.96).unwrap(),
        SignificanceEvent::NonSignificant,
    )
    .unwrap();
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (-0.3, 0.6);
    for _ in 0..200 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if post.density(x1) < post.density(x2) {
            a = x1;
        } else {
            b = x2;
        }
    }
    let mode = 0.5 * (a + b);
    let step = t.rows[1][0] - t.rows[0][0];
    assert!(
        (grid_mode - mode).abs() <= 0.5 * step + 1e-12,
        "{grid_mode} vs {mode}"
    );
}

#[test]
fn figure2_information_is_local_to_zero() {
    let (t, _) = table(&["figure2"]);
    assert_eq!(
        t.column_names,
        [
            "theta",
            "prior",
            "post_significant_n10",
            "post_significant_n100",
            "post_significant_n1000",
            "post_significant_n10000"
        ]
    );
    let prior = t.column_index("prior").unwrap();
    let big = t.column_index("post_significant_n10000").unwrap();
    let far = t
        .rows
        .iter()
        .filter(|r| r[0].abs() > 0.2)
        .map(|r| (r[big] - r[prior]).abs())
        .fold(0.0, f64::max);
    assert!(far < 1e-2, "{far}");

    let p0 = value_at(&t, "prior", 0.0);
    let s0 = value_at(&t, "post_significant_n10", 0.0);
    assert!((s0 - p0).abs() / p0 > 0.5, "{s0} vs {p0}");

    for col in &t.column_names[2..] {
        let m = t.trapezoid(col).unwrap();
        assert!((m - 1.0).abs() < 1e-3, "{col}: {m}");
    }
}

fn crossing(t: &CurveTable, col: &str, level: f64) -> f64 {
    let i = t.column_index(col).unwrap();
    let w = t
        .rows
        .windows(2)
        .find(|w| w[0][i] < level && w[1][i] >= level)
        .expect("curve crosses the level");
    let s = (level - w[0][i]) / (w[1][i] - w[0][i]);
    w[0][0] + s * (w[1][0] - w[0][0])
}

#[test]
fn figure3_doubling_points() {
    let (t, _) = table(&["figure3"]);
    assert_eq!(
        t.column_names,
        ["q", "ratio_alpha_0.05", "ratio_alpha_0.005"]
    );
    assert_eq!(t.rows[0], [0.0, 1.0, 1.0]);
    assert!(t.rows.last().unwrap()[0] < 1.0);
    assert!((crossing(&t, "ratio_alpha_0.05", 2.0) - 0.5263).abs() < 5e-4);
    assert!((crossing(&t, "ratio_alpha_0.005", 2.0) - 0.5025).abs() < 5e-4);
    assert!((meta_f64(&t, "doubling_q_alpha_0.05") - 0.5263).abs() < 5e-5);
    assert!((meta_f64(&t, "doubling_q_alpha_0.005") - 0.5025).abs() < 5e-5);
}

#[test]
fn figure4_critical_values_and_masses() {
    let (t, _) = table(&["figure4"]);
    assert_eq!(t.rows[0][0], -4.0);
    assert_eq!(t.rows[1000][0], 4.0);
    assert!((meta_f64(&t, "c_delta_0.5") - 51.644_853_626_951_47).abs() < 1e-6);
    assert!((meta_f64(&t, "c_delta_1") - 101.644_853_626_951_47).abs() < 1e-6);

    // The non-significant mass inside (-δ, δ) is still short of one at
    // n = 10^4 for this prior; reference values from 40-digit quadrature.
    for (d, inside) in [
        ("0.5", 0.967_881_107_434_933_6),
        ("1", 0.984_475_464_129_928_3),
        ("2", 0.995_192_649_040_777),
    ] {
        let got = meta_f64(&t, &format!("nonsig_mass_inside_delta_{d}"));
        assert!((got - inside).abs() < 1e-9, "delta {d}: {got}");
    }

    // A mean-one prior leaves mass outside the default [-4, 4] window, so
    // each column is compared with its exact in-window mass.
    let prior = NormalPrior::new(1.0, 1.0).unwrap();
    let spec = QuadratureSpec::default();
    let window = Interval::new(-4.0, 4.0).unwrap();
    for delta in [0.5, 1.0, 2.0] {
        let design = IntervalNullDesign::new(10_000, delta, 0.05).unwrap();
        for (significant, label) in [(true, "significant"), (false, "nonsignificant")] {
            let post = interval_posterior(&prior, &design, significant).unwrap();
            let col = format!("post_{label}_delta_{delta}");
            let tab = t.trapezoid(&col).unwrap();
            let exact = post.mass(window, &spec).unwrap();
            assert!((tab - exact).abs() < 1e-3, "{col}: {tab} vs {exact}");
            assert!((post.total_mass(&spec).unwrap() - 1.0).abs() < 1e-6);
        }
    }
    let sig2 = t.trapezoid("post_significant_delta_2").unwrap();
    assert!((sig2 - 0.991_344_938_100_818_6).abs() < 1e-4, "{sig2}");
}

#[test]
fn figure5_sign_conditioning() {
    let (t, _) = table(&["figure5"]);
    assert_eq!(
        t.column_names,
        [
            "theta",
            "prior",
            "post_sig_positive",
            "post_nonsig_positive"
        ]
    );
    for col in ["post_sig_positive", "post_nonsig_positive"] {
        let m = t.trapezoid(col).unwrap();
        assert!((m - 1.0).abs() < 1e-3, "{col}: {m}");
    }
    let post = posterior_given_event(
        &NormalPrior::new(1.0, 1.0).unwrap(),
        &PointNullDesign::new(10, 1.96).unwrap(),
        SignificanceEvent::SignificantPositive,
    )
    .unwrap();
    let spec = QuadratureSpec::default();
    let neg = post
        .mass(Interval::new(-12.0, 0.0).unwrap(), &spec)
        .unwrap();
    assert!(
        neg < 0.02 && (neg - 0.001_006_335_047_027_963).abs() < 1e-9,
        "{neg}"
    );

    // At n = 10 the ratio at θ = 4 is 1/Pr(significant and positive), well
    // above its large-n limit 1/Φ(1) ≈ 1.1886.
    let ratio = value_at(&t, "post_sig_positive", 4.0) / value_at(&t, "prior", 4.0);
    assert!((ratio - 1.558_819_917_400_156_3).abs() < 1e-9, "{ratio}");
}

#[test]
fn csv_round_trips_byte_for_byte() {
    for args in [
        &["figure1", "--grid-points", "101"][..],
        &["figure2", "--grid-points", "101"],
        &["figure3", "--q-points", "100"],
        &["figure4", "--grid-points", "101"],
        &["figure5", "--grid-points", "101"],
        &["posterior", "--q", "0.3", "--grid-points", "101"],
    ] {
        let (t, text) = table(args);
        assert_eq!(t.to_csv_string().unwrap(), text, "{args:?}");
    }
}

#[test]
fn commands_are_deterministic() {
    let (_, a) = table(&["figure2", "--grid-points", "51"]);
    let (_, b) = table(&["figure2", "--grid-points", "51"]);
    assert_eq!(a, b);
}

#[test]
fn metadata_regenerates_the_table() {
    let (t, text) = table(&[
        "figure1",
        "--mu",
        "-0.5",
        "--sigma",
        "2",
        "--n",
        "40",
        "--c",
        "2.5",
        "--grid-points",
        "21",
    ]);
    let m = |k| t.meta(k).unwrap().to_string();
    let args = [
        "figure1".to_string(),
        "--mu".into(),
        m("mu"),
        "--sigma".into(),
        m("sigma"),
        "--n".into(),
        m("n"),
        "--c".into(),
        m("c"),
        "--grid-points".into(),
        m("grid_points"),
        "--theta-min".into(),
        m("theta_min"),
        "--theta-max".into(),
        m("theta_max"),
    ];
    let (_, again) = table(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(text, again);
}

#[test]
fn out_and_svg_files() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("f1.csv");
    let svg = dir.path().join("f1.svg");
    let out = sigpost(&[
        "figure1",
        "--grid-points",
        "11",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let t = CurveTable::read_csv(std::fs::read(&csv).unwrap().as_slice()).unwrap();
    assert_eq!(t.rows.len(), 11);
    let drawing = std::fs::read_to_string(&svg).unwrap();
    assert!(drawing.starts_with("<svg") && drawing.contains("post_nonsignificant"));
}

fn exit_code(args: &[&str]) -> i32 {
    sigpost(args).status.code().unwrap()
}

#[test]
fn invalid_flags_are_usage_errors() {
    for args in [
        &["figure1", "--sigma", "-1"][..],
        &["figure1", "--grid-points", "1"],
        &["figure1", "--theta-min", "2", "--theta-max", "1"],
        &["figure2", "--n-list", "0"],
        &["figure3", "--alpha-list", "1.5"],
        &["figure4", "--delta-list", "-1"],
        &["posterior", "--event", "bogus"],
        &["posterior", "--q", "0.5", "--event", "significant-positive"],
        &["verify", "--z-threshold", "-4"],
        &["figure1", "--no-such-flag"],
    ] {
        let out = sigpost(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn posterior_with_atom() {
    let (t, _) = table(&[
        "posterior",
        "--q",
        "0.5",
        "--n",
        "10000",
        "--event",
        "nonsignificant",
        "--grid-points",
        "11",
    ]);
    let m = meta_f64(&t, "posterior_mass_at_zero");
    assert!((m - 0.983_806_865_047_724).abs() < 1e-9, "{m}");
    assert_eq!(t.meta("q"), Some("0.5"));
}

#[test]
fn posterior_with_interval_null() {
    let (t, _) = table(&[
        "posterior",
        "--mu",
        "1",
        "--delta",
        "0.5",
        "--alpha",
        "0.05",
        "--n",
        "10000",
        "--event",
        "nonsignificant",
    ]);
    assert!((meta_f64(&t, "c") - 51.644_853_626_951_47).abs() < 1e-6);
    assert!((t.trapezoid("posterior").unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn side_commands() {
    let out = sigpost(&["critical-value", "--n", "10000", "--delta", "0.5"]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("c=51.6448536269514"));
    let out = sigpost(&["decay-rate", "--theta", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rate: f64 = text
        .lines()
        .next()
        .unwrap()
        .trim_start_matches("decay_rate=")
        .parse()
        .unwrap();
    assert!((rate - 0.5).abs() < 1e-2);
    assert_eq!(exit_code(&["limits", "--q", "2"]), 2);
}

#[test]
fn verify_with_few_draws_warns_and_runs() {
    let dir = tempfile::tempdir().unwrap();
    let failures = dir.path().join("failures.json");
    let out = sigpost(&[
        "verify",
        "--draws",
        "1000",
        "--failures",
        failures.to_str().unwrap(),
    ]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("weak"), "{stderr}");
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.lines().last().unwrap().starts_with("result: "));
    let parsed: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&failures).unwrap()).unwrap();
    let listed = parsed["failures"].as_array().unwrap().len();
    assert_eq!(out.status.success(), listed == 0);
    assert!(Path::new(&failures).exists());
}
