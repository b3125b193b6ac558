use sigpost::general_model::{normal_power_curve, posterior_given_nonsignificance, MixedPrior};
use sigpost::mc_oracle::{
    compare_histogram_to_density_with, estimate_conditional_histogram, estimate_event_probability,
    estimate_event_probability_split, estimate_partition, Experiment, SimulationPlan,
};
use sigpost::normal_model::{
    event_probability, posterior_given_event, NormalPrior, PointNullDesign, SignificanceEvent,
};
use sigpost::numerics::{Interval, QuadratureSpec};

const DRAWS: u64 = 200_000;

fn figure1() -> (NormalPrior, MixedPrior, Experiment, PointNullDesign) {
    let prior = NormalPrior::new(1.0, 1.0).unwrap();
    let design = PointNullDesign::new(10, 1.96).unwrap();
    (
        prior,
        MixedPrior::normal(0.0, prior).unwrap(),
        Experiment::PointNull(design),
        design,
    )
}

fn plan(seed: u64) -> SimulationPlan {
    SimulationPlan::new(DRAWS, seed, 40, Interval::new(-3.0, 5.0).unwrap()).unwrap()
}

#[test]
fn same_plan_same_bits() {
    let (_, mixed, exp, _) = figure1();
    for event in SignificanceEvent::ALL {
        let a = estimate_event_probability(&mixed, &exp, event, &plan(42)).unwrap();
        let b = estimate_event_probability(&mixed, &exp, event, &plan(42)).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let ha = estimate_conditional_histogram(&mixed, &exp, event, &plan(42)).unwrap();
        let hb = estimate_conditional_histogram(&mixed, &exp, event, &plan(42)).unwrap();
        assert!(ha
            .masses
            .iter()
            .zip(&hb.masses)
            .all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let (_, mixed, exp, _) = figure1();
    let event = SignificanceEvent::NonSignificant;
    let reference = estimate_conditional_histogram(&mixed, &exp, event, &plan(9)).unwrap();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let serial =
        pool.install(|| estimate_conditional_histogram(&mixed, &exp, event, &plan(9)).unwrap());
    assert_eq!(reference, serial);
}

#[test]
fn conclusions_hold_across_seeds() {
    let (prior, mixed, exp, design) = figure1();
    let spec = QuadratureSpec::default();
    for event in SignificanceEvent::ALL {
        let post = posterior_given_event(&prior, &design, event).unwrap();
        let exact = event_probability(&prior, &design, event);
        let mut hist_exceed = 0;
        let mut prob_exceed = 0;
        for seed in 0..10 {
            let est = estimate_event_probability(&mixed, &exp, event, &plan(seed)).unwrap();
            if est.z_score(exact) > 4.0 {
                prob_exceed += 1;
            }
            let hist = estimate_conditional_histogram(&mixed, &exp, event, &plan(seed)).unwrap();
            let z = compare_histogram_to_density_with(
                &hist,
                |t| post.density(t),
                post.breakpoints(),
                &spec,
            )
            .unwrap();
            if z > 4.0 {
                hist_exceed += 1;
            }
        }
        assert!(
            prob_exceed <= 1,
            "{event}: probability z > 4 in {prob_exceed} of 10 seeds"
        );
        assert!(
            hist_exceed <= 1,
            "{event}: histogram z > 4 in {hist_exceed} of 10 seeds"
        );
    }
}

#[test]
fn halves_agree() {
    let (_, mixed, exp, _) = figure1();
    for event in SignificanceEvent::ALL {
        let (a, b) = estimate_event_probability_split(&mixed, &exp, event, &plan(3)).unwrap();
        let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!(
            (a.value - b.value).abs() < 6.0 * se,
            "{event}: {a:?} vs {b:?}"
        );
        assert_eq!(a.draws_used + b.draws_used, DRAWS);
    }
}

#[test]
fn sign_refined_events_partition_the_draws() {
    let (_, mixed, exp, _) = figure1();
    let ests =
        estimate_partition(&mixed, &exp, &SignificanceEvent::SIGN_REFINED, &plan(11)).unwrap();
    assert_eq!(ests.iter().map(|e| e.hits).sum::<u64>(), DRAWS);
    let two = estimate_partition(&mixed, &exp, &SignificanceEvent::TWO_WAY, &plan(11)).unwrap();
    assert_eq!(two.iter().map(|e| e.hits).sum::<u64>(), DRAWS);
    // The coarse events are unions of the refined ones, draw by draw.
    assert_eq!(two[0].hits, ests[0].hits + ests[2].hits);
}

#[test]
fn atoms_are_counted_not_binned() {
    let prior = MixedPrior::normal(0.5, NormalPrior::standard()).unwrap();
    let curve = normal_power_curve(1.96).unwrap();
    let n = 10_000;
    let exp = Experiment::Curve {
        curve: curve.clone(),
        n,
    };
    let p = SimulationPlan::new(400_000, 5, 40, Interval::new(-0.1, 0.1).unwrap()).unwrap();
    let hist = estimate_conditional_histogram(&prior, &exp, SignificanceEvent::NonSignificant, &p)
        .unwrap();
    let post = posterior_given_nonsignificance(&prior, &curve, n).unwrap();
    let want = post.mass_at_zero();
    let frac = hist.atom_fraction();
    let se = (want * (1.0 - want) / hist.conditioning_draws as f64).sqrt();
    assert!((frac - want).abs() < 4.0 * se, "{frac} vs {want}");
    assert!((hist.masses.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}
