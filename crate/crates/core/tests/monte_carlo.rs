//! Simulated estimates against the closed forms, 3 standard errors.

use outage_core::coding::{failure_prob, CodeParams};
use outage_core::montecarlo::*;
use outage_core::sirstats::{sir_moment, SirCcdfForm};
use outage_core::{Durations, LinkParams};

const Z: f64 = 3.0;

fn canonical() -> LinkParams {
    LinkParams::new(1.0, 0.1, 4.0, 1.0, 1.0).unwrap()
}

fn cfg(slots: usize, reps: usize, seed: u64) -> SimConfig {
    SimConfig {
        radius: 50.0,
        slots,
        reps,
        seed,
        kappa: 1.0,
    }
}

fn check(label: &str, est: McEstimate, analytic: f64) {
    let z = est.z_score(analytic);
    assert!(
        z.abs() <= Z,
        "{label}: mc {} +- {} vs {analytic} (z = {z:.2})",
        est.mean,
        est.stderr
    );
}

#[test]
fn correlated_link_statistics() {
    let params = canonical();
    let dur = Durations::new(&params);
    let trace = simulate_link(&params.into(), &cfg(200, 600, 11), InterferenceMode::Static).unwrap();

    for n in 1..=3 {
        check(&format!("suc({n})"), estimate_joint_success(&trace, n).unwrap(), dur.joint_success(n));
    }
    for n in 0..=3 {
        check(
            &format!("outex({n})"),
            estimate_outage_pmf(&trace, n).unwrap(),
            dur.outage_duration_pmf(n).unwrap(),
        );
        check(
            &format!("sucex({n})"),
            estimate_success_duration_pmf(&trace, n).unwrap(),
            dur.success_duration_pmf(n),
        );
    }
    check("out(2)", estimate_outage_run_prob(&trace, 2).unwrap(), dur.outage_run_prob(2).unwrap());
    for k in [3, 5, 7] {
        check(
            &format!("P[S(10)={k}]"),
            estimate_success_count(&trace, 10, k).unwrap(),
            dur.success_count_pmf(10, k).unwrap(),
        );
    }
    check("E[S]", estimate_expected_duration(&trace), dur.expected_success_duration(1e-10).unwrap());
    check(
        "E[S^2]",
        estimate_second_moment(&trace),
        dur.success_duration_second_moment(1e-10).unwrap(),
    );

    let runs = run_length_histogram(&trace);
    assert_eq!(runs.covered_slots(), 200 * 600);
}

#[test]
fn resampled_field_gives_binomial_counts() {
    let params = canonical();
    let dur = Durations::new(&params);
    let trace =
        simulate_link(&params.into(), &cfg(100, 400, 5), InterferenceMode::Resampled).unwrap();
    check("suc(1)", estimate_joint_success(&trace, 1).unwrap(), dur.joint_success(1));
    let counts = estimate_success_count_distribution(&trace, 5).unwrap();
    for (k, est) in counts.iter().enumerate() {
        check(&format!("Bin(5)[{k}]"), *est, dur.baseline_success_count_pmf(5, k));
    }
    check("suc(2) indep", estimate_joint_success(&trace, 2).unwrap(), dur.joint_success(1).powi(2));
}

#[test]
fn lag_one_correlation_grows_with_p() {
    // lambda p = 0.1 fixed
    let rho: Vec<f64> = [0.05, 0.3, 0.9]
        .iter()
        .map(|&p| {
            let s = Scenario::new(0.1 / p, p, 4.0, 1.0, 1.0).unwrap();
            let c = SimConfig {
                radius: 20.0,
                ..cfg(100, 300, 17)
            };
            lag1_correlation(&simulate_link(&s, &c, InterferenceMode::Static).unwrap()).mean
        })
        .collect();
    assert!(rho[0] < rho[1] && rho[1] < rho[2], "{rho:?}");
}

#[test]
fn sir_sample_moments() {
    let params = LinkParams::new(1.0, 0.5, 4.0, 1.0, 1.0).unwrap();
    let stats = estimate_sir_samples(&params.into(), &cfg(50, 400, 23)).unwrap();
    assert_eq!(stats.excluded_slots, 0);
    assert!(stats.samples == 50 * 400);
    check("E[SIR]", stats.mean, sir_moment(1, &params).unwrap());
    assert!(stats.skewness.mean > 0.0);
    let form = SirCcdfForm::from_params(&params);
    check("Var[SIR]", stats.variance, form.variance());
}

#[test]
fn rlnc_against_failure_probability() {
    let params = LinkParams::new(0.1, 1.0 / 3.0, 4.0, 1.0, 1.0).unwrap();
    let code = CodeParams::new(5, 10, 2).unwrap();
    for correlated in [true, false] {
        let est = simulate_rlnc(&code, &params.into(), &cfg(200, 400, 31), correlated).unwrap();
        let analytic = failure_prob(&code, &params, correlated).unwrap();
        check(&format!("failure corr={correlated}"), est.failure, analytic);
        assert!((est.throughput.mean - 0.5 * est.decoding.mean).abs() < 1e-15);
    }
}

#[test]
fn rlnc_without_interference_always_decodes() {
    let s = Scenario::new(1.0, 0.0, 4.0, 1.0, 1.0).unwrap();
    let code = CodeParams::new(5, 5, 2_147_483_647).unwrap();
    let est = simulate_rlnc(&code, &s, &cfg(50, 20, 1), true).unwrap();
    assert_eq!(est.decoding.mean, 1.0);
}

#[test]
fn radius_convergence() {
    let fine = radius_convergence_check(&canonical().into(), &cfg(50, 300, 41)).unwrap();
    assert!(!fine.flagged, "{fine:?}");

    let heavy = Scenario::new(0.05, 0.2, 2.1, 1.0, 1.0).unwrap();
    let small = SimConfig {
        radius: 10.0,
        ..cfg(50, 400, 41)
    };
    let r = radius_convergence_check(&heavy, &small).unwrap();
    assert!(r.flagged, "{r:?}");

    let empty = Scenario::new(0.0, 0.5, 4.0, 1.0, 1.0).unwrap();
    let r = radius_convergence_check(&empty, &cfg(20, 10, 41)).unwrap();
    assert_eq!(r.at_radius, r.at_double);
    assert!(!r.flagged);
}

#[test]
fn same_seed_same_estimates() {
    let s: Scenario = canonical().into();
    let c = cfg(40, 50, 99);
    let a = simulate_link(&s, &c, InterferenceMode::Static).unwrap();
    let b = simulate_link(&s, &c, InterferenceMode::Static).unwrap();
    assert_eq!(a, b);
    let other = simulate_link(&s, &SimConfig { seed: 100, ..c }, InterferenceMode::Static).unwrap();
    assert_ne!(a, other);
}
