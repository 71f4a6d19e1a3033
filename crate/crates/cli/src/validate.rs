use anyhow::Result;
use outage_core::coding::{decoding_prob, gf_rank, throughput, CodeParams, GfMatrix};
use outage_core::montecarlo::*;
use outage_core::sirstats::sir_moment;
use outage_core::{Durations, Scenario};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eval::Evaluated;
use crate::params::{fmt, Settings};

const Z_LIMIT: f64 = 3.0;
const RANK_TRIALS: usize = 100_000;

pub struct Check {
    pub name: String,
    pub analytic: f64,
    pub estimate: McEstimate,
}

impl Check {
    fn new(name: impl Into<String>, analytic: f64, estimate: McEstimate) -> Self {
        Self {
            name: name.into(),
            analytic,
            estimate,
        }
    }
}

pub struct Outcome {
    pub report: Evaluated,
    pub failures: usize,
}

fn collect(s: &Settings, scenario: &Scenario) -> Result<Vec<Check>> {
    let link = s.link()?;
    let dur = Durations::new(&link);
    let cfg = s.sim_config(scenario)?;
    let mut checks = Vec::new();

    let trace = simulate_link(scenario, &cfg, InterferenceMode::Static)?;
    for n in 1..=3 {
        checks.push(Check::new(
            format!("suc({n})"),
            dur.joint_success(n),
            estimate_joint_success(&trace, n)?,
        ));
    }
    for n in 0..=3 {
        checks.push(Check::new(
            format!("outex({n})"),
            dur.outage_duration_pmf(n)?,
            estimate_outage_pmf(&trace, n)?,
        ));
    }
    let counts = estimate_success_count_distribution(&trace, 10)?;
    for k in [3, 5, 7] {
        checks.push(Check::new(
            format!("P[S(10)={k}]"),
            dur.success_count_pmf(10, k)?,
            counts[k],
        ));
    }
    checks.push(Check::new(
        "E[S]",
        dur.expected_success_duration(s.tol)?,
        estimate_expected_duration(&trace),
    ));

    let sir = estimate_sir_samples(scenario, &cfg)?;
    checks.push(Check::new("E[SIR]", sir_moment(1, &link)?, sir.mean));

    // P_dec against the rank of random coefficient matrices
    let k = s.k_count("source packets")?.unwrap_or(5);
    let m = s.m.unwrap_or(k);
    let rank_code = CodeParams::new(k, m.max(k), s.q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let full: Vec<f64> = (0..RANK_TRIALS)
        .map(|_| {
            let mat = GfMatrix::random(m, k, s.q, &mut rng);
            (gf_rank(&mat, s.q).expect("prime q") == k) as u8 as f64
        })
        .collect();
    checks.push(Check::new(
        format!("P_dec({m},{k},{})", s.q),
        decoding_prob(m, &rank_code),
        McEstimate::from_replications(&full),
    ));

    let code = CodeParams::new(k, 10.max(k), s.q)?;
    let rlnc = simulate_rlnc(&code, scenario, &cfg, true)?;
    checks.push(Check::new(
        format!("throughput(k={k},n={})", code.n()),
        throughput(&code, &link, true)?,
        rlnc.throughput,
    ));
    Ok(checks)
}

pub fn run(s: &Settings, scenario: &Scenario, force_mismatch: bool) -> Result<Outcome> {
    if s.reps < 2 {
        eprintln!(
            "warning: --reps {} leaves the standard errors undefined; z-scores are not meaningful",
            s.reps
        );
    }
    let mut checks = collect(s, scenario)?;
    if force_mismatch {
        for c in &mut checks {
            c.analytic = c.analytic * 1.5 + 0.1;
        }
    }
    let mut body = String::from("check,analytic,estimate,stderr,z,status\n");
    let mut failures = 0;
    for c in &checks {
        let z = c.estimate.z_score(c.analytic);
        let ok = z.abs() <= Z_LIMIT;
        failures += !ok as usize;
        body.push_str(&format!(
            "{},{},{},{},{},{}\n",
            c.name,
            fmt(c.analytic),
            fmt(c.estimate.mean),
            fmt(c.estimate.stderr),
            fmt(z),
            if ok { "pass" } else { "FAIL" }
        ));
    }
    let extra = vec![
        ("z_limit", fmt(Z_LIMIT)),
        ("rank_trials", RANK_TRIALS.to_string()),
        ("force_mismatch", force_mismatch.to_string()),
        ("failures", failures.to_string()),
    ];
    Ok(Outcome {
        report: Evaluated { body, extra },
        failures,
    })
}
