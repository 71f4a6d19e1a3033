use anyhow::Result;
use outage_core::coding::CodeParams;
use outage_core::montecarlo::*;
use outage_core::Scenario;

use crate::args::SimQuantity;
use crate::eval::Evaluated;
use crate::params::{fmt, Settings};

const COLUMNS: &str = "quantity,n,k,mean,stderr,reps\n";

fn row(body: &mut String, name: &str, n: Option<usize>, k: Option<usize>, e: &McEstimate) {
    let opt = |v: Option<usize>| v.map_or(String::new(), |v| v.to_string());
    body.push_str(&format!(
        "{name},{},{},{},{},{}\n",
        opt(n),
        opt(k),
        fmt(e.mean),
        fmt(e.stderr),
        e.reps_used
    ));
}

pub fn run(quantity: SimQuantity, s: &Settings, scenario: &Scenario) -> Result<Evaluated> {
    use SimQuantity::*;
    let cfg = s.sim_config(scenario)?;
    let mode = if s.corr {
        InterferenceMode::Static
    } else {
        InterferenceMode::Resampled
    };
    let mut body = String::from(COLUMNS);
    let mut extra: Vec<(&'static str, String)> = Vec::new();
    let n = s.n;
    match quantity {
        Suc | Sucex | Out | Outex | Succount | Esdur | Esdur2 | Runs | Lag1 => {
            let trace = simulate_link(scenario, &cfg, mode)?;
            match quantity {
                Suc => row(&mut body, "suc", Some(n), None, &estimate_joint_success(&trace, n)?),
                Sucex => row(
                    &mut body,
                    "sucex",
                    Some(n),
                    None,
                    &estimate_success_duration_pmf(&trace, n)?,
                ),
                Out => row(&mut body, "out", Some(n), None, &estimate_outage_run_prob(&trace, n)?),
                Outex => row(&mut body, "outex", Some(n), None, &estimate_outage_pmf(&trace, n)?),
                Succount => match s.k_count("success count")? {
                    Some(k) => row(
                        &mut body,
                        "succount",
                        Some(n),
                        Some(k),
                        &estimate_success_count(&trace, n, k)?,
                    ),
                    None => {
                        for (k, e) in estimate_success_count_distribution(&trace, n)?.iter().enumerate() {
                            row(&mut body, "succount", Some(n), Some(k), e);
                        }
                    }
                },
                Esdur => row(&mut body, "esdur", None, None, &estimate_expected_duration(&trace)),
                Esdur2 => row(&mut body, "esdur2", None, None, &estimate_second_moment(&trace)),
                Lag1 => row(&mut body, "lag1", None, None, &lag1_correlation(&trace)),
                Runs => {
                    let h = run_length_histogram(&trace);
                    body = String::from("kind,length,count\n");
                    for (kind, hist) in [("success", &h.success), ("outage", &h.outage)] {
                        for (len, c) in hist.iter().enumerate().filter(|(_, c)| **c > 0) {
                            body.push_str(&format!("{kind},{len},{c}\n"));
                        }
                    }
                    extra.push(("censored_runs", h.censored.len().to_string()));
                    extra.push(("censored_slots", h.censored.iter().sum::<usize>().to_string()));
                }
                _ => unreachable!(),
            }
        }
        Sir => {
            let stats = estimate_sir_samples(scenario, &cfg)?;
            row(&mut body, "sir_mean", None, None, &stats.mean);
            row(&mut body, "sir_variance", None, None, &stats.variance);
            row(&mut body, "sir_skewness", None, None, &stats.skewness);
            extra.push(("samples", stats.samples.to_string()));
            extra.push(("excluded_empty_slots", stats.excluded_slots.to_string()));
            extra.push(("expected_empty_fraction", fmt(stats.expected_excluded_fraction)));
        }
        Rlnc => {
            let k = s.k_count("source packets")?.unwrap_or(5);
            let code = CodeParams::new(k, n, s.q)?;
            let est = simulate_rlnc(&code, scenario, &cfg, s.corr)?;
            row(&mut body, "decoding", Some(n), Some(k), &est.decoding);
            row(&mut body, "failure", Some(n), Some(k), &est.failure);
            row(&mut body, "throughput", Some(n), Some(k), &est.throughput);
            extra.push(("blocks_per_rep", est.blocks_per_rep.to_string()));
        }
        RadiusCheck => {
            let report = radius_convergence_check(scenario, &cfg)?;
            row(&mut body, "suc_at_radius", Some(1), None, &report.at_radius);
            row(&mut body, "suc_at_double_radius", Some(1), None, &report.at_double);
            extra.push(("z", fmt(report.z)));
            extra.push(("flagged", report.flagged.to_string()));
            if report.flagged {
                eprintln!(
                    "warning: single-slot success changes by {:.2} standard errors when the \
                     disk radius doubles; increase --radius",
                    report.z
                );
            }
        }
    }
    extra.push((
        "interference",
        if s.corr { "static" } else { "resampled" }.to_string(),
    ));
    Ok(Evaluated { body, extra })
}
