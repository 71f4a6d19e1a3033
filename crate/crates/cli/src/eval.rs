use anyhow::{anyhow, Result};
use outage_core::coding::{
    decoding_prob, failure_prob, optimize_redundancy, throughput, CodeParams, Objective,
};
use outage_core::durations::diversity_poly;
use outage_core::sirstats::{sir_exceedance, sir_moment, sir_skewness};
use outage_core::{Durations, LinkParams};

use crate::args::{ObjectiveArg, OptnArgs, Quantity};
use crate::params::{fmt, Settings};

/// Evaluated body plus extra header entries.
pub struct Evaluated {
    pub body: String,
    pub extra: Vec<(&'static str, String)>,
}

fn single(v: f64) -> Evaluated {
    Evaluated {
        body: format!("{}\n", fmt(v)),
        extra: Vec::new(),
    }
}

fn required_k(s: &Settings, what: &str) -> Result<usize> {
    s.k_count(what)?
        .ok_or_else(|| anyhow!(outage_core::Error::InvalidParameter {
            name: "k",
            reason: format!("--k ({what}) is required"),
        }))
}

pub fn run(quantity: Quantity, s: &Settings, optn: &OptnArgs) -> Result<Evaluated> {
    use Quantity::*;
    Ok(match quantity {
        Suc | Sucex | Out | Outex | Succount | Esdur | Esdur2 | Var => {
            durations(quantity, s, &Durations::new(&s.link()?))?
        }
        Sirmoment => {
            let order = u32::try_from(s.n).map_err(|_| anyhow!("--n too large"))?;
            single(sir_moment(order, &s.link()?)?)
        }
        Exceedance => {
            let k = s.k.unwrap_or(0.0);
            single(sir_exceedance(k, s.alpha)?)
        }
        Skewness => single(sir_skewness(s.alpha)?),
        Pdec => {
            let k = required_k(s, "source packets")?;
            let m = s.m.ok_or_else(|| {
                anyhow!(outage_core::Error::InvalidParameter {
                    name: "m",
                    reason: "--m (received packets) is required".into(),
                })
            })?;
            let code = CodeParams::new(k, m.max(k), s.q)?;
            single(decoding_prob(m, &code))
        }
        Throughput | Failure => {
            let k = required_k(s, "source packets")?;
            let code = CodeParams::new(k, s.n, s.q)?;
            let link = s.link()?;
            single(if quantity == Throughput {
                throughput(&code, &link, s.corr)?
            } else {
                failure_prob(&code, &link, s.corr)?
            })
        }
        Optn => optn_table(s, optn)?,
        Divpoly => {
            let link = s.link()?;
            single(diversity_poly(s.n, link.p(), link.derived().delta))
        }
        DeltaContention => {
            let d = s.link()?.derived();
            Evaluated {
                body: format!(
                    "delta,contention,rho\n{},{},{}\n",
                    fmt(d.delta),
                    fmt(d.contention),
                    fmt(d.rho)
                ),
                extra: Vec::new(),
            }
        }
    })
}

fn durations(quantity: Quantity, s: &Settings, dur: &Durations) -> Result<Evaluated> {
    use Quantity::*;
    let n = s.n;
    Ok(match quantity {
        Suc => single(if s.corr {
            dur.joint_success(n)
        } else {
            dur.joint_success(1).powi(n as i32)
        }),
        Sucex => single(dur.success_duration_pmf(n)),
        Out => single(dur.outage_run_prob(n)?),
        Outex => single(dur.outage_duration_pmf(n)?),
        Succount => match s.k_count("success count")? {
            Some(k) if s.corr => single(dur.success_count_pmf(n, k)?),
            Some(k) => single(dur.baseline_success_count_pmf(n, k)),
            None => {
                let values: Vec<f64> = if s.corr {
                    dur.success_count_distribution(n)?.values
                } else {
                    (0..=n).map(|k| dur.baseline_success_count_pmf(n, k)).collect()
                };
                let mut body = String::from("k,pmf\n");
                for (k, v) in values.iter().enumerate() {
                    body.push_str(&format!("{k},{}\n", fmt(*v)));
                }
                Evaluated {
                    body,
                    extra: Vec::new(),
                }
            }
        },
        Esdur if !s.corr => single(dur.baseline_expected_duration()),
        Esdur => single(dur.expected_success_duration(s.tol)?),
        Esdur2 => single(dur.success_duration_second_moment(s.tol)?),
        Var => single(dur.success_duration_variance(s.tol)?),
        _ => unreachable!("not a duration quantity"),
    })
}

fn optn_table(s: &Settings, optn: &OptnArgs) -> Result<Evaluated> {
    let k = required_k(s, "source packets")?;
    let lo = optn.n_min.unwrap_or(k);
    let hi = optn.n_max.unwrap_or(30);
    let objective = match optn.objective.unwrap_or_default() {
        ObjectiveArg::Failure => Objective::MinFailure,
        ObjectiveArg::Throughput => Objective::MaxThroughput,
    };
    let (p_per_n, n_lambda) = (optn.p_per_n, optn.n_lambda);
    let params_of_n = |n: usize| {
        let p = p_per_n.map_or(s.p, |f| f * n as f64);
        let lambda = n_lambda.map_or(s.lambda, |l| l / n as f64);
        LinkParams::new(lambda, p, s.alpha, s.theta, s.r)
    };
    let choice = optimize_redundancy(k, s.q, params_of_n, lo..=hi, objective, s.corr)?;
    let column = match objective {
        Objective::MinFailure => "failure",
        Objective::MaxThroughput => "throughput",
    };
    let mut body = format!("n,{column}\n");
    for (n, v) in &choice.values {
        body.push_str(&format!("{n},{}\n", fmt(*v)));
    }
    let mut extra = vec![
        ("objective", column.to_string()),
        ("n_min", lo.to_string()),
        ("n_max", hi.to_string()),
    ];
    if let Some(f) = p_per_n {
        extra.push(("p_per_n", fmt(f)));
    }
    if let Some(l) = n_lambda {
        extra.push(("n_lambda", fmt(l)));
    }
    extra.push(("best_n", choice.best_n.to_string()));
    extra.push(("best_value", fmt(choice.best_value)));
    Ok(Evaluated { body, extra })
}
