use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use super::{for_each_rep, InterferenceMode, LinkTrace, RepTrace, Scenario, SimConfig};
use crate::error::Result;

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("positive finite mean");
    let k: f64 = d.sample(rng);
    k as usize
}

/// Homogeneous PPP of intensity `lambda` on the disk of `radius` around the
/// origin.
pub fn sample_ppp<R: Rng + ?Sized>(lambda: f64, radius: f64, rng: &mut R) -> Vec<[f64; 2]> {
    let count = poisson_count(lambda * std::f64::consts::PI * radius * radius, rng);
    (0..count)
        .map(|_| {
            let d = radius * rng.random::<f64>().sqrt();
            let phi = std::f64::consts::TAU * rng.random::<f64>();
            [d * phi.cos(), d * phi.sin()]
        })
        .collect()
}

/// Path gains `|x|^-alpha` of a PPP on the disk. Only distances matter for
/// the SIR at the origin, so the angle is not drawn.
fn sample_path_gains<R: Rng + ?Sized>(
    lambda: f64,
    radius: f64,
    alpha: f64,
    rng: &mut R,
) -> Vec<f64> {
    let count = poisson_count(lambda * std::f64::consts::PI * radius * radius, rng);
    (0..count)
        .map(|_| {
            // |x|^2 = R^2 U
            let d2 = radius * radius * (1.0 - rng.random::<f64>());
            d2.powf(-alpha / 2.0)
        })
        .collect()
}

/// Sum of `h_x g_x` over the nodes that transmit, each independently with
/// probability `p`. Transmitters are located by geometric skipping, so the
/// cost is proportional to their number.
fn slot_interference<R: Rng + ?Sized>(gains: &[f64], p: f64, rng: &mut R) -> f64 {
    let mut interference = 0.0;
    if p <= 0.0 || gains.is_empty() {
        return 0.0;
    }
    if p >= 1.0 {
        for &g in gains {
            let h: f64 = Exp1.sample(rng);
            interference += h * g;
        }
        return interference;
    }
    let inv_log_q = 1.0 / (1.0 - p).ln();
    let mut i = 0usize;
    loop {
        let u = 1.0 - rng.random::<f64>();
        let skip = (u.ln() * inv_log_q).floor();
        if skip >= (gains.len() - i) as f64 {
            break;
        }
        i += skip as usize;
        let h: f64 = Exp1.sample(rng);
        interference += h * gains[i];
        i += 1;
        if i >= gains.len() {
            break;
        }
    }
    interference
}

/// One replication of `slots` slots.
pub(crate) fn simulate_replication<R: Rng + ?Sized>(
    scenario: &Scenario,
    cfg: &SimConfig,
    mode: InterferenceMode,
    rng: &mut R,
) -> RepTrace {
    let s = scenario;
    let signal_gain = cfg.kappa * s.r.powf(-s.alpha);
    let mut success = Vec::with_capacity(cfg.slots);
    let mut sir = Vec::with_capacity(cfg.slots);
    let fixed = match mode {
        InterferenceMode::Static => sample_path_gains(s.lambda, cfg.radius, s.alpha, rng),
        InterferenceMode::Resampled => Vec::new(),
    };
    for _ in 0..cfg.slots {
        let interference = match mode {
            InterferenceMode::Static => slot_interference(&fixed, s.p, rng),
            InterferenceMode::Resampled => {
                // a fresh field thinned to its transmitters is a PPP(lambda p)
                let tx = sample_path_gains(s.lambda * s.p, cfg.radius, s.alpha, rng);
                slot_interference(&tx, 1.0, rng)
            }
        } * cfg.kappa;
        let h: f64 = Exp1.sample(rng);
        if interference == 0.0 {
            success.push(true);
            sir.push(f64::INFINITY);
        } else {
            let value = h * signal_gain / interference;
            success.push(value > s.theta);
            sir.push(value);
        }
    }
    RepTrace { success, sir }
}

/// Simulates `cfg.reps` independent replications of the link.
pub fn simulate_link(
    scenario: &Scenario,
    cfg: &SimConfig,
    mode: InterferenceMode,
) -> Result<LinkTrace> {
    cfg.validate(scenario)?;
    let reps = for_each_rep(cfg, |rng| simulate_replication(scenario, cfg, mode, rng));
    Ok(LinkTrace {
        slots: cfg.slots,
        reps,
    })
}
