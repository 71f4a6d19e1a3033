//! Monte Carlo ground truth: Poisson interferer fields, slotted ALOHA,
//! Rayleigh fading and the SIR threshold rule.
//!
//! Every replication draws from its own ChaCha stream, selected from the
//! master seed by the replication index, and results are reduced in
//! replication order. Estimates are therefore bit-identical for any number of
//! worker threads.

mod estimate;
mod sim;

pub use estimate::{
    estimate_expected_duration, estimate_joint_success, estimate_outage_pmf,
    estimate_outage_run_prob, estimate_second_moment, estimate_sir_samples,
    estimate_success_count, estimate_success_count_distribution, estimate_success_duration_pmf,
    lag1_correlation, radius_convergence_check, run_length_histogram, simulate_rlnc,
    RadiusReport, RlncEstimate, RunHistogram, SirSampleStats,
};
pub use sim::{sample_ppp, simulate_link};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::LinkParams;

/// Link and field parameters for simulation.
///
/// Unlike [`LinkParams`] this admits the degenerate cases `lambda = 0`,
/// `p = 0` and `theta = inf`, which have trivial analytic answers but are
/// useful sanity checks of the simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub lambda: f64,
    pub p: f64,
    pub alpha: f64,
    pub theta: f64,
    pub r: f64,
}

impl Scenario {
    pub fn new(lambda: f64, p: f64, alpha: f64, theta: f64, r: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::invalid("lambda", format!("must be finite and >= 0, got {lambda}")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid("p", format!("must lie in [0, 1], got {p}")));
        }
        if !(alpha.is_finite() && alpha > 2.0) {
            return Err(Error::invalid("alpha", format!("must be > 2, got {alpha}")));
        }
        if theta.is_nan() || theta <= 0.0 {
            return Err(Error::invalid("theta", format!("must be > 0, got {theta}")));
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::invalid("r", format!("must be finite and > 0, got {r}")));
        }
        Ok(Self {
            lambda,
            p,
            alpha,
            theta,
            r,
        })
    }

    /// Expected interference from transmitters outside a disk of `radius`,
    /// `2 pi lambda p R^(2 - alpha) / (alpha - 2)`, for unit power.
    pub fn tail_interference(&self, radius: f64) -> f64 {
        2.0 * std::f64::consts::PI * self.lambda * self.p * radius.powf(2.0 - self.alpha)
            / (self.alpha - 2.0)
    }
}

impl From<&LinkParams> for Scenario {
    fn from(params: &LinkParams) -> Self {
        Self {
            lambda: params.lambda(),
            p: params.p(),
            alpha: params.alpha(),
            theta: params.theta(),
            r: params.r(),
        }
    }
}

impl From<LinkParams> for Scenario {
    fn from(params: LinkParams) -> Self {
        Self::from(&params)
    }
}

/// How the interferer field evolves over the slots of one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InterferenceMode {
    /// One field per replication: interference is correlated in time.
    #[default]
    Static,
    /// Fresh field every slot: independent slots.
    Resampled,
}

/// Bounds on the automatically chosen disk radius, in units of `r`.
pub const MIN_DEFAULT_RADIUS_FACTOR: f64 = 50.0;
pub const MAX_DEFAULT_RADIUS_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub radius: f64,
    pub slots: usize,
    pub reps: usize,
    pub seed: u64,
    /// Transmit power; cancels in the SIR.
    pub kappa: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            radius: 50.0,
            slots: 200,
            reps: 2000,
            seed: 1,
            kappa: 1.0,
        }
    }
}

impl SimConfig {
    /// Smallest radius keeping the expected out-of-disk interference below
    /// `1e-3` of the interference level that causes outage, clamped to
    /// `[50 r, 100 r]`. The floor matters for SIR moments, which react to
    /// far interferers more than the success indicator does.
    pub fn default_radius(scenario: &Scenario) -> f64 {
        let s = scenario;
        let lo = MIN_DEFAULT_RADIUS_FACTOR * s.r;
        let hi = MAX_DEFAULT_RADIUS_FACTOR * s.r;
        if s.lambda * s.p == 0.0 || !s.theta.is_finite() {
            return lo;
        }
        // tail(R) < 1e-3 r^-alpha / theta
        let target = 1e-3 * s.r.powf(-s.alpha) / s.theta;
        let needed = (2.0 * std::f64::consts::PI * s.lambda * s.p / ((s.alpha - 2.0) * target))
            .powf(1.0 / (s.alpha - 2.0));
        needed.clamp(lo, hi)
    }

    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        if !(self.radius.is_finite() && self.radius >= 10.0 * scenario.r) {
            return Err(Error::invalid(
                "radius",
                format!("must be >= 10 r = {}, got {}", 10.0 * scenario.r, self.radius),
            ));
        }
        if self.slots < 2 {
            return Err(Error::invalid("slots", format!("must be >= 2, got {}", self.slots)));
        }
        if self.reps < 1 {
            return Err(Error::invalid("reps", "must be >= 1"));
        }
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(Error::invalid("kappa", format!("must be > 0, got {}", self.kappa)));
        }
        Ok(())
    }
}

/// Mean over replications with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub reps_used: usize,
}

impl McEstimate {
    /// Treats each value as one i.i.d. replication.
    pub fn from_replications(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                stderr: f64::NAN,
                reps_used: 0,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            stderr,
            reps_used: n,
        }
    }

    /// `(mean - reference) / stderr`; zero-variance estimates give `0` on an
    /// exact match and `+-inf` otherwise.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.mean - reference;
        if self.stderr > 0.0 {
            diff / self.stderr
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }

    pub fn agrees_with(&self, reference: f64, tolerance_z: f64) -> bool {
        self.z_score(reference).abs() <= tolerance_z
    }
}

/// Per-slot outcomes of every replication.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkTrace {
    pub slots: usize,
    pub reps: Vec<RepTrace>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepTrace {
    pub success: Vec<bool>,
    /// SIR of each slot; `inf` when no interferer transmitted.
    pub sir: Vec<f64>,
}

impl LinkTrace {
    /// Fraction of successful slots over the whole trace.
    pub fn success_fraction(&self) -> f64 {
        let total: usize = self.reps.iter().map(|r| r.success.len()).sum();
        let hits: usize = self
            .reps
            .iter()
            .map(|r| r.success.iter().filter(|&&s| s).count())
            .sum();
        hits as f64 / total as f64
    }
}

pub(crate) fn rep_rng(seed: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64);
    rng
}

/// Runs `f` for every replication in parallel, returning results in
/// replication order.
pub(crate) fn for_each_rep<T, F>(cfg: &SimConfig, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    (0..cfg.reps)
        .into_par_iter()
        .map(|rep| f(&mut rep_rng(cfg.seed, rep)))
        .collect()
}
