//! Estimators of the analytic quantities from simulated traces.
//!
//! Probabilities of slot patterns (`n` successes, `n` successes then an
//! outage, ...) are estimated from every window of the pattern's length in a
//! replication. Windows inside one replication are correlated, so standard
//! errors come from the spread of per-replication means only.

use super::sim::simulate_replication;
use super::{
    for_each_rep, InterferenceMode, LinkTrace, McEstimate, RepTrace, Scenario, SimConfig,
};
use crate::coding::{gf_rank, CodeParams, GfMatrix};
use crate::error::{Error, Result};

fn require_slots(trace: &LinkTrace, needed: usize) -> Result<()> {
    if needed > trace.slots {
        Err(Error::InsufficientSlots {
            needed,
            available: trace.slots,
        })
    } else {
        Ok(())
    }
}

fn prefix_counts(success: &[bool]) -> Vec<usize> {
    let mut prefix = Vec::with_capacity(success.len() + 1);
    prefix.push(0);
    let mut acc = 0;
    for &s in success {
        acc += s as usize;
        prefix.push(acc);
    }
    prefix
}

/// Fraction of windows of `len` slots whose first `len - tail.is_some()`
/// slots all equal `body` and whose last slot equals `tail`.
fn pattern_fraction(rep: &RepTrace, run: usize, body: bool, tail: Option<bool>) -> f64 {
    let len = run + tail.is_some() as usize;
    let t = rep.success.len();
    let prefix = prefix_counts(&rep.success);
    let windows = t - len + 1;
    let hits = (0..windows)
        .filter(|&start| {
            let ones = prefix[start + run] - prefix[start];
            let body_ok = if body { ones == run } else { ones == 0 };
            body_ok && tail.is_none_or(|v| rep.success[start + run] == v)
        })
        .count();
    hits as f64 / windows as f64
}

fn per_rep<F: Fn(&RepTrace) -> f64>(trace: &LinkTrace, f: F) -> McEstimate {
    let values: Vec<f64> = trace.reps.iter().map(f).collect();
    McEstimate::from_replications(&values)
}

/// `suc(n)`: probability of `n` consecutive successes.
pub fn estimate_joint_success(trace: &LinkTrace, n: usize) -> Result<McEstimate> {
    if n == 0 {
        return Ok(McEstimate {
            mean: 1.0,
            stderr: 0.0,
            reps_used: trace.reps.len(),
        });
    }
    require_slots(trace, n)?;
    Ok(per_rep(trace, |rep| pattern_fraction(rep, n, true, None)))
}

/// `sucex(n)`: `n` successes followed by an outage.
pub fn estimate_success_duration_pmf(trace: &LinkTrace, n: usize) -> Result<McEstimate> {
    require_slots(trace, n + 1)?;
    Ok(per_rep(trace, |rep| pattern_fraction(rep, n, true, Some(false))))
}

/// `out(n)`: probability of `n` consecutive outages.
pub fn estimate_outage_run_prob(trace: &LinkTrace, n: usize) -> Result<McEstimate> {
    if n == 0 {
        return estimate_joint_success(trace, 0);
    }
    require_slots(trace, n)?;
    Ok(per_rep(trace, |rep| pattern_fraction(rep, n, false, None)))
}

/// `outex(n)`: `n` outages followed by a success.
pub fn estimate_outage_pmf(trace: &LinkTrace, n: usize) -> Result<McEstimate> {
    require_slots(trace, n + 1)?;
    Ok(per_rep(trace, |rep| pattern_fraction(rep, n, false, Some(true))))
}

/// Success counts of disjoint blocks of `n` slots, `k = 0..=n`.
pub fn estimate_success_count_distribution(
    trace: &LinkTrace,
    n: usize,
) -> Result<Vec<McEstimate>> {
    if n == 0 {
        return Err(Error::invalid("n", "block length must be >= 1"));
    }
    require_slots(trace, n)?;
    let blocks = trace.slots / n;
    let per_rep_hist: Vec<Vec<f64>> = trace
        .reps
        .iter()
        .map(|rep| {
            let mut hist = vec![0.0; n + 1];
            for block in rep.success.chunks_exact(n).take(blocks) {
                hist[block.iter().filter(|&&s| s).count()] += 1.0;
            }
            hist.iter().map(|h| h / blocks as f64).collect()
        })
        .collect();
    Ok((0..=n)
        .map(|k| {
            let column: Vec<f64> = per_rep_hist.iter().map(|h| h[k]).collect();
            McEstimate::from_replications(&column)
        })
        .collect())
}

/// `P[S(n) = k]`.
pub fn estimate_success_count(trace: &LinkTrace, n: usize, k: usize) -> Result<McEstimate> {
    if k > n {
        return Err(Error::invalid("k", format!("must be <= n = {n}, got {k}")));
    }
    Ok(estimate_success_count_distribution(trace, n)?[k])
}

/// `sum_{n=1..N} w(n) suc(n)` with `N = slots / 2`, per replication.
fn weighted_window_sum(trace: &LinkTrace, weight: impl Fn(usize) -> f64) -> McEstimate {
    per_rep(trace, |rep| {
        let t = rep.success.len();
        let horizon = t / 2;
        // forward run length from each slot
        let mut run = vec![0usize; t + 1];
        for i in (0..t).rev() {
            run[i] = if rep.success[i] { run[i + 1] + 1 } else { 0 };
        }
        (1..=horizon)
            .map(|n| {
                let windows = t - n + 1;
                let hits = run[..windows].iter().filter(|&&l| l >= n).count();
                weight(n) * hits as f64 / windows as f64
            })
            .sum()
    })
}

/// `E[S] = sum_n suc(n)`, truncated at half the replication length.
pub fn estimate_expected_duration(trace: &LinkTrace) -> McEstimate {
    weighted_window_sum(trace, |_| 1.0)
}

/// `E[S^2] = sum_n (2n - 1) suc(n)`, truncated at half the replication length.
pub fn estimate_second_moment(trace: &LinkTrace) -> McEstimate {
    weighted_window_sum(trace, |n| (2 * n - 1) as f64)
}

/// Maximal runs of equal outcomes. Runs touching either end of a replication
/// are censored: their length is recorded separately and they do not enter
/// the histograms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunHistogram {
    /// `success[l]` = number of complete success runs of length `l`.
    pub success: Vec<usize>,
    pub outage: Vec<usize>,
    pub censored: Vec<usize>,
}

impl RunHistogram {
    fn record(hist: &mut Vec<usize>, len: usize) {
        if hist.len() <= len {
            hist.resize(len + 1, 0);
        }
        hist[len] += 1;
    }

    /// Total slots covered by complete and censored runs.
    pub fn covered_slots(&self) -> usize {
        weighted(&self.success)
            + weighted(&self.outage)
            + self.censored.iter().sum::<usize>()
    }

    /// Empirical pmf of complete success run lengths.
    pub fn success_pmf(&self) -> Vec<f64> {
        normalize(&self.success)
    }

    pub fn outage_pmf(&self) -> Vec<f64> {
        normalize(&self.outage)
    }
}

fn weighted(hist: &[usize]) -> usize {
    hist.iter().enumerate().map(|(len, c)| len * c).sum()
}

fn normalize(hist: &[usize]) -> Vec<f64> {
    let total: usize = hist.iter().sum();
    hist.iter()
        .map(|&c| if total == 0 { 0.0 } else { c as f64 / total as f64 })
        .collect()
}

pub fn run_length_histogram(trace: &LinkTrace) -> RunHistogram {
    let mut hist = RunHistogram::default();
    for rep in &trace.reps {
        let s = &rep.success;
        let mut start = 0;
        while start < s.len() {
            let value = s[start];
            let mut end = start;
            while end < s.len() && s[end] == value {
                end += 1;
            }
            let len = end - start;
            if start == 0 || end == s.len() {
                hist.censored.push(len);
            } else if value {
                RunHistogram::record(&mut hist.success, len);
            } else {
                RunHistogram::record(&mut hist.outage, len);
            }
            start = end;
        }
    }
    hist
}

/// Lag-1 autocorrelation of the success indicator, averaged over the
/// replications in which it is defined.
pub fn lag1_correlation(trace: &LinkTrace) -> McEstimate {
    let values: Vec<f64> = trace
        .reps
        .iter()
        .filter_map(|rep| {
            let x: Vec<f64> = rep.success.iter().map(|&s| s as u8 as f64).collect();
            let n = (x.len() - 1) as f64;
            let (a, b) = (&x[..x.len() - 1], &x[1..]);
            let ma = a.iter().sum::<f64>() / n;
            let mb = b.iter().sum::<f64>() / n;
            let cov: f64 = a.iter().zip(b).map(|(u, v)| (u - ma) * (v - mb)).sum();
            let va: f64 = a.iter().map(|u| (u - ma).powi(2)).sum();
            let vb: f64 = b.iter().map(|v| (v - mb).powi(2)).sum();
            (va > 0.0 && vb > 0.0).then(|| cov / (va * vb).sqrt())
        })
        .collect();
    McEstimate::from_replications(&values)
}

/// Sample moments of the SIR over slots with at least one transmitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirSampleStats {
    pub mean: McEstimate,
    pub variance: McEstimate,
    pub skewness: McEstimate,
    pub samples: usize,
    /// Slots without any transmitter, excluded from the moments.
    pub excluded_slots: usize,
    /// Probability of such a slot on the truncated disk,
    /// `exp(-lambda p pi R^2)`.
    pub expected_excluded_fraction: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct PowerSums {
    n: f64,
    s1: f64,
    s2: f64,
    s3: f64,
}

impl PowerSums {
    fn minus(self, o: Self) -> Self {
        Self {
            n: self.n - o.n,
            s1: self.s1 - o.s1,
            s2: self.s2 - o.s2,
            s3: self.s3 - o.s3,
        }
    }

    fn plus(self, o: Self) -> Self {
        Self {
            n: self.n + o.n,
            s1: self.s1 + o.s1,
            s2: self.s2 + o.s2,
            s3: self.s3 + o.s3,
        }
    }

    /// Mean, population variance and skewness.
    fn moments(self) -> [f64; 3] {
        let m1 = self.s1 / self.n;
        let m2 = self.s2 / self.n;
        let m3 = self.s3 / self.n;
        let var = m2 - m1 * m1;
        let skew = (m3 - 3.0 * m1 * m2 + 2.0 * m1.powi(3)) / var.powf(1.5);
        [m1, var, skew]
    }
}

/// Leave-one-replication-out jackknife around the pooled estimate.
fn jackknife(sums: &[PowerSums]) -> [McEstimate; 3] {
    let total = sums.iter().fold(PowerSums::default(), |a, &b| a.plus(b));
    let full = total.moments();
    let r = sums.len();
    let mut out = full.map(|mean| McEstimate {
        mean,
        stderr: 0.0,
        reps_used: r,
    });
    if r < 2 {
        return out;
    }
    let loo: Vec<[f64; 3]> = sums.iter().map(|&s| total.minus(s).moments()).collect();
    for (j, est) in out.iter_mut().enumerate() {
        let avg = loo.iter().map(|m| m[j]).sum::<f64>() / r as f64;
        let ss: f64 = loo.iter().map(|m| (m[j] - avg).powi(2)).sum();
        est.stderr = ((r - 1) as f64 / r as f64 * ss).sqrt();
    }
    out
}

pub fn estimate_sir_samples(scenario: &Scenario, cfg: &SimConfig) -> Result<SirSampleStats> {
    let trace = super::simulate_link(scenario, cfg, InterferenceMode::Static)?;
    let mut excluded = 0;
    let mut sums = Vec::with_capacity(trace.reps.len());
    for rep in &trace.reps {
        let mut s = PowerSums::default();
        for &x in &rep.sir {
            if x.is_finite() {
                s.n += 1.0;
                s.s1 += x;
                s.s2 += x * x;
                s.s3 += x * x * x;
            } else {
                excluded += 1;
            }
        }
        if s.n > 0.0 {
            sums.push(s);
        }
    }
    let samples = trace.reps.len() * trace.slots - excluded;
    let [mean, variance, skewness] = if sums.is_empty() {
        let nan = McEstimate::from_replications(&[]);
        [nan; 3]
    } else {
        jackknife(&sums)
    };
    let area = std::f64::consts::PI * cfg.radius * cfg.radius;
    Ok(SirSampleStats {
        mean,
        variance,
        skewness,
        samples,
        excluded_slots: excluded,
        expected_excluded_fraction: (-scenario.lambda * scenario.p * area).exp(),
    })
}

/// Empirical RLNC performance: decoding frequency over blocks of `n` slots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RlncEstimate {
    pub decoding: McEstimate,
    pub failure: McEstimate,
    pub throughput: McEstimate,
    pub blocks_per_rep: usize,
}

/// For each block of `n` slots, the `m` received packets contribute a
/// uniformly random `m x k` coefficient matrix; the block decodes iff the
/// matrix has full column rank.
pub fn simulate_rlnc(
    code: &CodeParams,
    scenario: &Scenario,
    cfg: &SimConfig,
    correlated: bool,
) -> Result<RlncEstimate> {
    cfg.validate(scenario)?;
    let (k, n, q) = (code.k(), code.n(), code.q());
    if n > cfg.slots {
        return Err(Error::InsufficientSlots {
            needed: n,
            available: cfg.slots,
        });
    }
    let mode = if correlated {
        InterferenceMode::Static
    } else {
        InterferenceMode::Resampled
    };
    let blocks = cfg.slots / n;
    let freqs: Vec<f64> = for_each_rep(cfg, |rng| {
        let rep = simulate_replication(scenario, cfg, mode, rng);
        let decoded = rep
            .success
            .chunks_exact(n)
            .take(blocks)
            .filter(|block| {
                let m = block.iter().filter(|&&s| s).count();
                m >= k && {
                    let mat = GfMatrix::random(m, k, q, rng);
                    gf_rank(&mat, q).expect("q is prime") == k
                }
            })
            .count();
        decoded as f64 / blocks as f64
    });
    let decoding = McEstimate::from_replications(&freqs);
    let failure = McEstimate {
        mean: 1.0 - decoding.mean,
        ..decoding
    };
    let rate = code.rate();
    let throughput = McEstimate {
        mean: rate * decoding.mean,
        stderr: rate * decoding.stderr,
        reps_used: decoding.reps_used,
    };
    Ok(RlncEstimate {
        decoding,
        failure,
        throughput,
        blocks_per_rep: blocks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusReport {
    pub radius: f64,
    pub at_radius: McEstimate,
    pub at_double: McEstimate,
    /// Difference in units of the combined standard error.
    pub z: f64,
    pub flagged: bool,
}

/// Compares the single-slot success estimate at `R` and `2R` with the same
/// seed; flags a difference above 3 combined standard errors.
pub fn radius_convergence_check(scenario: &Scenario, cfg: &SimConfig) -> Result<RadiusReport> {
    let wide = SimConfig {
        radius: 2.0 * cfg.radius,
        ..*cfg
    };
    let a = estimate_joint_success(
        &super::simulate_link(scenario, cfg, InterferenceMode::Static)?,
        1,
    )?;
    let b = estimate_joint_success(
        &super::simulate_link(scenario, &wide, InterferenceMode::Static)?,
        1,
    )?;
    let diff = a.mean - b.mean;
    let se = a.stderr.hypot(b.stderr);
    let z = if diff == 0.0 {
        0.0
    } else if se > 0.0 {
        diff / se
    } else {
        diff.signum() * f64::INFINITY
    };
    Ok(RadiusReport {
        radius: cfg.radius,
        at_radius: a,
        at_double: b,
        z,
        flagged: z.abs() > 3.0,
    })
}
