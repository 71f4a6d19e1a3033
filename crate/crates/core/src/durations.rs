//! Closed-form temporal statistics of the link: joint success over
//! consecutive slots, success and outage duration laws, the number of
//! successful slots out of `n`, and the independent-slot baselines.
//!
//! Everything derives from the joint success sequence
//! `suc(n) = exp(-contention * D_n(p, delta))`, where `D_n` is the diversity
//! polynomial. The outage-side laws are alternating binomial sums over that
//! sequence and are evaluated in double-double arithmetic with an explicit
//! error bound (see [`StabilityLimits`]).

use crate::error::{Error, Result};
use crate::model::{delta_exponent, spatial_contention, LinkParams};
use crate::numeric::{compensated_sum, DoubleDouble, NeumaierSum, DD_EPS};
use crate::special::{binomial, binomial_exact, gen_binom};

/// Default truncation tolerance for the duration moment series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-10;

/// Hard cap on the number of series terms.
pub const MAX_SERIES_TERMS: usize = 10_000_000;

/// Accuracy contract for the alternating-sum quantities (outage run
/// probabilities, outage duration pmf, success counts).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityLimits {
    /// Largest `n` for which the alternating sums are attempted at all.
    pub max_n: usize,
    /// Largest acceptable ratio of the error bound to the result.
    pub max_rel_error: f64,
}

impl Default for StabilityLimits {
    fn default() -> Self {
        Self {
            max_n: 60,
            max_rel_error: 1e-8,
        }
    }
}

/// A probability mass function tabulated from `support_start`.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfTable {
    pub values: Vec<f64>,
    /// Mass not covered by `values` (exact for the duration tables).
    pub tail_bound: f64,
    pub support_start: usize,
}

impl PmfTable {
    /// Probability at support point `n`, zero outside the tabulated range.
    pub fn get(&self, n: usize) -> f64 {
        n.checked_sub(self.support_start)
            .and_then(|i| self.values.get(i).copied())
            .unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        let mut s = NeumaierSum::new();
        s.extend(self.values.iter().copied());
        s.value()
    }

    /// `(support point, probability)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i + self.support_start, v))
    }
}

/// The `n`th diversity polynomial
/// `D_n(p, delta) = sum_{k=1..n} C(n, k) C(delta - 1, k - 1) p^k`, with `D_0 = 0`.
///
/// The defining sum alternates in sign. It is evaluated through the
/// equivalent positive-term form
/// `D_n = n p sum_{j<n} C(n-1, j) (1+delta)_j / (j+1)! p^j (1-p)^(n-1-j)`
/// in double-double precision.
pub fn diversity_poly(n: usize, p: f64, delta: f64) -> f64 {
    diversity_poly_dd(n, p, delta).to_f64()
}

pub(crate) fn diversity_poly_dd(n: usize, p: f64, delta: f64) -> DoubleDouble {
    if n == 0 {
        return DoubleDouble::ZERO;
    }
    const BIG: f64 = 3.273_390_607_896_142e150; // 2^500
    const SMALL: f64 = 1.0 / BIG;
    let p_dd = DoubleDouble::from_f64(p);
    let q_dd = DoubleDouble::ONE - p_dd;
    let m = n - 1;

    // terms t_j = C(m, j) (1+delta)_j / (j+1)! p^j q^(m-j), held as
    // (term, sum) * 2^(500 * scale) so that neither overflows nor underflows
    let mut scale: i64 = 0;
    let mut term = DoubleDouble::ONE;
    if q_dd.hi > 0.0 {
        for _ in 0..m {
            term = term * q_dd;
            if term.hi < SMALL {
                term = term.ldexp(500);
                scale -= 1;
            }
        }
    }
    let mut sum = DoubleDouble::ZERO;
    let ratio_pq = if q_dd.hi > 0.0 { Some(p_dd.div_dd(q_dd)) } else { None };
    for j in 0..=m {
        if let Some(r) = ratio_pq {
            sum = sum + term;
            if j < m {
                let rising = DoubleDouble::from_f64((j + 1) as f64) + DoubleDouble::from_f64(delta);
                term = (term * rising * r)
                    .mul_f64((m - j) as f64)
                    .div_f64(((j + 1) * (j + 2)) as f64);
            }
        } else if j == m {
            // p = 1: only the last term survives
            let mut w = DoubleDouble::ONE;
            for i in 0..m {
                let rising = DoubleDouble::from_f64((i + 1) as f64) + DoubleDouble::from_f64(delta);
                w = (w * rising).div_f64((i + 2) as f64);
            }
            sum = w;
        }
        if term.hi > BIG {
            term = term.ldexp(-500);
            sum = sum.ldexp(-500);
            scale += 1;
        } else if term.hi != 0.0 && term.hi < SMALL && sum.hi < SMALL {
            term = term.ldexp(500);
            sum = sum.ldexp(500);
            scale -= 1;
        }
    }
    let mut out = sum.mul_f64(n as f64) * p_dd;
    while scale > 0 {
        out = out.ldexp(500);
        scale -= 1;
    }
    while scale < 0 {
        out = out.ldexp(-500);
        scale += 1;
    }
    out
}

/// The diversity polynomial by its defining alternating sum in plain `f64`.
///
/// Accurate only while `n p` is small; kept as a cross-check for
/// [`diversity_poly`].
pub fn diversity_poly_direct(n: usize, p: f64, delta: f64) -> f64 {
    let mut s = NeumaierSum::new();
    s.extend((1..=n as u32).map(|k| {
        binomial(n as u32, k) * gen_binom(delta - 1.0, k - 1) * p.powi(k as i32)
    }));
    s.value()
}

/// Iterates `D_1, D_2, ...` in `O(1)` per step with the three-term
/// (contiguous hypergeometric) recurrence
/// `(n+1) F_{n+1} = (2n - (n - delta) p) F_n - (n-1)(1-p) F_{n-1}`,
/// `D_n = n p F_n`. The wanted solution is the dominant one, so forward
/// iteration is stable.
#[derive(Debug, Clone)]
pub struct DiversitySequence {
    p: f64,
    delta: f64,
    n: usize,
    f_prev: f64,
    f: f64,
}

impl DiversitySequence {
    pub fn new(p: f64, delta: f64) -> Self {
        Self {
            p,
            delta,
            n: 1,
            f_prev: 0.0,
            f: 1.0,
        }
    }
}

impl Iterator for DiversitySequence {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let n = self.n as f64;
        let d = n * self.p * self.f;
        let next = ((2.0 * n - (n - self.delta) * self.p) * self.f
            - (n - 1.0) * (1.0 - self.p) * self.f_prev)
            / (n + 1.0);
        self.f_prev = self.f;
        self.f = next;
        self.n += 1;
        Some(d)
    }
}

/// Closed-form duration statistics for one parameter set.
#[derive(Debug, Clone, Copy)]
pub struct Durations {
    params: LinkParams,
    contention: f64,
    delta: f64,
    limits: StabilityLimits,
}

impl Durations {
    pub fn new(params: &LinkParams) -> Self {
        Self {
            params: *params,
            contention: spatial_contention(params),
            delta: delta_exponent(params),
            limits: StabilityLimits::default(),
        }
    }

    pub fn with_limits(mut self, limits: StabilityLimits) -> Self {
        self.limits = limits;
        self
    }

    pub fn params(&self) -> &LinkParams {
        &self.params
    }

    pub fn limits(&self) -> StabilityLimits {
        self.limits
    }

    fn exponent_dd(&self, n: usize) -> DoubleDouble {
        diversity_poly_dd(n, self.params.p(), self.delta).mul_f64(self.contention)
    }

    fn joint_success_dd(&self, n: usize) -> DoubleDouble {
        if n == 0 {
            DoubleDouble::ONE
        } else {
            (-self.exponent_dd(n)).exp()
        }
    }

    /// `suc(0..=n)` together with the relative error each value carries.
    fn joint_success_table(&self, n: usize) -> (Vec<DoubleDouble>, f64) {
        let exponent = self.exponent_dd(n).to_f64();
        let table = (0..=n).map(|m| self.joint_success_dd(m)).collect();
        let rel = DD_EPS * (2.0 + n as f64 * (1.0 + exponent));
        (table, rel)
    }

    /// Probability of success in each of `n` consecutive slots.
    pub fn joint_success(&self, n: usize) -> f64 {
        self.joint_success_dd(n).to_f64()
    }

    /// `P[S = n] = suc(n) - suc(n + 1)` for `n >= 1`. At `n = 0` this
    /// returns `1 - suc(1)`, the mass of starting in outage.
    pub fn success_duration_pmf(&self, n: usize) -> f64 {
        (self.joint_success_dd(n) - self.joint_success_dd(n + 1)).to_f64()
    }

    /// `E[S] = sum_{n>=1} suc(n)`.
    pub fn expected_success_duration(&self, tol: f64) -> Result<f64> {
        self.success_series(tol, |_| 1.0)
    }

    /// `E[S^2] = sum_{n>=1} (2n - 1) suc(n)`.
    pub fn success_duration_second_moment(&self, tol: f64) -> Result<f64> {
        self.success_series(tol, |n| (2 * n - 1) as f64)
    }

    pub fn success_duration_variance(&self, tol: f64) -> Result<f64> {
        let mean = self.expected_success_duration(tol)?;
        Ok(self.success_duration_second_moment(tol)? - mean * mean)
    }

    fn success_series(&self, tol: f64, weight: impl Fn(usize) -> f64) -> Result<f64> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::invalid("tol", format!("must be > 0, got {tol}")));
        }
        let mut sum = NeumaierSum::new();
        let mut prev_term = f64::INFINITY;
        let sequence = DiversitySequence::new(self.params.p(), self.delta);
        for (i, d) in sequence.take(MAX_SERIES_TERMS).enumerate() {
            let n = i + 1;
            let term = weight(n) * (-self.contention * d).exp();
            sum.add(term);
            let ratio = term / prev_term;
            prev_term = term;
            if term == 0.0 {
                return Ok(sum.value());
            }
            if term < tol * (1.0 + sum.value()) && ratio < 1.0 {
                let tail = term * ratio / (1.0 - ratio);
                if tail < tol {
                    return Ok(sum.value());
                }
            }
        }
        Err(Error::NonConvergence {
            terms: MAX_SERIES_TERMS,
        })
    }

    fn check_n(&self, quantity: &'static str, n: usize) -> Result<()> {
        if n > self.limits.max_n {
            Err(Error::Stability {
                quantity,
                n,
                rel_error: f64::INFINITY,
            })
        } else {
            Ok(())
        }
    }

    /// `sum_{i=0..m} C(m, i) (-1)^i suc(offset + i)`, scaled by `scale`.
    #[allow(clippy::too_many_arguments)]
    fn alternating(
        &self,
        quantity: &'static str,
        n: usize,
        m: usize,
        offset: usize,
        scale: u128,
        suc: &[DoubleDouble],
        suc_rel: f64,
    ) -> Result<f64> {
        let terms = (0..=m)
            .map(|i| {
                let c = binomial_exact(m as u32, i as u32).expect("n within cap") * scale;
                let t = DoubleDouble::from_u128(c) * suc[offset + i];
                if i % 2 == 0 {
                    t
                } else {
                    -t
                }
            })
            .collect();
        let r = compensated_sum(terms, suc_rel);
        let rel_error = r.rel_error();
        if rel_error > self.limits.max_rel_error {
            return Err(Error::Stability {
                quantity,
                n,
                rel_error,
            });
        }
        Ok(r.value.to_f64())
    }

    /// Probability of `n` consecutive outage slots,
    /// `out(n) = sum_{k=0..n} C(n, k) (-1)^k suc(k)`.
    pub fn outage_run_prob(&self, n: usize) -> Result<f64> {
        self.check_n("outage run probability", n)?;
        let (suc, rel) = self.joint_success_table(n);
        self.alternating("outage run probability", n, n, 0, 1, &suc, rel)
    }

    /// `P[O = n] = sum_{k=0..n} C(n, k) (-1)^k suc(k + 1)`, for `n >= 0`.
    pub fn outage_duration_pmf(&self, n: usize) -> Result<f64> {
        self.check_n("outage duration pmf", n)?;
        let (suc, rel) = self.joint_success_table(n + 1);
        self.alternating("outage duration pmf", n, n, 1, 1, &suc, rel)
    }

    /// Probability that exactly `k` of `n` consecutive slots succeed,
    /// `C(n, k) sum_{i=0..n-k} C(n-k, i) (-1)^i suc(k + i)`.
    pub fn success_count_pmf(&self, n: usize, k: usize) -> Result<f64> {
        if k > n {
            return Err(Error::invalid("k", format!("must be <= n = {n}, got {k}")));
        }
        self.check_n("success count pmf", n)?;
        let (suc, rel) = self.joint_success_table(n);
        self.success_count_from_table(n, k, &suc, rel)
    }

    fn success_count_from_table(
        &self,
        n: usize,
        k: usize,
        suc: &[DoubleDouble],
        rel: f64,
    ) -> Result<f64> {
        let scale = binomial_exact(n as u32, k as u32).expect("n within cap");
        self.alternating("success count pmf", n, n - k, k, scale, suc, rel)
    }

    /// The full law of the number of successes in `n` slots, `k = 0..=n`.
    pub fn success_count_distribution(&self, n: usize) -> Result<PmfTable> {
        self.check_n("success count pmf", n)?;
        let (suc, rel) = self.joint_success_table(n);
        let values = (0..=n)
            .map(|k| self.success_count_from_table(n, k, &suc, rel))
            .collect::<Result<Vec<_>>>()?;
        Ok(PmfTable {
            values,
            tail_bound: 0.0,
            support_start: 0,
        })
    }

    /// `P[S = n]` for `n = 1..=max_n`; the tail is `suc(max_n + 1)`.
    pub fn success_duration_table(&self, max_n: usize) -> PmfTable {
        let suc: Vec<DoubleDouble> = (0..=max_n + 1).map(|m| self.joint_success_dd(m)).collect();
        let values = (1..=max_n).map(|n| (suc[n] - suc[n + 1]).to_f64()).collect();
        PmfTable {
            values,
            tail_bound: suc[max_n + 1].to_f64(),
            support_start: 1,
        }
    }

    /// `P[O = n]` for `n = 0..=max_n`; the tail is `out(max_n + 1)`.
    pub fn outage_duration_table(&self, max_n: usize) -> Result<PmfTable> {
        self.check_n("outage duration pmf", max_n + 1)?;
        let (suc, rel) = self.joint_success_table(max_n + 1);
        let values = (0..=max_n)
            .map(|n| self.alternating("outage duration pmf", n, n, 1, 1, &suc, rel))
            .collect::<Result<Vec<_>>>()?;
        let tail = self.alternating(
            "outage run probability",
            max_n + 1,
            max_n + 1,
            0,
            1,
            &suc,
            rel,
        )?;
        Ok(PmfTable {
            values,
            tail_bound: tail,
            support_start: 0,
        })
    }

    fn single_slot(&self) -> (f64, f64) {
        let x = self.contention * self.params.p();
        ((-x).exp(), -(-x).exp_m1())
    }

    /// Binomial(`n`, `suc(1)`) law: slots treated as independent.
    pub fn baseline_success_count_pmf(&self, n: usize, k: usize) -> f64 {
        if k > n {
            return 0.0;
        }
        let (s, f) = self.single_slot();
        binomial(n as u32, k as u32) * s.powi(k as i32) * f.powi((n - k) as i32)
    }

    /// `suc(1) / (1 - suc(1))`, the mean success run with independent slots.
    pub fn baseline_expected_duration(&self) -> f64 {
        let (s, f) = self.single_slot();
        s / f
    }
}

pub fn joint_success_prob(n: usize, params: &LinkParams) -> f64 {
    Durations::new(params).joint_success(n)
}

pub fn success_duration_pmf(n: usize, params: &LinkParams) -> f64 {
    Durations::new(params).success_duration_pmf(n)
}

pub fn expected_success_duration(params: &LinkParams, tol: f64) -> Result<f64> {
    Durations::new(params).expected_success_duration(tol)
}

pub fn success_duration_second_moment(params: &LinkParams, tol: f64) -> Result<f64> {
    Durations::new(params).success_duration_second_moment(tol)
}

pub fn success_duration_variance(params: &LinkParams, tol: f64) -> Result<f64> {
    Durations::new(params).success_duration_variance(tol)
}

pub fn outage_run_prob(n: usize, params: &LinkParams) -> Result<f64> {
    Durations::new(params).outage_run_prob(n)
}

pub fn outage_duration_pmf(n: usize, params: &LinkParams) -> Result<f64> {
    Durations::new(params).outage_duration_pmf(n)
}

pub fn success_count_pmf(n: usize, k: usize, params: &LinkParams) -> Result<f64> {
    Durations::new(params).success_count_pmf(n, k)
}

pub fn baseline_success_count_pmf(n: usize, k: usize, params: &LinkParams) -> f64 {
    Durations::new(params).baseline_success_count_pmf(n, k)
}

pub fn baseline_expected_duration(params: &LinkParams) -> f64 {
    Durations::new(params).baseline_expected_duration()
}
