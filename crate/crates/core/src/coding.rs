//! Random linear network coding over a prime field: rank of coefficient
//! matrices, decoding probability, and the resulting link throughput under
//! correlated or independent interference.

use std::ops::RangeInclusive;

use rand::Rng;

use crate::durations::Durations;
use crate::error::{Error, Result};
use crate::model::LinkParams;

/// `k` source packets coded into `n` packets over GF(`q`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeParams {
    k: usize,
    n: usize,
    q: u64,
}

impl CodeParams {
    pub fn new(k: usize, n: usize, q: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k", "must be >= 1"));
        }
        if n < k {
            return Err(Error::invalid("n", format!("must be >= k = {k}, got {n}")));
        }
        if !is_prime(q) {
            return Err(Error::invalid("q", format!("field size must be prime, got {q}")));
        }
        Ok(Self { k, n, q })
    }

    pub fn k(&self) -> usize {
        self.k
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.k, n, self.q)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Dense row-major matrix with entries in `{0, .., q-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GfMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl GfMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::invalid(
                "entries",
                format!("expected {} entries, got {}", rows * cols, entries.len()),
            ));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("rows", "ragged matrix"));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    /// I.i.d. uniform entries over GF(`q`), all-zero rows included.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, q: u64, rng: &mut R) -> Self {
        let entries = (0..rows * cols).map(|_| rng.random_range(0..q)).collect();
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.entries[row * self.cols + col]
    }
}

/// Rank over GF(`q`) by Gaussian elimination with modular inverses.
pub fn gf_rank(mat: &GfMatrix, q: u64) -> Result<usize> {
    if !is_prime(q) {
        return Err(Error::Domain(format!("field size {q} is not prime")));
    }
    if let Some(&bad) = mat.entries.iter().find(|&&e| e >= q) {
        return Err(Error::Domain(format!("entry {bad} is not an element of GF({q})")));
    }
    if q == 2 && mat.cols <= 64 {
        return Ok(rank_gf2_packed(mat));
    }
    Ok(rank_dense(mat, q))
}

fn rank_dense(mat: &GfMatrix, q: u64) -> usize {
    let (rows, cols) = (mat.rows, mat.cols);
    let mut a = mat.entries.clone();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
            continue;
        };
        if pivot != rank {
            for c in 0..cols {
                a.swap(pivot * cols + c, rank * cols + c);
            }
        }
        // Fermat inverse, q prime
        let inv = pow_mod(a[rank * cols + col], q - 2, q);
        for c in col..cols {
            a[rank * cols + c] = mul_mod(a[rank * cols + c], inv, q);
        }
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let factor = a[r * cols + col];
            if factor == 0 {
                continue;
            }
            for c in col..cols {
                let sub = mul_mod(factor, a[rank * cols + c], q);
                a[r * cols + c] = (a[r * cols + c] + q - sub) % q;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn rank_gf2_packed(mat: &GfMatrix) -> usize {
    let mut rows: Vec<u64> = (0..mat.rows)
        .map(|r| {
            (0..mat.cols).fold(0u64, |bits, c| bits | ((mat.get(r, c) & 1) << c))
        })
        .collect();
    let mut rank = 0;
    for col in 0..mat.cols {
        let bit = 1u64 << col;
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] & bit != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row & bit != 0 {
                *row ^= pivot_row;
            }
        }
        rank += 1;
    }
    rank
}

/// Probability that `m` received packets decode:
/// `0` if `m < k`, else `prod_{i=0..k-1} (1 - q^-(m-i))`.
pub fn decoding_prob(m: usize, code: &CodeParams) -> f64 {
    if m < code.k {
        return 0.0;
    }
    let q = code.q as f64;
    (0..code.k).fold(1.0, |acc, i| acc * (1.0 - q.powi(-((m - i) as i32))))
}

/// `sum_{m=k..n} P_dec(m) P[S(n) = m]`.
fn decode_success(code: &CodeParams, params: &LinkParams, correlated: bool) -> Result<f64> {
    let dur = Durations::new(params);
    let counts: Vec<f64> = if correlated {
        dur.success_count_distribution(code.n)?.values
    } else {
        (0..=code.n)
            .map(|m| dur.baseline_success_count_pmf(code.n, m))
            .collect()
    };
    Ok((code.k..=code.n)
        .map(|m| decoding_prob(m, code) * counts[m])
        .sum())
}

/// Throughput `(k/n) sum_{m=k..n} P_dec(m) P[S(n) = m]`.
pub fn throughput(code: &CodeParams, params: &LinkParams, correlated: bool) -> Result<f64> {
    Ok(code.rate() * decode_success(code, params, correlated)?)
}

/// Probability that the receiver cannot decode the block.
pub fn failure_prob(code: &CodeParams, params: &LinkParams, correlated: bool) -> Result<f64> {
    Ok(1.0 - decode_success(code, params, correlated)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    MinFailure,
    MaxThroughput,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RedundancyChoice {
    pub best_n: usize,
    pub best_value: f64,
    /// Objective value for every `n` in the range.
    pub values: Vec<(usize, f64)>,
}

/// Picks the number of coded packets optimizing `objective` over `n_range`.
///
/// `params_of_n` expresses how the network load depends on `n` (e.g. a
/// transmit probability proportional to `n`). Ties go to the smallest `n`.
pub fn optimize_redundancy<F>(
    k: usize,
    q: u64,
    params_of_n: F,
    n_range: RangeInclusive<usize>,
    objective: Objective,
    correlated: bool,
) -> Result<RedundancyChoice>
where
    F: Fn(usize) -> Result<LinkParams>,
{
    if n_range.is_empty() {
        return Err(Error::EmptyRange);
    }
    let mut values = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    for n in n_range {
        let code = CodeParams::new(k, n, q)?;
        let params = params_of_n(n)?;
        let value = match objective {
            Objective::MinFailure => failure_prob(&code, &params, correlated)?,
            Objective::MaxThroughput => throughput(&code, &params, correlated)?,
        };
        values.push((n, value));
        let better = match (best, objective) {
            (None, _) => true,
            (Some((_, b)), Objective::MinFailure) => value < b,
            (Some((_, b)), Objective::MaxThroughput) => value > b,
        };
        if better {
            best = Some((n, value));
        }
    }
    let (best_n, best_value) = best.expect("range is non-empty");
    Ok(RedundancyChoice {
        best_n,
        best_value,
        values,
    })
}
