//! Figure datasets as named tables.
//!
//! Grids are generated from integers (`i * step / denom`) so every table is
//! reproducible bit for bit. Points where an analytic evaluation fails (e.g.
//! the stability check of an alternating sum) are written as NaN.

use std::fmt::Write as _;
use std::io;

use rayon::prelude::*;

use crate::coding::{failure_prob, throughput, CodeParams};
use crate::durations::{Durations, DEFAULT_SERIES_TOL};
use crate::error::{Error, Result};
use crate::model::LinkParams;
use crate::sirstats::sir_exceedance;

/// An x column and any number of named y columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureTable {
    pub name: String,
    pub x_label: String,
    pub x: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

fn fmt_value(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:?}")
    }
}

impl FigureTable {
    pub fn new(name: &str, x_label: &str, x: Vec<f64>) -> Self {
        Self {
            name: name.to_string(),
            x_label: x_label.to_string(),
            x,
            columns: Vec::new(),
        }
    }

    pub fn push_column(&mut self, label: impl Into<String>, values: Vec<f64>) {
        assert_eq!(values.len(), self.x.len(), "column length must match x");
        self.columns.push((label.into(), values));
    }

    pub fn column(&self, label: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, v)| v.as_slice())
    }

    pub fn rows(&self) -> usize {
        self.x.len()
    }

    /// Comma-separated, header row first, shortest round-trip float format.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.x_label);
        for (label, _) in &self.columns {
            out.push(',');
            out.push_str(label);
        }
        out.push('\n');
        for (i, x) in self.x.iter().enumerate() {
            out.push_str(&fmt_value(*x));
            for (_, col) in &self.columns {
                let _ = write!(out, ",{}", fmt_value(col[i]));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}

/// `(lo..=hi).step_by(step) / denom` as floats.
fn grid(lo: u32, hi: u32, step: usize, denom: f64) -> Vec<f64> {
    (lo..=hi).step_by(step).map(|i| i as f64 / denom).collect()
}

fn label(prefix: &str, v: f64) -> String {
    format!("{prefix}={v}")
}

/// Fills columns in parallel; each column is a function of its parameter.
fn build<F>(table: &mut FigureTable, params: &[f64], prefix: &str, f: F)
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let x = table.x.clone();
    let cols: Vec<Vec<f64>> = params
        .par_iter()
        .map(|&c| x.iter().map(|&xv| f(xv, c)).collect())
        .collect();
    for (c, values) in params.iter().zip(cols) {
        table.push_column(label(prefix, *c), values);
    }
}

fn or_nan(r: Result<f64>) -> f64 {
    r.unwrap_or(f64::NAN)
}

fn expected_duration(lambda: f64, p: f64, alpha: f64, theta: f64) -> f64 {
    or_nan(
        LinkParams::new(lambda, p, alpha, theta, 1.0)
            .and_then(|lp| Durations::new(&lp).expected_success_duration(DEFAULT_SERIES_TOL)),
    )
}

/// `P[SIR >= mean + k sd]` over `alpha in [2.05, 10]`, `k = 0..5`.
pub fn fig_sir_mom() -> FigureTable {
    let mut t = FigureTable::new("sir_mom", "alpha", grid(205, 1000, 5, 100.0));
    build(&mut t, &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], "k", |alpha, k| {
        or_nan(sir_exceedance(k, alpha))
    });
    t
}

fn p_grid() -> Vec<f64> {
    grid(1, 50, 1, 100.0)
}

fn rho_axis(p: &[f64]) -> Vec<f64> {
    p.iter().map(|p| p / 2.0).collect()
}

/// `E[S]` over `p` for `lambda = 0.1..1`; `theta = 1`, `alpha = 3`.
pub fn fig_succdur_lam_p() -> FigureTable {
    let mut t = FigureTable::new("succdur_lam_p", "p", p_grid());
    build(&mut t, &grid(1, 10, 1, 10.0), "lambda", |p, lambda| {
        expected_duration(lambda, p, 3.0, 1.0)
    });
    t
}

/// Same data as [`fig_succdur_lam_p`] over `rho = p / 2`.
pub fn fig_succdur_lam_p_rho() -> FigureTable {
    let mut t = fig_succdur_lam_p();
    t.name = "succdur_lam_p_rho".into();
    t.x_label = "rho".into();
    t.x = rho_axis(&t.x);
    t
}

/// `E[S]` over `rho` at constant `lambda p`; columns indexed by `param`.
fn constant_load(name: &str, prefix: &str, params: &[f64], f: impl Fn(f64, f64) -> f64 + Sync) -> FigureTable {
    let p = p_grid();
    let mut t = FigureTable::new(name, "rho", p.clone());
    build(&mut t, params, prefix, f);
    t.x = rho_axis(&p);
    t
}

/// `E[S]` over `rho` with `lambda p = 0.01`, `alpha = 2.1..3`.
pub fn fig_succdur_corr() -> FigureTable {
    constant_load("succdur_corr", "alpha", &grid(21, 30, 1, 10.0), |p, alpha| {
        expected_duration(0.01 / p, p, alpha, 1.0)
    })
}

pub fn fig_succdur_alpha() -> FigureTable {
    FigureTable {
        name: "succdur_alpha".into(),
        ..fig_succdur_corr()
    }
}

/// `E[S]` over `rho` for `lambda p = 0.01..0.1`; `alpha = 3`.
pub fn fig_succdur_plam() -> FigureTable {
    constant_load("succdur_plam", "lambda_p", &grid(1, 10, 1, 100.0), |p, load| {
        expected_duration(load / p, p, 3.0, 1.0)
    })
}

fn theta_grid() -> Vec<f64> {
    grid(20, 40, 1, 20.0)
}

/// `E[S]` over `rho` for `theta = 1..2` at `lambda p = 0.01`.
pub fn fig_succdur_theta() -> FigureTable {
    constant_load("succdur_theta", "theta", &theta_grid(), |p, theta| {
        expected_duration(0.01 / p, p, 3.0, theta)
    })
}

/// `E[S]` over `rho` for `theta = 1..2` at `lambda = 1`.
pub fn fig_succdur_constlam_theta() -> FigureTable {
    constant_load("succdur_constlam_theta", "theta", &theta_grid(), |p, theta| {
        expected_duration(1.0, p, 3.0, theta)
    })
}

/// `outex(n)` over `p in (0, 1]`, `n = 1..5`; `theta = 0.3`, `lambda = 1`, `alpha = 3`.
pub fn fig_poc() -> FigureTable {
    let mut t = FigureTable::new("poc", "p", grid(1, 100, 1, 100.0));
    build(&mut t, &[1.0, 2.0, 3.0, 4.0, 5.0], "n", |p, n| {
        or_nan(
            LinkParams::new(1.0, p, 3.0, 0.3, 1.0)
                .and_then(|lp| Durations::new(&lp).outage_duration_pmf(n as usize)),
        )
    });
    t
}

const RLNC_K: usize = 5;
const RLNC_Q: u64 = 2;

fn rlnc_point(n: usize, params: Result<LinkParams>, correlated: bool, failure: bool) -> f64 {
    or_nan(params.and_then(|lp| {
        let code = CodeParams::new(RLNC_K, n, RLNC_Q)?;
        if failure {
            failure_prob(&code, &lp, correlated)
        } else {
            throughput(&code, &lp, correlated)
        }
    }))
}

fn rlnc_table(
    name: &str,
    n_hi: u32,
    loads: &[f64],
    load_prefix: &str,
    point: impl Fn(usize, f64, bool) -> f64 + Sync,
) -> FigureTable {
    let mut t = FigureTable::new(name, "n", grid(5, n_hi, 1, 1.0));
    let specs: Vec<(f64, bool)> = loads
        .iter()
        .flat_map(|&l| [(l, true), (l, false)])
        .collect();
    let x = t.x.clone();
    let cols: Vec<Vec<f64>> = specs
        .par_iter()
        .map(|&(load, corr)| x.iter().map(|&n| point(n as usize, load, corr)).collect())
        .collect();
    for ((load, corr), values) in specs.iter().zip(cols) {
        let kind = if *corr { "corr" } else { "uncorr" };
        t.push_column(format!("{kind} {load_prefix}={load}"), values);
    }
    t
}

/// Failure probability over `n in [5, 30]` with `p = n / 30`, `k = 5`, `q = 2`,
/// `alpha = 4`, for `lambda = 0.07..0.1`, correlated and independent.
pub fn fig_tradeoff() -> FigureTable {
    rlnc_table("tradeoff", 30, &grid(7, 10, 1, 100.0), "lambda", |n, lambda, corr| {
        let params = LinkParams::new(lambda, n as f64 / 30.0, 4.0, 1.0, 1.0);
        rlnc_point(n, params, corr, true)
    })
}

/// Throughput over `n in [5, 20]` with `p = n / 20` and constant `n lambda`,
/// `k = 5`, `q = 2`, `alpha = 3`.
pub fn fig_through() -> FigureTable {
    rlnc_table("through", 20, &[0.5, 1.5, 2.5], "n_lambda", |n, load, corr| {
        let params = LinkParams::new(load / n as f64, n as f64 / 20.0, 3.0, 1.0, 1.0);
        rlnc_point(n, params, corr, false)
    })
}

type Builder = fn() -> FigureTable;

const REGISTRY: &[(&str, Builder)] = &[
    ("sir_mom", fig_sir_mom),
    ("succdur_lam_p", fig_succdur_lam_p),
    ("succdur_lam_p_rho", fig_succdur_lam_p_rho),
    ("succdur_corr", fig_succdur_corr),
    ("succdur_alpha", fig_succdur_alpha),
    ("succdur_plam", fig_succdur_plam),
    ("succdur_theta", fig_succdur_theta),
    ("succdur_constlam_theta", fig_succdur_constlam_theta),
    ("poc", fig_poc),
    ("tradeoff", fig_tradeoff),
    ("through", fig_through),
];

pub fn figure_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|(n, _)| *n).collect()
}

pub fn generate(name: &str) -> Result<FigureTable> {
    REGISTRY
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| f())
        .ok_or_else(|| {
            Error::invalid(
                "figure",
                format!("unknown figure `{name}`; known: {}", figure_names().join(", ")),
            )
        })
}

/// The `E[S]`-over-`rho` tables of the evaluation grids.
pub fn evaluation_grids() -> Vec<FigureTable> {
    vec![
        fig_succdur_plam(),
        fig_succdur_lam_p_rho(),
        fig_succdur_theta(),
        fig_succdur_constlam_theta(),
        fig_succdur_alpha(),
    ]
}
