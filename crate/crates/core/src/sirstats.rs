//! Statistics of the single-slot SIR.
//!
//! With Rayleigh fading the SIR has the Weibull-type ccdf
//! `P[SIR >= t] = exp(-c t^delta)`, `c = contention(theta = 1) * p`. Its raw
//! moments are `Gamma(1 + n/delta) c^(-n/delta)`; quantities built from
//! standardized moments (exceedance of mean plus `k` standard deviations,
//! skewness) do not depend on `c` and hence only on `alpha`.

use crate::error::{Error, Result};
use crate::model::{delta_exponent, gamma_product, LinkParams};
use crate::special::{gamma, ln_gamma};

/// Weibull-form ccdf `exp(-c t^delta)` of the SIR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirCcdfForm {
    pub c: f64,
    pub delta: f64,
}

impl SirCcdfForm {
    pub fn new(c: f64, delta: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::invalid("c", format!("must be > 0, got {c}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid("delta", format!("must lie in (0, 1), got {delta}")));
        }
        Ok(Self { c, delta })
    }

    pub fn from_params(params: &LinkParams) -> Self {
        let delta = delta_exponent(params);
        let r = params.r();
        let c = params.lambda() * std::f64::consts::PI * r * r * gamma_product(delta) * params.p();
        Self { c, delta }
    }

    /// Unit-scale form for a given path-loss exponent.
    fn standard(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 2.0) {
            return Err(Error::invalid("alpha", format!("must be > 2, got {alpha}")));
        }
        Self::new(1.0, 2.0 / alpha)
    }

    pub fn ccdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            1.0
        } else {
            (-self.c * t.powf(self.delta)).exp()
        }
    }

    /// `E[SIR^n]`; `+inf` when the value overflows `f64`.
    pub fn moment(&self, n: u32) -> f64 {
        let order = n as f64 / self.delta;
        let ln = ln_gamma(order + 1.0).expect("positive argument") - order * self.c.ln();
        if ln > f64::MAX.ln() {
            f64::INFINITY
        } else {
            ln.exp()
        }
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn variance(&self) -> f64 {
        let m1 = self.moment(1);
        self.moment(2) - m1 * m1
    }

    pub fn skewness(&self) -> f64 {
        let (m1, m2, m3) = (self.moment(1), self.moment(2), self.moment(3));
        if !(m1.is_finite() && m2.is_finite() && m3.is_finite()) {
            return f64::INFINITY;
        }
        let var = m2 - m1 * m1;
        (m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1) / var.powf(1.5)
    }

    /// `P[SIR >= E[SIR] + k sd(SIR)]` evaluated through the ccdf.
    pub fn exceedance(&self, k: f64) -> f64 {
        self.ccdf(self.mean() + k * self.variance().sqrt())
    }
}

/// `E[SIR^n] = n int_0^inf t^(n-1) P[SIR >= t] dt`.
pub fn sir_moment(n: u32, params: &LinkParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "moment order must be >= 1"));
    }
    Ok(SirCcdfForm::from_params(params).moment(n))
}

/// Probability that the SIR exceeds its mean by `k` standard deviations:
/// `exp(-(G1 + k sqrt(Gamma(alpha + 1) - G1^2))^delta)`, `G1 = Gamma(1/delta + 1)`.
pub fn sir_exceedance(k: f64, alpha: f64) -> Result<f64> {
    let form = SirCcdfForm::standard(alpha)?;
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::invalid("k", format!("must be >= 0, got {k}")));
    }
    let delta = form.delta;
    let g1 = gamma(1.0 / delta + 1.0)?;
    let g2 = gamma(alpha + 1.0)?;
    let spread = g2 - g1 * g1;
    debug_assert!(spread >= 0.0, "Gamma(alpha + 1) >= Gamma(alpha/2 + 1)^2");
    Ok((-(g1 + k * spread.max(0.0).sqrt()).powf(delta)).exp())
}

/// Skewness of the SIR; a function of `alpha` alone. `+inf` on overflow.
pub fn sir_skewness(alpha: f64) -> Result<f64> {
    Ok(SirCcdfForm::standard(alpha)?.skewness())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(lambda: f64, p: f64, alpha: f64, r: f64) -> LinkParams {
        LinkParams::new(lambda, p, alpha, 1.0, r).unwrap()
    }

    #[test]
    fn moment_anchors() {
        let p = params(1.0, 0.1, 4.0, 1.0);
        let c = std::f64::consts::PI.powi(2) / 2.0 * 0.1;
        assert_relative_eq!(SirCcdfForm::from_params(&p).c, c, max_relative = 1e-13);
        assert_relative_eq!(sir_moment(1, &p).unwrap(), 2.0 / (c * c), max_relative = 1e-12);
        assert_relative_eq!(sir_moment(1, &p).unwrap(), 8.212_785_803_747_468, max_relative = 1e-12);
        assert_relative_eq!(sir_moment(2, &p).unwrap(), 24.0 / c.powi(4), max_relative = 1e-12);
        assert_relative_eq!(sir_moment(2, &p).unwrap(), 404.699_103_949_415_7, max_relative = 1e-12);
        assert!(sir_moment(0, &p).is_err());
    }

    #[test]
    fn moment_scaling_in_lambda() {
        for n in 1..=3 {
            let a = sir_moment(n, &params(1.0, 0.3, 3.0, 1.0)).unwrap();
            let b = sir_moment(n, &params(2.0, 0.3, 3.0, 1.0)).unwrap();
            assert_relative_eq!(a / b, 2f64.powf(n as f64 * 1.5), max_relative = 1e-12);
        }
    }

    #[test]
    fn moment_overflow_is_infinite() {
        let p = params(1e-3, 0.01, 60.0, 1.0);
        assert_eq!(sir_moment(50, &p).unwrap(), f64::INFINITY);
    }

    #[test]
    fn exceedance_anchor() {
        let v = sir_exceedance(0.0, 4.0).unwrap();
        assert_relative_eq!(v, (-(2f64).sqrt()).exp(), max_relative = 1e-12);
        assert_relative_eq!(v, 0.243117, max_relative = 1e-5);
    }

    #[test]
    fn exceedance_is_parameter_free() {
        for k in [0.0, 1.0, 2.5] {
            let closed = sir_exceedance(k, 3.0).unwrap();
            for (lambda, p, r) in [(1.0, 0.1, 1.0), (5.0, 0.9, 3.0)] {
                let via_ccdf = SirCcdfForm::from_params(&params(lambda, p, 3.0, r)).exceedance(k);
                assert_relative_eq!(via_ccdf, closed, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn exceedance_vanishes_with_alpha() {
        let v: Vec<f64> = [10.0, 20.0, 40.0]
            .iter()
            .map(|&a| sir_exceedance(0.0, a).unwrap())
            .collect();
        assert!(v[0] > v[1] && v[1] > v[2]);
    }

    #[test]
    fn exceedance_decreasing_in_k() {
        for alpha in [2.5, 4.0, 8.0] {
            let mut prev = 1.0;
            for i in 0..20 {
                let v = sir_exceedance(i as f64 * 0.25, alpha).unwrap();
                assert!(v < prev);
                prev = v;
            }
        }
    }

    #[test]
    fn skewness_properties() {
        let a = SirCcdfForm::from_params(&params(0.2, 0.4, 4.0, 1.0)).skewness();
        let b = SirCcdfForm::from_params(&params(7.0, 0.4, 4.0, 1.0)).skewness();
        assert_relative_eq!(a, b, max_relative = 1e-10);
        let s: Vec<f64> = [3.0, 4.0, 8.0].iter().map(|&a| sir_skewness(a).unwrap()).collect();
        assert!(s[0] < s[1] && s[1] < s[2] && s[0] > 0.0);
        assert!(sir_skewness(2.0).is_err());
    }
}
