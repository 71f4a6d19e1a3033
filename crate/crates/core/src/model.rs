//! Link and network parameters, and the quantities derived from them.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special::gamma;

/// Default upper bound on the path-loss exponent.
///
/// Beyond this the single-slot success law `exp(-c theta^delta)` is flat to
/// machine precision and the analytic formulas stop being informative.
pub const DEFAULT_ALPHA_CAP: f64 = 64.0;

/// Interferer field, access and link geometry.
///
/// Constructed through [`LinkParams::new`], which validates every field, so
/// downstream code may assume a valid parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    lambda: f64,
    p: f64,
    alpha: f64,
    theta: f64,
    r: f64,
}

/// Computed view of a [`LinkParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derived {
    /// `2 / alpha`
    pub delta: f64,
    /// Spatial contention `lambda pi r^2 theta^delta Gamma(1 + delta) Gamma(1 - delta)`.
    pub contention: f64,
    /// Temporal interference correlation coefficient `p / 2`.
    pub rho: f64,
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

impl LinkParams {
    /// * `lambda` - interferer intensity (nodes per unit area)
    /// * `p` - per-slot transmit probability, `0 < p <= 1`
    /// * `alpha` - path-loss exponent, `2 < alpha <= 64`
    /// * `theta` - SIR threshold (linear)
    /// * `r` - link distance
    pub fn new(lambda: f64, p: f64, alpha: f64, theta: f64, r: f64) -> Result<Self> {
        Self::with_alpha_cap(lambda, p, alpha, theta, r, DEFAULT_ALPHA_CAP)
    }

    pub fn with_alpha_cap(
        lambda: f64,
        p: f64,
        alpha: f64,
        theta: f64,
        r: f64,
        alpha_cap: f64,
    ) -> Result<Self> {
        let lambda = positive("lambda", lambda)?;
        let p = positive("p", p)?;
        if p > 1.0 {
            return Err(Error::invalid("p", format!("must be <= 1, got {p}")));
        }
        if !(alpha.is_finite() && alpha > 2.0) {
            return Err(Error::invalid("alpha", format!("must be > 2, got {alpha}")));
        }
        if alpha > alpha_cap {
            return Err(Error::invalid(
                "alpha",
                format!("must be <= {alpha_cap}, got {alpha}"),
            ));
        }
        let theta = positive("theta", theta)?;
        let r = positive("r", r)?;
        Ok(Self {
            lambda,
            p,
            alpha,
            theta,
            r,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(lambda, self.p, self.alpha, self.theta, self.r)
    }
    pub fn with_p(&self, p: f64) -> Result<Self> {
        Self::new(self.lambda, p, self.alpha, self.theta, self.r)
    }
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.lambda, self.p, alpha, self.theta, self.r)
    }
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.lambda, self.p, self.alpha, theta, self.r)
    }

    pub fn derived(&self) -> Derived {
        Derived {
            delta: delta_exponent(self),
            contention: spatial_contention(self),
            rho: correlation_coefficient(self),
        }
    }
}

pub fn delta_exponent(params: &LinkParams) -> f64 {
    2.0 / params.alpha
}

/// `Gamma(1 + delta) Gamma(1 - delta)`, i.e. `pi delta / sin(pi delta)`.
pub(crate) fn gamma_product(delta: f64) -> f64 {
    // delta in (0, 1) by construction, away from every pole
    gamma(1.0 + delta).expect("1 + delta is positive")
        * gamma(1.0 - delta).expect("1 - delta is positive")
}

/// Spatial contention `lambda pi r^2 theta^delta Gamma(1 + delta) Gamma(1 - delta)`.
///
/// Single-slot success is `exp(-contention * p)`.
pub fn spatial_contention(params: &LinkParams) -> f64 {
    let delta = delta_exponent(params);
    params.lambda * PI * params.r * params.r * params.theta.powf(delta) * gamma_product(delta)
}

pub fn correlation_coefficient(params: &LinkParams) -> f64 {
    params.p / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(lambda: f64, p: f64, alpha: f64, theta: f64, r: f64) -> LinkParams {
        LinkParams::new(lambda, p, alpha, theta, r).unwrap()
    }

    #[test]
    fn delta_values() {
        assert_eq!(delta_exponent(&params(1.0, 0.1, 4.0, 1.0, 1.0)), 0.5);
        assert_relative_eq!(delta_exponent(&params(1.0, 0.1, 3.0, 1.0, 1.0)), 2.0 / 3.0);
        assert_eq!(delta_exponent(&params(1.0, 0.1, 2.5, 1.0, 1.0)), 0.8);
    }

    #[test]
    fn contention_anchors() {
        let c = spatial_contention(&params(1.0, 0.1, 4.0, 1.0, 1.0));
        assert_relative_eq!(c, PI * PI / 2.0, max_relative = 1e-13);
        let c2 = spatial_contention(&params(2.0, 0.1, 4.0, 1.0, 1.0));
        assert_relative_eq!(c2, PI * PI, max_relative = 1e-13);
        // alpha = 3: pi * (2 pi / 3) / sin(2 pi / 3)
        let d = 2.0 / 3.0;
        let c3 = spatial_contention(&params(1.0, 0.1, 3.0, 1.0, 1.0));
        assert_relative_eq!(c3, PI * PI * d / (PI * d).sin(), max_relative = 1e-12);
        assert_relative_eq!(c3, 7.5977, max_relative = 1e-4);
    }

    #[test]
    fn contention_scaling() {
        let base = params(0.3, 0.2, 3.5, 0.7, 1.3);
        let c = spatial_contention(&base);
        let delta = delta_exponent(&base);
        for factor in [0.5, 2.0, 7.0] {
            let scaled = base.with_theta(0.7 * factor).unwrap();
            assert_relative_eq!(
                spatial_contention(&scaled) / c,
                factor.powf(delta),
                max_relative = 1e-12
            );
            let denser = base.with_lambda(0.3 * factor).unwrap();
            assert_relative_eq!(spatial_contention(&denser) / c, factor, max_relative = 1e-12);
        }
        let far = params(0.3, 0.2, 3.5, 0.7, 2.6);
        assert_relative_eq!(spatial_contention(&far) / c, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn contention_diverges_towards_alpha_two() {
        let c: Vec<f64> = [2.1, 2.05, 2.01]
            .iter()
            .map(|&a| spatial_contention(&params(1.0, 0.1, a, 1.0, 1.0)))
            .collect();
        assert!(c[0] < c[1] && c[1] < c[2]);
        assert!(c[2] > 100.0);
    }

    #[test]
    fn correlation() {
        assert_eq!(correlation_coefficient(&params(1.0, 0.5, 4.0, 1.0, 1.0)), 0.25);
        assert_eq!(correlation_coefficient(&params(1.0, 1.0, 4.0, 1.0, 1.0)), 0.5);
        assert_eq!(correlation_coefficient(&params(1.0, 0.02, 4.0, 1.0, 1.0)), 0.01);
    }

    #[test]
    fn validation() {
        assert!(LinkParams::new(0.0, 0.1, 4.0, 1.0, 1.0).is_err());
        assert!(LinkParams::new(1.0, 0.0, 4.0, 1.0, 1.0).is_err());
        assert!(LinkParams::new(1.0, 1.1, 4.0, 1.0, 1.0).is_err());
        assert!(LinkParams::new(1.0, 0.1, 2.0, 1.0, 1.0).is_err());
        assert!(LinkParams::new(1.0, 0.1, 65.0, 1.0, 1.0).is_err());
        assert!(LinkParams::with_alpha_cap(1.0, 0.1, 65.0, 1.0, 1.0, 100.0).is_ok());
        assert!(LinkParams::new(1.0, 0.1, 4.0, -1.0, 1.0).is_err());
        assert!(LinkParams::new(1.0, 0.1, 4.0, 1.0, f64::NAN).is_err());
        let d = params(1.0, 0.1, 4.0, 1.0, 1.0).derived();
        assert!(d.contention > 0.0 && d.rho > 0.0 && d.rho <= 0.5);
    }
}
