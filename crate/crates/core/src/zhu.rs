//! The closed-form integral boundary: the perpetual boundary plus a damped
//! semi-infinite integral over the kernels `f1*`, `f2*`.
//!
//! Convexity of the resulting curve hinges on `sin(f2*)` staying
//! non-negative, i.e. on `max_zeta f2*(zeta; gamma) <= pi`. The smallest
//! `gamma` for which that holds is [`gamma_critical`].

use std::f64::consts::PI;

use crate::asymptotics::rho_zhu_asymptote;
use crate::error::{Error, Result};
use crate::numerics::{find_root_bracketed, integrate_semi_infinite, maximize_golden};
use crate::params::{MarketParams, QuadratureConfig};

/// Below this time to maturity the integral is replaced by its asymptote.
pub const SMALL_TAU: f64 = 1e-6;

/// `(f1*(zeta), f2*(zeta))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZhuKernelValue {
    pub f1: f64,
    pub f2: f64,
}

/// Kernel functions for one value of `gamma = 2r/sigma^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZhuKernel {
    gamma: f64,
    a: f64,
    b: f64,
}

impl ZhuKernel {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        Ok(Self {
            gamma,
            a: 0.5 * (1.0 + gamma),
            b: 0.5 * (1.0 - gamma),
        })
    }

    pub fn from_params(p: &MarketParams) -> Self {
        Self::new(p.gamma()).expect("market parameters give a positive gamma")
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Both kernels at `zeta >= 0`. Singular only when `gamma = 1` and `zeta = 0`.
    pub fn eval(&self, zeta: f64) -> Result<ZhuKernelValue> {
        if !(zeta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "kernel argument must be non-negative, got {zeta}"
            )));
        }
        let denom = self.b * self.b + zeta * zeta;
        if denom == 0.0 {
            return Err(Error::InvalidParameter(
                "kernel is singular at zeta = 0 when gamma = 1".into(),
            ));
        }
        let (log_term, angle) = self.log_and_angle(zeta);
        Ok(ZhuKernelValue {
            f1: (self.b * log_term + zeta * angle) / denom,
            f2: (zeta * log_term - self.b * angle) / denom,
        })
    }

    /// `f2*` alone; `NaN` at the singular point.
    pub fn f2(&self, zeta: f64) -> f64 {
        let (log_term, angle) = self.log_and_angle(zeta);
        (zeta * log_term - self.b * angle) / (self.b * self.b + zeta * zeta)
    }

    fn log_and_angle(&self, zeta: f64) -> (f64, f64) {
        (
            (self.a.hypot(zeta) / self.gamma).ln(),
            (zeta / self.a).atan(),
        )
    }

    /// `e^{-f1*} sin(f2*)`; the factor multiplying every Zhu integrand.
    /// Zero at `zeta = 0`, where the integrands carry an explicit `zeta`.
    fn damped_sine(&self, zeta: f64) -> f64 {
        if zeta == 0.0 {
            return 0.0;
        }
        let (log_term, angle) = self.log_and_angle(zeta);
        let denom = self.b * self.b + zeta * zeta;
        let f1 = (self.b * log_term + zeta * angle) / denom;
        let f2 = (zeta * log_term - self.b * angle) / denom;
        (-f1).exp() * f2.sin()
    }
}

/// Boundary value and how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZhuEstimate {
    pub rho: f64,
    /// Set when `tau < SMALL_TAU` and the asymptote stood in for the integral.
    pub used_asymptote: bool,
    pub tail_bound: f64,
}

fn truncation_for(tau: f64, p: &MarketParams, cfg: &QuadratureConfig, scale: f64) -> f64 {
    cfg.semi_inf_truncation.max(scale / (p.sigma() * tau.sqrt()))
}

/// Integral-formula boundary at time to maturity `tau`.
pub fn rho_zhu(tau: f64, p: &MarketParams, cfg: &QuadratureConfig) -> Result<f64> {
    rho_zhu_estimate(tau, p, cfg).map(|e| e.rho)
}

/// [`rho_zhu`] with the bookkeeping of how the value was produced.
pub fn rho_zhu_estimate(tau: f64, p: &MarketParams, cfg: &QuadratureConfig) -> Result<ZhuEstimate> {
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::Domain {
            method: "zhu",
            tau,
            reason: "time to maturity must be non-negative".into(),
        });
    }
    if tau == 0.0 {
        return Ok(ZhuEstimate {
            rho: p.strike(),
            used_asymptote: false,
            tail_bound: 0.0,
        });
    }
    if tau.is_infinite() {
        return Ok(ZhuEstimate {
            rho: p.perpetual_boundary(),
            used_asymptote: false,
            tail_bound: 0.0,
        });
    }
    if tau < SMALL_TAU {
        return Ok(ZhuEstimate {
            rho: rho_zhu_asymptote(tau, p)?,
            used_asymptote: true,
            tail_bound: 0.0,
        });
    }
    let z = truncation_for(tau, p, cfg, 8.0);
    rho_zhu_truncated(tau, p, &cfg.with_truncation(z))
}

/// The integral evaluated with exactly `cfg.semi_inf_truncation` as the
/// upper limit (no small-tau substitution, no automatic widening).
pub fn rho_zhu_truncated(tau: f64, p: &MarketParams, cfg: &QuadratureConfig) -> Result<ZhuEstimate> {
    let kernel = ZhuKernel::from_params(p);
    let a2 = p.a() * p.a();
    let half_var = 0.5 * tau * p.sigma() * p.sigma();
    let integrand = |zeta: f64| {
        let q = a2 + zeta * zeta;
        zeta * (-half_var * q).exp() / q * kernel.damped_sine(zeta)
    };
    let integral = integrate_semi_infinite(integrand, cfg)?;
    Ok(ZhuEstimate {
        rho: p.perpetual_boundary() + 2.0 * p.strike() / PI * integral.value,
        used_asymptote: false,
        tail_bound: integral.tail_bound,
    })
}

/// Second derivative of the integral-formula boundary in `tau`.
pub fn zhu_second_derivative(tau: f64, p: &MarketParams, cfg: &QuadratureConfig) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Domain {
            method: "zhu",
            tau,
            reason: "second derivative needs a positive finite tau".into(),
        });
    }
    let kernel = ZhuKernel::from_params(p);
    let a2 = p.a() * p.a();
    let s2 = p.sigma() * p.sigma();
    let half_var = 0.5 * tau * s2;
    let integrand = |zeta: f64| {
        let q = a2 + zeta * zeta;
        q * zeta * (-half_var * q).exp() * kernel.damped_sine(zeta)
    };
    let z = truncation_for(tau, p, cfg, 10.0);
    let integral = integrate_semi_infinite(integrand, &cfg.with_truncation(z))?;
    Ok(2.0 * p.strike() * s2 * s2 / (4.0 * PI) * integral.value)
}

/// Location and value of `max_zeta f2*(zeta; gamma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F2Peak {
    pub zeta: f64,
    pub value: f64,
}

const SCAN_POINTS: usize = 512;
const SCAN_LO: f64 = 1e-6;
const SCAN_HI: f64 = 1e6;

/// Peak of `f2*(.; gamma)`: a 512-point log scan of `[1e-6, 1e6]` followed
/// by golden-section refinement around the best scan point.
pub fn f2_peak(gamma: f64) -> Result<F2Peak> {
    let kernel = ZhuKernel::new(gamma)?;
    let ratio = (SCAN_HI / SCAN_LO).ln() / (SCAN_POINTS - 1) as f64;
    let node = |i: usize| SCAN_LO * (ratio * i as f64).exp();
    let (best, _) = (0..SCAN_POINTS)
        .map(|i| (i, kernel.f2(node(i))))
        .filter(|(_, v)| v.is_finite())
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let lo = node(best.saturating_sub(1));
    let hi = node((best + 1).min(SCAN_POINTS - 1));
    // search in log zeta so the bracket width is scale free
    let (log_zeta, value) = maximize_golden(
        |t| kernel.f2(t.exp()),
        lo.ln(),
        hi.ln(),
        1e-12,
        500,
    );
    Ok(F2Peak {
        zeta: log_zeta.exp(),
        value,
    })
}

/// `G(gamma) = max_{zeta > 0} f2*(zeta; gamma)`.
pub fn f2_max(gamma: f64) -> Result<f64> {
    f2_peak(gamma).map(|p| p.value)
}

/// Smallest `gamma` with `max f2* <= pi`, i.e. the root of `G(gamma) = pi`.
pub fn gamma_critical(cfg: &QuadratureConfig) -> Result<f64> {
    let excess = |g: f64| f2_max(g).map(|v| v - PI).unwrap_or(f64::NAN);
    let (lo, hi) = (1e-4f64, 1.0f64);
    let steps = 40;
    let node = |i: usize| lo * (hi / lo).powf(i as f64 / steps as f64);
    let mut prev = (node(0), excess(node(0)));
    for i in 1..=steps {
        let cur = (node(i), excess(node(i)));
        if prev.1 > 0.0 && cur.1 <= 0.0 {
            return find_root_bracketed(excess, prev.0, cur.0, cfg);
        }
        prev = cur;
    }
    Err(Error::NoSignChange { lo, hi })
}
