//! What a boundary error costs: the European floor, the price gap between
//! holding to the true boundary and to an approximate one, and the two
//! relative error measures built from them.
//!
//! Both gap formulas integrate over `xi` in `[0, tau]` and have an
//! `1/sqrt(tau - xi)` scale at the upper end; they are computed in
//! `s = sqrt(tau - xi)`, which makes the integrand bounded and zero at `s = 0`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{boole, norm_cdf, norm_pdf};
use crate::params::{BoundaryCurve, MarketParams, QuadratureConfig};

/// Black–Scholes European put; the payoff at `tau = 0`.
pub fn european_put(s: f64, tau: f64, p: &MarketParams) -> f64 {
    let e = p.strike();
    if tau <= 0.0 {
        return (e - s).max(0.0);
    }
    let vol = p.sigma() * tau.sqrt();
    let d1 = ((s / e).ln() + (p.r() + 0.5 * p.sigma() * p.sigma()) * tau) / vol;
    let d2 = d1 - vol;
    e * (-p.r() * tau).exp() * norm_cdf(-d2) - s * norm_cdf(-d1)
}

/// Constants of the transform that turns the barrier-option price
/// difference into a heat-kernel integral. They are the negatives of the
/// finite-difference transform's `(alpha, beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceTransformConsts {
    pub alpha_p: f64,
    pub beta_p: f64,
}

impl PriceTransformConsts {
    pub fn new(p: &MarketParams) -> Self {
        let (r, s2) = (p.r(), p.sigma() * p.sigma());
        Self {
            alpha_p: 0.5 - r / s2,
            beta_p: -0.5 * r - r * r / (2.0 * s2) - s2 / 8.0,
        }
    }
}

/// Heat kernel `G(x, tau) = exp(-x^2 / (2 sigma^2 tau)) / sqrt(2 pi sigma^2 tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenKernel {
    pub sigma: f64,
}

impl GreenKernel {
    pub fn new(p: &MarketParams) -> Self {
        Self { sigma: p.sigma() }
    }

    pub fn eval(&self, x: f64, tau: f64) -> f64 {
        let v = self.sigma * self.sigma * tau;
        (-x * x / (2.0 * v)).exp() / (2.0 * PI * v).sqrt()
    }
}

fn check_covers(curve: &BoundaryCurve, tau: f64) -> Result<()> {
    if !(tau >= 0.0 && tau <= curve.maturity()) {
        return Err(Error::OutOfRange {
            tau,
            max: curve.maturity(),
        });
    }
    Ok(())
}

/// Breakpoints in `s = sqrt(tau - xi)` at every curve node below `tau`,
/// ascending from `0` to `sqrt(tau)`.
fn s_breaks(curves: [&BoundaryCurve; 2], tau: f64) -> Vec<f64> {
    let mut out: Vec<f64> = curves
        .iter()
        .flat_map(|c| c.taus().iter().copied())
        .filter(|&t| t < tau)
        .map(|t| (tau - t).sqrt())
        .collect();
    out.push(0.0);
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Piecewise Boole rule over `breaks`, splitting `cfg.finite_subintervals`
/// across the pieces with at least 16 panels each.
fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], cfg: &QuadratureConfig) -> Result<f64> {
    let pieces = breaks.len() - 1;
    let panels = (cfg.finite_subintervals / pieces.max(1)).max(16).div_ceil(4) * 4;
    breaks
        .windows(2)
        .map(|w| boole(&f, w[0], w[1], panels))
        .sum()
}

/// `rE int_0^tau e^{-r(tau-xi)} |N(gamma~) - N(gamma)| dxi`: the price gap at the
/// true boundary between the American put and the down-and-out put whose
/// barrier is `rho_app`.
pub fn price_gap_at_boundary(
    rho: &BoundaryCurve,
    rho_app: &BoundaryCurve,
    tau: f64,
    p: &MarketParams,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    check_covers(rho, tau)?;
    check_covers(rho_app, tau)?;
    if tau == 0.0 {
        return Ok(0.0);
    }
    let (r, sigma) = (p.r(), p.sigma());
    let drift = r - 0.5 * sigma * sigma;
    let here = rho.eval(tau)?;
    let integrand = |s: f64| {
        if s == 0.0 {
            return 0.0;
        }
        let d = s * s;
        let xi = (tau - d).max(0.0);
        let (true_b, app_b) = match (rho.eval(xi), rho_app.eval(xi)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return f64::NAN,
        };
        let vol = sigma * s;
        let gamma_app = ((here / app_b).ln() + drift * d) / vol;
        let gamma = ((here / true_b).ln() + drift * d) / vol;
        2.0 * s * (-r * d).exp() * (norm_cdf(gamma_app) - norm_cdf(gamma)).abs()
    };
    let v = integrate_pieces(integrand, &s_breaks([rho, rho_app], tau), cfg)?;
    Ok(r * p.strike() * v)
}

/// The same price gap at any spot, from the heat-kernel double integral
///
/// ```text
/// rE int_0^tau | int_{ln(rho_app(xi)/E)}^{ln(rho(xi)/E)} G(x - y, tau - xi) e^{alpha_p (x - y) + beta_p (tau - xi)} dy | dxi
/// ```
///
/// with `x = ln(S/E)` and both integrals done numerically. At
/// `spot = rho(tau)` it reproduces [`price_gap_at_boundary`].
pub fn price_gap_full(
    rho: &BoundaryCurve,
    rho_app: &BoundaryCurve,
    spot: f64,
    tau: f64,
    p: &MarketParams,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    check_covers(rho, tau)?;
    check_covers(rho_app, tau)?;
    if !(spot > 0.0 && spot.is_finite()) {
        return Err(Error::InvalidParameter(format!("spot must be positive, got {spot}")));
    }
    if tau == 0.0 {
        return Ok(0.0);
    }
    let e = p.strike();
    let x = (spot / e).ln();
    let c = PriceTransformConsts::new(p);
    let sigma = p.sigma();
    let inner_panels = cfg.finite_subintervals;
    // outer variable s = sqrt(tau - xi); inner y -> z = (x - y) / (sigma s),
    // under which G dy becomes the standard normal density
    let integrand = |s: f64| -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        let d = s * s;
        let xi = (tau - d).max(0.0);
        let (true_b, app_b) = match (rho.eval(xi), rho_app.eval(xi)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return f64::NAN,
        };
        let vol = sigma * s;
        let z_of = |y: f64| ((x - y) / vol).clamp(-12.0, 12.0);
        let (za, zb) = (z_of((true_b / e).ln()), z_of((app_b / e).ln()));
        if za == zb {
            return 0.0;
        }
        let kernel = |z: f64| norm_pdf(z) * (c.alpha_p * vol * z + c.beta_p * d).exp();
        match boole(&kernel, za, zb, inner_panels) {
            Ok(v) => 2.0 * s * v.abs(),
            Err(_) => f64::NAN,
        }
    };
    let v = integrate_pieces(integrand, &s_breaks([rho, rho_app], tau), cfg)?;
    Ok(p.r() * e * v)
}

/// Relative mispricing `(V_am - V_app) / (V_am - V_eu)` at the true boundary,
/// where `V_am = E - rho(tau)` there.
pub fn mispricing_err(
    rho: &BoundaryCurve,
    rho_app: &BoundaryCurve,
    tau: f64,
    p: &MarketParams,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let b = rho.eval(tau)?;
    let premium = p.strike() - b - european_put(b, tau, p);
    if !(premium > 1e-14 * p.strike()) {
        return Err(Error::DegenerateDenominator {
            tau,
            value: premium,
        });
    }
    Ok(price_gap_at_boundary(rho, rho_app, tau, p, cfg)? / premium)
}

/// Signed relative boundary error `(rho - rho_app) / rho` at `tau`.
pub fn boundary_rel_err(rho: &BoundaryCurve, rho_app: &BoundaryCurve, tau: f64) -> Result<f64> {
    let b = rho.eval(tau)?;
    Ok((b - rho_app.eval(tau)?) / b)
}

/// Unsigned relative deviation `|value - benchmark| / benchmark`.
pub fn relative_deviation(value: f64, benchmark: f64) -> f64 {
    (value - benchmark).abs() / benchmark
}
