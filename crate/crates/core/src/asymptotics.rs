//! Closed-form approximations of the exercise boundary close to expiry.
//!
//! All of them share the leading behaviour `E - rho ~ E sigma sqrt(tau)
//! sqrt(-ln tau)` except the integral formula's asymptote, which carries a full `-ln tau`
//! instead of its square root. Each formula stops being defined once its
//! logarithm changes sign; evaluating past that point is a domain error,
//! never a silently clamped value.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::MarketParams;

/// Which near-expiry formula to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AsymptoticMethod {
    /// First-order matched expansion, `sqrt(9 pi tau / 2)` inside the logarithm.
    Kk,
    /// Corrected expansion, `sqrt(2 pi tau)` inside the logarithm.
    Ekk,
    /// Lowest-order analytic solution of the integral equation for `eta`.
    SscAnalytic,
    /// Leading-order asymptote of the integral formula in [`crate::zhu`].
    ZhuAsymptote,
    /// Sixth-order expansion in `1/xi`, `xi = ln sqrt(8 pi r^2 tau / sigma^2)`.
    ChenChadam,
}

impl AsymptoticMethod {
    pub const ALL: [AsymptoticMethod; 5] = [
        AsymptoticMethod::Kk,
        AsymptoticMethod::Ekk,
        AsymptoticMethod::SscAnalytic,
        AsymptoticMethod::ZhuAsymptote,
        AsymptoticMethod::ChenChadam,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AsymptoticMethod::Kk => "kk",
            AsymptoticMethod::Ekk => "ekk",
            AsymptoticMethod::SscAnalytic => "ssc-a",
            AsymptoticMethod::ZhuAsymptote => "zhu-asymptote",
            AsymptoticMethod::ChenChadam => "chen-chadam",
        }
    }

    pub fn eval(self, tau: f64, p: &MarketParams) -> Result<f64> {
        match self {
            AsymptoticMethod::Kk => rho_kk(tau, p),
            AsymptoticMethod::Ekk => rho_ekk(tau, p),
            AsymptoticMethod::SscAnalytic => rho_ssc_analytic(tau, p),
            AsymptoticMethod::ZhuAsymptote => rho_zhu_asymptote(tau, p),
            AsymptoticMethod::ChenChadam => rho_chen_chadam(tau, p),
        }
    }
}

/// `Ok(true)` at expiry, where every formula reduces to the strike.
fn at_expiry(method: &'static str, tau: f64) -> Result<bool> {
    if tau == 0.0 {
        return Ok(true);
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Domain {
            method,
            tau,
            reason: "time to maturity must be positive".into(),
        });
    }
    Ok(false)
}

fn log_domain(method: &'static str, tau: f64, argument: f64) -> Error {
    Error::Domain {
        method,
        tau,
        reason: format!("log argument {argument} is not in (0, 1)"),
    }
}

fn in_range(method: &'static str, tau: f64, rho: f64, p: &MarketParams) -> Result<f64> {
    if rho > 0.0 && rho <= p.strike() {
        Ok(rho)
    } else {
        Err(Error::Domain {
            method,
            tau,
            reason: format!("value {rho} falls outside (0, E]"),
        })
    }
}

/// `E (1 - sigma sqrt(2 tau) sqrt(-ln[c sqrt(tau)]))`, shared by KK and EKK.
fn sqrt_log_formula(method: &'static str, tau: f64, p: &MarketParams, c: f64) -> Result<f64> {
    if at_expiry(method, tau)? {
        return Ok(p.strike());
    }
    let arg = c * tau.sqrt();
    if !(arg > 0.0 && arg < 1.0) {
        return Err(log_domain(method, tau, arg));
    }
    let rho = p.strike() * (1.0 - p.sigma() * (2.0 * tau).sqrt() * (-arg.ln()).sqrt());
    in_range(method, tau, rho, p)
}

/// `kk`: `E (1 - sigma sqrt(2 tau) sqrt(-ln[(2r/sigma) sqrt(9 pi tau / 2)]))`.
pub fn rho_kk(tau: f64, p: &MarketParams) -> Result<f64> {
    let c = 2.0 * p.r() / p.sigma() * (4.5 * PI).sqrt();
    sqrt_log_formula("kk", tau, p, c)
}

/// `ekk`: `E (1 - sigma sqrt(2 tau) sqrt(-ln[(2r/sigma) sqrt(2 pi tau)]))`.
pub fn rho_ekk(tau: f64, p: &MarketParams) -> Result<f64> {
    let c = 2.0 * p.r() / p.sigma() * (2.0 * PI).sqrt();
    sqrt_log_formula("ekk", tau, p, c)
}

/// Argument of the logarithm in the analytic auxiliary function,
/// `(2r/sigma) sqrt(2 pi tau) e^{r tau}`.
pub fn eta_log_argument(tau: f64, p: &MarketParams) -> f64 {
    2.0 * p.r() / p.sigma() * (2.0 * PI * tau).sqrt() * (p.r() * tau).exp()
}

/// Lowest-order auxiliary function `-sqrt(-ln[(2r/sigma) sqrt(2 pi tau) e^{r tau}])`.
/// Negative by construction; `-inf` at `tau = 0`.
pub fn eta_analytic(tau: f64, p: &MarketParams) -> Result<f64> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::Domain {
            method: "ssc-a",
            tau,
            reason: "time to maturity must be non-negative".into(),
        });
    }
    let arg = eta_log_argument(tau, p);
    if arg >= 1.0 {
        return Err(log_domain("ssc-a", tau, arg));
    }
    Ok(-(-arg.ln()).sqrt())
}

/// Boundary from an auxiliary value: `E exp(-(r - sigma^2/2) tau + sigma sqrt(2 tau) eta)`.
pub fn rho_from_eta(tau: f64, eta: f64, p: &MarketParams) -> f64 {
    let s = p.sigma();
    p.strike() * (-(p.r() - 0.5 * s * s) * tau + s * (2.0 * tau).sqrt() * eta).exp()
}

/// Lowest-order analytic solution of the integral equation for `eta`.
pub fn rho_ssc_analytic(tau: f64, p: &MarketParams) -> Result<f64> {
    if at_expiry("ssc-a", tau)? {
        return Ok(p.strike());
    }
    let eta = eta_analytic(tau, p)?;
    in_range("ssc-a", tau, rho_from_eta(tau, eta, p), p)
}

/// `E (1 - sigma/sqrt(2 pi) sqrt(tau) (-ln tau))`, valid for `0 < tau < 1`.
pub fn rho_zhu_asymptote(tau: f64, p: &MarketParams) -> Result<f64> {
    if at_expiry("zhu-asymptote", tau)? {
        return Ok(p.strike());
    }
    if tau >= 1.0 {
        return Err(Error::Domain {
            method: "zhu-asymptote",
            tau,
            reason: "requires tau < 1 so that -ln tau > 0".into(),
        });
    }
    let rho = p.strike() * (1.0 - p.sigma() / (2.0 * PI).sqrt() * tau.sqrt() * (-tau.ln()));
    in_range("zhu-asymptote", tau, rho, p)
}

/// Largest `xi` for which the sixth-order series is evaluated.
pub const CHEN_CHADAM_XI_CUTOFF: f64 = -1.0;

/// `xi = ln sqrt(8 pi r^2 tau / sigma^2)`.
pub fn chen_chadam_xi(tau: f64, p: &MarketParams) -> f64 {
    0.5 * (8.0 * PI * p.r() * p.r() * tau / (p.sigma() * p.sigma())).ln()
}

/// Sixth-order series `alpha(xi)`.
pub fn chen_chadam_alpha(xi: f64) -> f64 {
    let u = 1.0 / xi;
    // Horner in 1/xi for the correction terms
    let tail = u
        * (-0.5
            + u * (1.0 / 8.0
                + u * (17.0 / 24.0
                    + u * (-51.0 / 64.0 + u * (-287.0 / 120.0 + u * (199.0 / 32.0))))));
    -xi + tail
}

/// `E exp(-sigma sqrt(2 tau alpha))` with the sixth-order `alpha`.
pub fn rho_chen_chadam(tau: f64, p: &MarketParams) -> Result<f64> {
    rho_chen_chadam_with_cutoff(tau, p, CHEN_CHADAM_XI_CUTOFF)
}

/// As [`rho_chen_chadam`] with a caller-chosen `xi` cutoff.
pub fn rho_chen_chadam_with_cutoff(tau: f64, p: &MarketParams, xi_cutoff: f64) -> Result<f64> {
    const NAME: &str = "chen-chadam";
    if at_expiry(NAME, tau)? {
        return Ok(p.strike());
    }
    let xi = chen_chadam_xi(tau, p);
    if !(xi < xi_cutoff) {
        return Err(Error::Domain {
            method: NAME,
            tau,
            reason: format!("expansion variable xi = {xi} is not below {xi_cutoff}"),
        });
    }
    let alpha = chen_chadam_alpha(xi);
    if !(alpha > 0.0) {
        return Err(Error::Domain {
            method: NAME,
            tau,
            reason: format!("alpha = {alpha} is not positive"),
        });
    }
    let rho = p.strike() * (-p.sigma() * (2.0 * tau * alpha).sqrt()).exp();
    in_range(NAME, tau, rho, p)
}

/// `(E - rho) / (sqrt(tau) sqrt(-ln tau))`, which tends to `E sigma` for KK,
/// EKK and SSC-A.
pub fn sqrt_log_ratio(tau: f64, rho: f64, strike: f64) -> f64 {
    (strike - rho) / (tau.sqrt() * (-tau.ln()).sqrt())
}
