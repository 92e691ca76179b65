//! Numerical kernels shared by every method: the normal CDF, composite
//! Newton–Cotes quadrature (finite and truncated semi-infinite), bracketed
//! root finding, golden-section maximisation and piecewise-linear lookup.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::params::{QuadratureConfig, TauGrid};

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Composite closed 5-point Newton–Cotes (Boole) rule on `[a, b]` with
/// `cfg.finite_subintervals` panels. Exact for quintics.
pub fn integrate_newton_cotes<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !(a <= b) {
        return Err(Error::InvalidParameter(format!(
            "integration limits out of order: [{a}, {b}]"
        )));
    }
    boole(&f, a, b, cfg.finite_subintervals)
}

/// Boole rule with `panels` subintervals (a multiple of 4); `a <= b` assumed.
pub(crate) fn boole<F>(f: &F, a: f64, b: f64, panels: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    debug_assert!(panels >= 4 && panels.is_multiple_of(4));
    if a == b {
        return Ok(0.0);
    }
    let h = (b - a) / panels as f64;
    let eval = |i: usize| -> Result<f64> {
        let x = if i == panels { b } else { a + h * i as f64 };
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::QuadratureNode { abscissa: x })
        }
    };
    let mut sum = 7.0 * eval(0)?;
    for i in 1..panels {
        let w = match i % 4 {
            0 => 14.0,
            2 => 12.0,
            _ => 32.0,
        };
        sum += w * eval(i)?;
    }
    sum += 7.0 * eval(panels)?;
    Ok(sum * 2.0 * h / 45.0)
}

/// Value of a truncated semi-infinite integral together with the tail
/// estimate it was accepted against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiInfiniteIntegral {
    pub value: f64,
    pub tail_bound: f64,
    pub truncation: f64,
}

const TAIL_PANELS: usize = 64;

/// `int_0^inf f` truncated at `Z = cfg.semi_inf_truncation`.
///
/// `[0, Z]` is cut into `[0, 1], [1, 2], [2, 4], ...` and each piece gets
/// `cfg.finite_subintervals` Boole panels, so integrands with structure near
/// the origin and a long slowly decaying body are both resolved. The tail is
/// estimated as `2 int_Z^{2Z} |f|`; the result is rejected unless that bound
/// is below `10 root_tol`.
pub fn integrate_semi_infinite<F>(f: F, cfg: &QuadratureConfig) -> Result<SemiInfiniteIntegral>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    let z = cfg.semi_inf_truncation;
    let mut value = 0.0;
    let mut lo = 0.0;
    let mut hi = z.min(1.0);
    loop {
        value += boole(&f, lo, hi, cfg.finite_subintervals)?;
        if hi >= z {
            break;
        }
        lo = hi;
        hi = (2.0 * hi).min(z);
    }
    let tail_bound = 2.0 * boole(&|x: f64| f(x).abs(), z, 2.0 * z, TAIL_PANELS)?;
    let limit = 10.0 * cfg.root_tol;
    if !(tail_bound < limit) {
        return Err(Error::TailTooHeavy {
            bound: tail_bound,
            limit,
        });
    }
    Ok(SemiInfiniteIntegral {
        value,
        tail_bound,
        truncation: z,
    })
}

/// Bisection on a sign-changing bracket, stopped once the bracket is
/// narrower than `cfg.root_tol`. Infinite residuals are accepted and only
/// their sign is used.
pub fn find_root_bracketed<G>(g: G, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    cfg.validate()?;
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut glo = g(lo);
    let ghi = g(hi);
    if glo.is_nan() || ghi.is_nan() || glo.signum() * ghi.signum() > 0.0 && glo != 0.0 && ghi != 0.0
    {
        return Err(Error::NoSignChange { lo, hi });
    }
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    for _ in 0..cfg.max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo < cfg.root_tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let gm = g(mid);
        if gm.is_nan() {
            return Err(Error::InvalidParameter(format!("residual is NaN at {mid}")));
        }
        if gm == 0.0 {
            return Ok(mid);
        }
        if (gm > 0.0) == (glo > 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Err(Error::MaxIterations {
        iterations: cfg.max_iter,
    })
}

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`.
/// Returns `(argmax, max)`.
pub fn maximize_golden<F>(f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (b - a).abs() < tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Piecewise-linear interpolation of `values` over `grid`; exact at nodes.
pub fn interp_linear(grid: &TauGrid, values: &[f64], tau: f64) -> Result<f64> {
    let taus = grid.taus();
    if values.len() != taus.len() {
        return Err(Error::InvalidParameter(format!(
            "{} values for {} nodes",
            values.len(),
            taus.len()
        )));
    }
    let last = taus.len() - 1;
    if !(tau >= 0.0 && tau <= taus[last]) {
        return Err(Error::OutOfRange {
            tau,
            max: taus[last],
        });
    }
    if tau == taus[last] {
        return Ok(values[last]);
    }
    // first node strictly greater than tau; tau sits in [taus[i-1], taus[i])
    let i = taus.partition_point(|&t| t <= tau);
    Ok(lerp(taus[i - 1], values[i - 1], taus[i], values[i], tau))
}

#[inline]
pub(crate) fn lerp(x0: f64, y0: f64, x1: f64, y1: f64, x: f64) -> f64 {
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}
