//! Local iterative solver for the nonlinear integral equation of the
//! auxiliary function `eta`, where
//!
//! ```text
//! rho(tau) = E exp(-(r - sigma^2/2) tau + sigma sqrt(2 tau) eta(tau))
//! eta(tau) = -sqrt(-ln[(r sqrt(2 pi tau) / sigma) e^{r tau} (1 - F(tau) / sqrt(pi))])
//! ```
//!
//! `F(tau)` only looks at `eta` on `[0, tau]`, so the unknowns can be found
//! one mesh node at a time: each node is a scalar root solve against the
//! already computed history. Below the first node the history is the
//! lowest-order analytic `eta`; between nodes it is linear.

use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::asymptotics::{eta_analytic, eta_log_argument, rho_from_eta};
use crate::error::{Error, Result};
use crate::numerics::{find_root_bracketed, integrate_newton_cotes, lerp};
use crate::params::{BoundaryCurve, MarketParams, QuadratureConfig, TauGrid};

/// Spacing of the tau mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeshKind {
    /// `tau_i = (i/m) T`.
    Uniform,
    /// `tau_i = (i/m)^2 T`.
    #[default]
    Quadratic,
}

impl MeshKind {
    pub fn grid(self, maturity: f64, m: usize) -> Result<TauGrid> {
        match self {
            MeshKind::Uniform => TauGrid::uniform(maturity, m),
            MeshKind::Quadratic => TauGrid::quadratic(maturity, m),
        }
    }
}

/// Default node count: 100 up to one year, 200 up to five, 40 per year beyond.
pub fn default_mesh_nodes(maturity: f64) -> usize {
    if maturity <= 1.0 {
        100
    } else if maturity <= 5.0 {
        200
    } else {
        (40.0 * maturity).ceil() as usize
    }
}

/// Computed values `eta_1, ..., eta_k` at `tau_1 < ... < tau_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaPath {
    params: MarketParams,
    taus: Vec<f64>,
    etas: Vec<f64>,
}

impl EtaPath {
    pub fn new(params: MarketParams) -> Self {
        Self {
            params,
            taus: Vec::new(),
            etas: Vec::new(),
        }
    }

    pub fn params(&self) -> &MarketParams {
        &self.params
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// Append the next node. `tau` must exceed the last node and `eta` be negative.
    pub fn push(&mut self, tau: f64, eta: f64) -> Result<()> {
        if let Some(&last) = self.taus.last() {
            if !(tau > last) {
                return Err(Error::Mesh(format!("node {tau} does not follow {last}")));
            }
        } else if !(tau > 0.0) {
            return Err(Error::Mesh(format!("first node must be positive, got {tau}")));
        }
        if !(eta < 0.0) {
            return Err(Error::InvalidParameter(format!("eta must be negative, got {eta}")));
        }
        self.taus.push(tau);
        self.etas.push(eta);
        Ok(())
    }

    /// The first `k` nodes.
    pub fn truncated(&self, k: usize) -> EtaPath {
        let k = k.min(self.len());
        EtaPath {
            params: self.params,
            taus: self.taus[..k].to_vec(),
            etas: self.etas[..k].to_vec(),
        }
    }

    /// `eta` at `tau`: analytic below the first node, linear between nodes.
    pub fn eval(&self, tau: f64) -> Result<f64> {
        match self.taus.last() {
            Some(&last) if tau > last => Err(Error::OutOfRange { tau, max: last }),
            _ if tau < 0.0 => Err(Error::OutOfRange {
                tau,
                max: self.taus.last().copied().unwrap_or(0.0),
            }),
            Some(_) if tau >= self.taus[0] => Ok(self.interior(tau)),
            _ => eta_analytic(tau, &self.params),
        }
    }

    /// `eta` at `tau <= tip_tau`, with `(tip_tau, tip_eta)` treated as the
    /// next node after the stored ones.
    fn eval_with_tip(&self, tau: f64, tip_tau: f64, tip_eta: f64) -> f64 {
        let first = self.taus.first().copied().unwrap_or(tip_tau);
        if tau < first {
            let arg = eta_log_argument(tau, &self.params);
            return -(-arg.ln()).sqrt();
        }
        match self.taus.last() {
            None => tip_eta,
            Some(&last) if tau >= last => {
                lerp(last, self.etas[self.len() - 1], tip_tau, tip_eta, tau)
            }
            Some(_) => self.interior(tau),
        }
    }

    fn interior(&self, tau: f64) -> f64 {
        let last = self.len() - 1;
        if tau >= self.taus[last] {
            return self.etas[last];
        }
        let i = self.taus.partition_point(|&t| t <= tau);
        lerp(
            self.taus[i - 1],
            self.etas[i - 1],
            self.taus[i],
            self.etas[i],
            tau,
        )
    }
}

/// `G(theta) = [eta_i - eta(tau_i sin^2 theta) sin theta] / cos theta`, where
/// the history is `path` extended by the candidate `(tau_i, eta_i)`.
pub fn g_eval(path: &EtaPath, eta_i: f64, tau_i: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let history = if s == 0.0 {
        0.0
    } else {
        path.eval_with_tip(tau_i * s * s, tau_i, eta_i) * s
    };
    (eta_i - history) / c
}

/// Last abscissa actually evaluated in the theta integral; the integrand is
/// `0/0` at `pi/2` and takes its value from here instead.
fn theta_end(cfg: &QuadratureConfig) -> f64 {
    FRAC_PI_2 - FRAC_PI_2 / (10.0 * cfg.finite_subintervals as f64)
}

/// `F(tau_i) = 2 int_0^{pi/2} exp(-r tau_i cos^2 - G^2) [sigma sqrt(tau_i/2) sin + G tan] dtheta`.
pub fn big_f_eval(
    path: &EtaPath,
    eta_i: f64,
    tau_i: f64,
    p: &MarketParams,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(tau_i > 0.0) {
        return Err(Error::Domain {
            method: "ssch",
            tau: tau_i,
            reason: "F needs a positive time to maturity".into(),
        });
    }
    let end = theta_end(cfg);
    let drift = p.sigma() * (0.5 * tau_i).sqrt();
    let r_tau = p.r() * tau_i;
    let integrand = |theta: f64| {
        let theta = theta.min(end);
        let (s, c) = theta.sin_cos();
        let g = g_eval(path, eta_i, tau_i, theta);
        (-r_tau * c * c - g * g).exp() * (drift * s + g * s / c)
    };
    Ok(2.0 * integrate_newton_cotes(integrand, 0.0, FRAC_PI_2, cfg)?)
}

/// Argument of the logarithm in the fixed-point equation for `eta_i`.
fn log_argument(f: f64, tau_i: f64, p: &MarketParams) -> f64 {
    p.r() * (2.0 * PI * tau_i).sqrt() / p.sigma() * (p.r() * tau_i).exp() * (1.0 - f / PI.sqrt())
}

/// `R(eta) = eta + sqrt(-ln A(eta))`, extended continuously by `eta` where
/// `A >= 1` and by `+inf` where `A <= 0`, so bisection sees one sign change.
pub fn residual(
    path: &EtaPath,
    eta_i: f64,
    tau_i: f64,
    p: &MarketParams,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let f = big_f_eval(path, eta_i, tau_i, p, cfg)?;
    let arg = log_argument(f, tau_i, p);
    Ok(if arg <= 0.0 {
        f64::INFINITY
    } else if arg >= 1.0 {
        eta_i
    } else {
        eta_i + (-arg.ln()).sqrt()
    })
}

const BRACKET_EXPANSIONS: u32 = 8;

/// Solve for `eta` at `tau_i` given every earlier node in `path`.
///
/// With an empty path this is the first node and the analytic value is
/// returned without root finding.
pub fn solve_eta_at(
    path: &EtaPath,
    tau_i: f64,
    p: &MarketParams,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    let Some(&warm) = path.etas().last() else {
        let arg = eta_log_argument(tau_i, p);
        if !(arg < 1.0) {
            return Err(Error::Mesh(format!(
                "first node tau = {tau_i} gives log argument {arg} >= 1; refine the mesh"
            )));
        }
        return eta_analytic(tau_i, p);
    };
    let failure = RefCell::new(None);
    let r = |eta: f64| match residual(path, eta, tau_i, p, cfg) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let mut result = Err(Error::NoSignChange {
        lo: warm - 1.0,
        hi: warm + 1.0,
    });
    for k in 0..=BRACKET_EXPANSIONS {
        let width = f64::from(1u32 << k);
        let lo = warm - width;
        let hi = (warm + width).min(-1e-12);
        result = find_root_bracketed(r, lo, hi, cfg);
        match result {
            Err(Error::NoSignChange { .. }) => continue,
            _ => break,
        }
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let eta = result?;
    let f = big_f_eval(path, eta, tau_i, p, cfg)?;
    let arg = log_argument(f, tau_i, p);
    if !(arg > 0.0 && arg < 1.0) {
        return Err(Error::LogDomain {
            tau: tau_i,
            argument: arg,
        });
    }
    Ok(eta)
}

/// Boundary curve plus the auxiliary values it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SschSolution {
    pub curve: BoundaryCurve,
    pub path: EtaPath,
}

/// Run the solver over `[0, maturity]` with `m` intervals.
pub fn solve(
    p: &MarketParams,
    maturity: f64,
    m: usize,
    mesh: MeshKind,
    cfg: &QuadratureConfig,
) -> Result<SschSolution> {
    cfg.validate()?;
    if m < 2 {
        return Err(Error::Mesh(format!("need at least two intervals, got {m}")));
    }
    let grid = mesh.grid(maturity, m)?;
    let taus = grid.taus().to_vec();
    let arg = eta_log_argument(taus[1], p);
    if !(arg < 1.0) {
        return Err(Error::Mesh(format!(
            "first node tau = {} gives (2r/sigma) sqrt(2 pi tau) e^(r tau) = {arg} >= 1; increase m",
            taus[1]
        )));
    }
    let mut path = EtaPath::new(*p);
    let mut rhos = Vec::with_capacity(taus.len());
    rhos.push(p.strike());
    for (i, &tau) in taus.iter().enumerate().skip(1) {
        let eta = solve_eta_at(&path, tau, p, cfg).map_err(|e| e.at_node(i, tau))?;
        path.push(tau, eta).map_err(|e| e.at_node(i, tau))?;
        rhos.push(rho_from_eta(tau, eta, p));
    }
    Ok(SschSolution {
        curve: BoundaryCurve::new(grid, rhos)?,
        path,
    })
}

/// Boundary curve from the local iterative scheme.
pub fn solve_boundary(
    p: &MarketParams,
    maturity: f64,
    m: usize,
    mesh: MeshKind,
    cfg: &QuadratureConfig,
) -> Result<BoundaryCurve> {
    solve(p, maturity, m, mesh, cfg).map(|s| s.curve)
}
