//! Finite-difference benchmark: the put's variational inequality as a
//! linear complementarity problem, solved level by level with projected SOR.
//!
//! With `x = ln(S/E)` and
//!
//! ```text
//! u(x, tau) = e^{alpha x + beta tau} V(E e^x, T - tau) / E
//! alpha = r/sigma^2 - 1/2,  beta = r/2 + sigma^2/8 + r^2/(2 sigma^2)
//! ```
//!
//! the Black–Scholes operator becomes the heat operator `u_tau - sigma^2/2 u_xx`
//! and the obstacle is `g(x, tau) = e^{alpha x + beta tau} (1 - e^x)^+`.

use crate::error::{Error, Result};
use crate::params::{BoundaryCurve, MarketParams, TauGrid};

/// Grid and iteration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsorConfig {
    /// Half the number of space intervals; there are `2n + 1` nodes.
    pub n: usize,
    /// Number of time steps.
    pub m: usize,
    /// Spatial half-width `L` in log-moneyness.
    pub half_width: f64,
    pub omega: f64,
    /// Max-norm change between sweeps that ends the iteration.
    pub tol: f64,
    pub maturity: f64,
    /// Contact tolerance relative to the strike.
    pub contact_tol: f64,
    pub max_sweeps: usize,
}

impl PsorConfig {
    pub fn new(maturity: f64) -> Self {
        Self {
            n: 1000,
            m: 1000,
            half_width: 2.5,
            omega: 1.5,
            tol: 1e-10,
            maturity,
            contact_tol: 1e-8,
            max_sweeps: 10_000,
        }
    }

    pub fn with_grid(mut self, n: usize, m: usize) -> Self {
        self.n = n;
        self.m = m;
        self
    }

    pub fn with_half_width(mut self, l: f64) -> Self {
        self.half_width = l;
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n < 2 || self.m < 1 {
            return bad(format!("need n >= 2 and m >= 1, got n={} m={}", self.n, self.m));
        }
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return bad(format!("L must be positive, got {}", self.half_width));
        }
        if !(self.maturity.is_finite() && self.maturity > 0.0) {
            return bad(format!("T must be positive, got {}", self.maturity));
        }
        if !(self.omega > 0.0 && self.omega < 2.0) {
            return bad(format!("omega must lie in (0, 2), got {}", self.omega));
        }
        if !(self.tol > 0.0 && self.contact_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if self.max_sweeps == 0 {
            return bad("max_sweeps must be positive".into());
        }
        Ok(())
    }

    /// Space step `h = L / n`.
    pub fn h(&self) -> f64 {
        self.half_width / self.n as f64
    }

    /// Time step `k = T / m`.
    pub fn k(&self) -> f64 {
        self.maturity / self.m as f64
    }
}

/// `(alpha, beta)` of the heat-equation transform.
pub fn transform_constants(p: &MarketParams) -> (f64, f64) {
    let (r, s2) = (p.r(), p.sigma() * p.sigma());
    (r / s2 - 0.5, 0.5 * r + s2 / 8.0 + r * r / (2.0 * s2))
}

/// Transformed values on every grid node, one row per time level.
#[derive(Debug, Clone, PartialEq)]
pub struct PsorSolution {
    u: Vec<f64>,
    config: PsorConfig,
    params: MarketParams,
    alpha: f64,
    beta: f64,
}

impl PsorSolution {
    pub fn config(&self) -> &PsorConfig {
        &self.config
    }

    pub fn params(&self) -> &MarketParams {
        &self.params
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn width(&self) -> usize {
        2 * self.config.n + 1
    }

    /// Transformed row at time level `j`.
    pub fn level(&self, j: usize) -> &[f64] {
        let w = self.width();
        &self.u[j * w..(j + 1) * w]
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.config.half_width + i as f64 * self.config.h()
    }

    pub fn tau(&self, j: usize) -> f64 {
        if j == self.config.m {
            self.config.maturity
        } else {
            j as f64 * self.config.k()
        }
    }

    /// Option value at node `(i, j)` in currency units.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        let x = self.x(i);
        self.params.strike() * (-self.alpha * x - self.beta * self.tau(j)).exp() * self.level(j)[i]
    }

    /// `V - (E - S)^+` at node `(i, j)`.
    pub fn gap(&self, i: usize, j: usize) -> f64 {
        let e = self.params.strike();
        self.value(i, j) - (e - e * self.x(i).exp()).max(0.0)
    }
}

fn obstacle(alpha: f64, beta: f64, x: f64, tau: f64) -> f64 {
    (alpha * x + beta * tau).exp() * (-x.exp_m1()).max(0.0)
}

/// March the LCP from expiry to `cfg.maturity`.
pub fn psor_solve(p: &MarketParams, cfg: &PsorConfig) -> Result<PsorSolution> {
    cfg.validate()?;
    let (alpha, beta) = transform_constants(p);
    let (n, m, h, k) = (cfg.n, cfg.m, cfg.h(), cfg.k());
    let w = 2 * n + 1;
    let xs: Vec<f64> = (0..w).map(|i| -cfg.half_width + i as f64 * h).collect();
    let lambda = 0.5 * p.sigma() * p.sigma() * k / (h * h);
    let (diag, off) = (1.0 + lambda, 0.5 * lambda);

    let mut u = Vec::with_capacity(w * (m + 1));
    u.extend(xs.iter().map(|&x| obstacle(alpha, beta, x, 0.0)));
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "transformed payoff overflows on this grid; reduce L".into(),
        ));
    }
    let mut g = vec![0.0; w];
    let mut rhs = vec![0.0; w];
    let mut cur = vec![0.0; w];
    for j in 1..=m {
        let tau = if j == m { cfg.maturity } else { j as f64 * k };
        let prev = &u[(j - 1) * w..j * w];
        for i in 0..w {
            g[i] = obstacle(alpha, beta, xs[i], tau);
        }
        for i in 1..w - 1 {
            rhs[i] = prev[i] + off * (prev[i - 1] - 2.0 * prev[i] + prev[i + 1]);
        }
        for i in 0..w {
            cur[i] = prev[i].max(g[i]);
        }
        cur[0] = g[0];
        cur[w - 1] = 0.0;
        let mut converged = false;
        for _ in 0..cfg.max_sweeps {
            let mut change = 0.0_f64;
            for i in 1..w - 1 {
                let y = (rhs[i] + off * (cur[i - 1] + cur[i + 1])) / diag;
                let next = (cur[i] + cfg.omega * (y - cur[i])).max(g[i]);
                change = change.max((next - cur[i]).abs());
                cur[i] = next;
            }
            if !change.is_finite() {
                return Err(Error::PsorDivergence { level: j });
            }
            if change < cfg.tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::PsorDivergence { level: j });
        }
        u.extend_from_slice(&cur);
    }
    Ok(PsorSolution {
        u,
        config: *cfg,
        params: *p,
        alpha,
        beta,
    })
}

/// Boundary position at level `j >= 1`.
///
/// The contact set is the run of nodes from the left edge where the price
/// equals the payoff. Past it the gap grows quadratically (smooth pasting),
/// so its square root is close to linear; the line through the first two
/// detached nodes is extended back to zero and clamped to the cell between
/// the last contact node and the first detached one.
fn boundary_at_level(sol: &PsorSolution, j: usize) -> Result<f64> {
    let w = sol.width();
    let tol = sol.config.contact_tol * sol.params.strike();
    let detached = (1..w - 1)
        .find(|&i| sol.gap(i, j) > tol)
        .ok_or_else(|| Error::Mesh(format!("no detached node at level {j}; increase L")))?;
    if detached <= 1 {
        return Err(Error::NoContact { level: j });
    }
    let (x0, x1) = (sol.x(detached - 1), sol.x(detached));
    let s1 = sol.gap(detached, j).sqrt();
    let s2 = sol.gap(detached + 1, j).max(0.0).sqrt();
    let x = if s2 > s1 {
        (x1 - s1 * sol.config.h() / (s2 - s1)).clamp(x0, x1)
    } else {
        x0
    };
    Ok(sol.params.strike() * x.exp())
}

/// Exercise boundary on the solver's time levels.
pub fn extract_boundary(sol: &PsorSolution) -> Result<BoundaryCurve> {
    let m = sol.config.m;
    let grid = TauGrid::new((0..=m).map(|j| sol.tau(j)).collect())?;
    let mut rhos = Vec::with_capacity(m + 1);
    rhos.push(sol.params.strike());
    for j in 1..=m {
        rhos.push(boundary_at_level(sol, j)?);
    }
    BoundaryCurve::new(grid, rhos)
}

/// Price at spot `s` and calendar time `t` (`tau = T - t`).
///
/// The early-exercise premium `V - (E - S)^+` is interpolated bilinearly in
/// `(x, tau)` and the exact payoff added back, so the lookup is exact
/// wherever the neighbouring nodes are in the exercise region.
pub fn price_at(sol: &PsorSolution, s: f64, t: f64) -> Result<f64> {
    let c = &sol.config;
    let tau = c.maturity - t;
    let x = (s / sol.params.strike()).ln();
    if !(x.abs() <= c.half_width) {
        return Err(Error::Domain {
            method: "psor",
            tau,
            reason: format!("spot {s} lies outside the grid (|ln(S/E)| > {})", c.half_width),
        });
    }
    if !(0.0..=c.maturity).contains(&tau) {
        return Err(Error::OutOfRange {
            tau,
            max: c.maturity,
        });
    }
    let fx = ((x + c.half_width) / c.h()).min((2 * c.n) as f64);
    let ft = (tau / c.k()).min(c.m as f64);
    let i = (fx.floor() as usize).min(2 * c.n - 1);
    let j = (ft.floor() as usize).min(c.m - 1);
    let (wx, wt) = (fx - i as f64, ft - j as f64);
    let v = |i, j| sol.gap(i, j);
    let premium = (1.0 - wt) * ((1.0 - wx) * v(i, j) + wx * v(i + 1, j))
        + wt * ((1.0 - wx) * v(i, j + 1) + wx * v(i + 1, j + 1));
    Ok(premium + (sol.params.strike() - s).max(0.0))
}
