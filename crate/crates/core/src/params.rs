//! Model constants and the sampled-curve types every method produces.

use crate::error::{Error, Result};
use crate::numerics::interp_linear;

/// Black–Scholes market for a zero-dividend put: risk-free rate `r`,
/// volatility `sigma` and strike `E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    r: f64,
    sigma: f64,
    strike: f64,
}

impl MarketParams {
    pub fn new(r: f64, sigma: f64, strike: f64) -> Result<Self> {
        for (name, v) in [("r", r), ("sigma", sigma), ("strike", strike)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(Self { r, sigma, strike })
    }

    /// Parameters with a prescribed `gamma = 2r/sigma^2`, keeping `sigma`.
    pub fn with_gamma(gamma: f64, sigma: f64, strike: f64) -> Result<Self> {
        Self::new(0.5 * gamma * sigma * sigma, sigma, strike)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn strike(&self) -> f64 {
        self.strike
    }

    /// `2r / sigma^2`.
    pub fn gamma(&self) -> f64 {
        2.0 * self.r / (self.sigma * self.sigma)
    }

    /// `(1 + gamma) / 2`.
    pub fn a(&self) -> f64 {
        0.5 * (1.0 + self.gamma())
    }

    /// `(1 - gamma) / 2`.
    pub fn b(&self) -> f64 {
        0.5 * (1.0 - self.gamma())
    }

    /// Exercise boundary of the perpetual put, `gamma E / (1 + gamma)`.
    pub fn perpetual_boundary(&self) -> f64 {
        let g = self.gamma();
        g * self.strike / (1.0 + g)
    }

    /// Same market with a different strike.
    pub fn with_strike(&self, strike: f64) -> Result<Self> {
        Self::new(self.r, self.sigma, strike)
    }
}

/// Strictly increasing times to maturity starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TauGrid {
    taus: Vec<f64>,
}

impl TauGrid {
    pub fn new(taus: Vec<f64>) -> Result<Self> {
        if taus.len() < 2 {
            return Err(Error::Mesh("a grid needs at least two nodes".into()));
        }
        if taus[0] != 0.0 {
            return Err(Error::Mesh(format!("grid must start at 0, got {}", taus[0])));
        }
        if let Some(w) = taus.windows(2).find(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::Mesh(format!(
                "grid must be strictly increasing and finite ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { taus })
    }

    /// `tau_i = (i/m) T`.
    pub fn uniform(maturity: f64, m: usize) -> Result<Self> {
        Self::check_shape(maturity, m)?;
        Self::new((0..=m).map(|i| maturity * i as f64 / m as f64).collect())
    }

    /// `tau_i = (i/m)^2 T`, clustering nodes near expiry.
    pub fn quadratic(maturity: f64, m: usize) -> Result<Self> {
        Self::check_shape(maturity, m)?;
        Self::new(
            (0..=m)
                .map(|i| {
                    let s = i as f64 / m as f64;
                    maturity * s * s
                })
                .collect(),
        )
    }

    fn check_shape(maturity: f64, m: usize) -> Result<()> {
        if !(maturity.is_finite() && maturity > 0.0) {
            return Err(Error::Mesh(format!("maturity must be positive, got {maturity}")));
        }
        if m == 0 {
            return Err(Error::Mesh("need at least one interval".into()));
        }
        Ok(())
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn maturity(&self) -> f64 {
        *self.taus.last().expect("grid is never empty")
    }
}

/// Exercise boundary sampled on a [`TauGrid`], linearly interpolated between
/// nodes. `rhos[0]` is the value at expiry and equals the strike.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    grid: TauGrid,
    rhos: Vec<f64>,
}

impl BoundaryCurve {
    pub fn new(grid: TauGrid, rhos: Vec<f64>) -> Result<Self> {
        if rhos.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "{} boundary values for {} grid nodes",
                rhos.len(),
                grid.len()
            )));
        }
        let strike = rhos[0];
        let ceiling = strike * (1.0 + 1e-12);
        if let Some((i, v)) = rhos
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v.is_finite() && v > 0.0 && v <= ceiling))
        {
            return Err(Error::InvalidParameter(format!(
                "boundary value {v} at node {i} is outside (0, {strike}]"
            )));
        }
        Ok(Self { grid, rhos })
    }

    pub fn grid(&self) -> &TauGrid {
        &self.grid
    }

    pub fn taus(&self) -> &[f64] {
        self.grid.taus()
    }

    pub fn rhos(&self) -> &[f64] {
        &self.rhos
    }

    pub fn maturity(&self) -> f64 {
        self.grid.maturity()
    }

    /// Value at expiry, i.e. the strike.
    pub fn strike(&self) -> f64 {
        self.rhos[0]
    }

    /// Boundary position at `tau`, linear between nodes.
    pub fn eval(&self, tau: f64) -> Result<f64> {
        interp_linear(&self.grid, &self.rhos, tau)
    }

    /// Iterator over `(tau_i, rho_i)`.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid.taus().iter().copied().zip(self.rhos.iter().copied())
    }
}

/// Knobs shared by every integral and root solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Panels of the composite Boole rule; a positive multiple of 4.
    pub finite_subintervals: usize,
    /// Upper limit used in place of infinity.
    pub semi_inf_truncation: f64,
    pub root_tol: f64,
    pub max_iter: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            finite_subintervals: 1000,
            semi_inf_truncation: 50.0,
            root_tol: 1e-12,
            max_iter: 200,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let n = self.finite_subintervals;
        if n < 4 || !n.is_multiple_of(4) {
            return Err(Error::InvalidParameter(format!(
                "finite_subintervals must be a positive multiple of 4, got {n}"
            )));
        }
        if !(self.semi_inf_truncation.is_finite() && self.semi_inf_truncation > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "semi_inf_truncation must be positive, got {}",
                self.semi_inf_truncation
            )));
        }
        if !(self.root_tol.is_finite() && self.root_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "root_tol must be positive, got {}",
                self.root_tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be positive".into()));
        }
        Ok(())
    }

    pub fn with_subintervals(mut self, n: usize) -> Self {
        self.finite_subintervals = n;
        self
    }

    pub fn with_truncation(mut self, z: f64) -> Self {
        self.semi_inf_truncation = z;
        self
    }
}
