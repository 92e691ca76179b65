use std::fmt;
use std::str::FromStr;

use early_exercise::psor::{extract_boundary, psor_solve};
use early_exercise::ssch::{default_mesh_nodes, solve_boundary};
use early_exercise::zhu::rho_zhu;
use early_exercise::{
    AsymptoticMethod, BoundaryCurve, MarketParams, MeshKind, PsorConfig, QuadratureConfig,
    Result, TauGrid,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic(AsymptoticMethod),
    Zhu,
    Ssch,
    Psor,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Analytic(a) => a.name(),
            Method::Zhu => "zhu",
            Method::Ssch => "ssch",
            Method::Psor => "psor",
        }
    }

    /// Whether the method produces a whole curve in one solve.
    pub fn is_grid(self) -> bool {
        matches!(self, Method::Ssch | Method::Psor)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "zhu" => return Ok(Method::Zhu),
            "ssch" => return Ok(Method::Ssch),
            "psor" => return Ok(Method::Psor),
            _ => {}
        }
        AsymptoticMethod::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .map(Method::Analytic)
            .ok_or_else(|| {
                format!(
                    "unknown method '{s}' (expected kk, ekk, ssc-a, zhu-asymptote, chen-chadam, zhu, ssch or psor)"
                )
            })
    }
}

/// Everything a method might need, resolved from the command line.
#[derive(Debug, Clone)]
pub struct Settings {
    pub params: MarketParams,
    pub maturity: f64,
    pub mesh: MeshKind,
    /// Mesh intervals for ssch and the analytic grids, time steps for psor.
    pub m: Option<usize>,
    pub n: usize,
    pub half_width: f64,
    pub omega: f64,
    pub quad: QuadratureConfig,
}

impl Settings {
    pub fn psor_config(&self) -> PsorConfig {
        let mut c = PsorConfig::new(self.maturity)
            .with_grid(self.n, self.m.unwrap_or(1000))
            .with_half_width(self.half_width)
            .with_omega(self.omega);
        c.max_sweeps = 100_000;
        c
    }

    fn mesh_nodes(&self) -> usize {
        self.m.unwrap_or_else(|| default_mesh_nodes(self.maturity))
    }

    /// Grid used when no explicit tau values are requested.
    pub fn natural_grid(&self, method: Method) -> Result<Vec<f64>> {
        match method {
            Method::Psor => Ok(TauGrid::uniform(self.maturity, self.m.unwrap_or(1000))?
                .taus()
                .to_vec()),
            _ => Ok(self.mesh.grid(self.maturity, self.mesh_nodes())?.taus().to_vec()),
        }
    }
}

/// Whole curve of a grid method over `[0, settings.maturity]`.
pub fn solve_curve(method: Method, s: &Settings) -> Result<BoundaryCurve> {
    match method {
        Method::Ssch => solve_boundary(&s.params, s.maturity, s.mesh_nodes(), s.mesh, &s.quad),
        Method::Psor => {
            let cfg = s.psor_config();
            extract_boundary(&psor_solve(&s.params, &cfg)?)
        }
        _ => {
            let grid = TauGrid::new(s.natural_grid(method)?)?;
            let rhos = grid
                .taus()
                .iter()
                .map(|&t| point(method, t, s))
                .collect::<Result<Vec<_>>>()?;
            BoundaryCurve::new(grid, rhos)
        }
    }
}

fn point(method: Method, tau: f64, s: &Settings) -> Result<f64> {
    match method {
        Method::Analytic(a) => a.eval(tau, &s.params),
        Method::Zhu => rho_zhu(tau, &s.params, &s.quad),
        Method::Ssch | Method::Psor => unreachable!("grid methods are solved as curves"),
    }
}

/// Boundary values at `taus`. The outer error is a failed solve; inner
/// errors are per-point (typically a formula undefined at that tau).
pub fn values_at(method: Method, s: &Settings, taus: &[f64]) -> Result<Vec<Result<f64>>> {
    if method.is_grid() {
        let curve = solve_curve(method, s)?;
        Ok(taus.iter().map(|&t| curve.eval(t)).collect())
    } else {
        Ok(taus.iter().map(|&t| point(method, t, s)).collect())
    }
}
