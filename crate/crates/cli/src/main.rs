//! Command-line front end: boundary curves, cross-method tables, the
//! convexity threshold and the near-expiry mispricing sweep, as CSV.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 domain error, 64 usage error
//! (including out-of-range parameters).

mod methods;
mod output;

use std::error::Error as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use early_exercise::pricing::{boundary_rel_err, mispricing_err, relative_deviation};
use early_exercise::zhu::{f2_max, gamma_critical};
use early_exercise::{BoundaryCurve, Error, MarketParams, MeshKind, QuadratureConfig, TauGrid};

use methods::{solve_curve, values_at, Method, Settings};
use output::{sig, Format, Table, NA};

#[derive(Parser, Debug)]
#[command(name = "early-exercise", version, about = "Early exercise boundary of the American put")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Boundary of one method, as `tau,rho`.
    Boundary {
        #[arg(long)]
        method: Method,
        #[command(flatten)]
        market: MarketArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Several methods side by side with relative deviations from a benchmark.
    Compare {
        /// Comma-separated list of at least two methods.
        #[arg(long, value_delimiter = ',', required = true)]
        method: Vec<Method>,
        #[arg(long, default_value = "psor")]
        benchmark: Method,
        #[command(flatten)]
        market: MarketArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Smallest gamma = 2r/sigma^2 for which the boundary is provably convex.
    Gamma0 {
        #[arg(long, default_value_t = 7)]
        precision: usize,
    },
    /// Relative boundary error and relative mispricing close to expiry.
    Mispricing {
        /// Approximation under test.
        #[arg(long, default_value = "zhu")]
        method: Method,
        /// Reference boundary.
        #[arg(long, default_value = "psor")]
        benchmark: Method,
        /// Number of log-spaced tau values.
        #[arg(long, default_value_t = 40)]
        points: usize,
        /// Smallest tau of the sweep.
        #[arg(long = "tau-min", default_value_t = 1e-5)]
        tau_min: f64,
        #[command(flatten)]
        market: MarketArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct MarketArgs {
    /// Strike.
    #[arg(long = "E", default_value_t = 100.0)]
    strike: f64,
    #[arg(long, default_value_t = 0.1)]
    r: f64,
    #[arg(long, default_value_t = 0.3)]
    sigma: f64,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Horizon in years; defaults to the largest --tau.
    #[arg(long = "T")]
    maturity: Option<f64>,
    /// Comma-separated times to maturity in years.
    #[arg(long, value_delimiter = ',')]
    tau: Vec<f64>,
    #[arg(long, value_enum, default_value_t = MeshArg::Quadratic)]
    mesh: MeshArg,
    /// Mesh intervals (ssch and analytic grids) or time steps (psor).
    #[arg(long)]
    m: Option<usize>,
    /// Half the number of psor space intervals.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Half-width of the psor log-moneyness domain.
    #[arg(long = "L")]
    half_width: Option<f64>,
    #[arg(long, default_value_t = 1.5)]
    omega: f64,
    /// Boole-rule panels for finite integrals (a multiple of 4).
    #[arg(long, default_value_t = 1000)]
    panels: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MeshArg {
    Uniform,
    Quadratic,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Significant digits.
    #[arg(long, default_value_t = 6)]
    precision: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

enum Failure {
    Usage(String),
    /// A self-check on a result did not hold.
    Check(String),
    Solver(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Solver(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(64)
        }
        Err(Failure::Solver(Error::InvalidParameter(msg))) => {
            eprintln!("error: invalid parameter: {msg}");
            ExitCode::from(64)
        }
        Err(Failure::Solver(e)) => {
            let mut msg = e.to_string();
            let mut source = e.source();
            while let Some(s) = source {
                msg = format!("{msg}: {s}");
                source = s.source();
            }
            eprintln!("error: {msg}");
            ExitCode::from(if e.is_domain() { 2 } else { 1 })
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Boundary {
            method,
            market,
            grid,
            out,
        } => boundary(method, &market, &grid, &out),
        Command::Compare {
            method,
            benchmark,
            market,
            grid,
            out,
        } => compare(&method, benchmark, &market, &grid, &out),
        Command::Gamma0 { precision } => gamma0(precision),
        Command::Mispricing {
            method,
            benchmark,
            points,
            tau_min,
            market,
            grid,
            out,
        } => mispricing(method, benchmark, points, tau_min, &market, &grid, &out),
    }
}

fn settings(
    market: &MarketArgs,
    grid: &GridArgs,
    default_l: f64,
    default_t: Option<f64>,
) -> Result<Settings, Failure> {
    let maturity = match (grid.maturity, grid.tau.iter().copied().reduce(f64::max)) {
        (Some(t), _) => t,
        (None, Some(t)) => t,
        (None, None) => default_t.ok_or_else(|| Failure::Usage("give --tau or --T".into()))?,
    };
    Ok(Settings {
        params: MarketParams::new(market.r, market.sigma, market.strike)?,
        maturity,
        mesh: match grid.mesh {
            MeshArg::Uniform => MeshKind::Uniform,
            MeshArg::Quadratic => MeshKind::Quadratic,
        },
        m: grid.m,
        n: grid.n,
        half_width: grid.half_width.unwrap_or(default_l),
        omega: grid.omega,
        quad: {
            let q = QuadratureConfig::default().with_subintervals(grid.panels);
            q.validate()?;
            q
        },
    })
}

fn validate_method(method: Method, s: &Settings) -> Result<(), Failure> {
    if method == Method::Psor {
        s.psor_config().validate()?;
    }
    Ok(())
}

fn emit(table: &Table, out: &OutputArgs) -> Outcome {
    match &out.out {
        Some(path) => table.write(&mut BufWriter::new(File::create(path)?), out.format)?,
        None => table.write(&mut io::stdout().lock(), out.format)?,
    }
    Ok(())
}

fn boundary(method: Method, market: &MarketArgs, grid: &GridArgs, out: &OutputArgs) -> Outcome {
    let s = settings(market, grid, 2.5, None)?;
    validate_method(method, &s)?;
    let taus = if grid.tau.is_empty() {
        s.natural_grid(method)?
    } else {
        grid.tau.clone()
    };
    let values = values_at(method, &s, &taus)?;
    let mut rows = Vec::with_capacity(taus.len());
    for (tau, v) in taus.iter().zip(values) {
        rows.push(vec![sig(*tau, out.precision), sig(v?, out.precision)]);
    }
    emit(
        &Table {
            header: vec!["tau".into(), "rho".into()],
            rows,
        },
        out,
    )
}

fn compare(
    methods: &[Method],
    benchmark: Method,
    market: &MarketArgs,
    grid: &GridArgs,
    out: &OutputArgs,
) -> Outcome {
    if methods.len() < 2 {
        return Err(Failure::Usage("compare needs at least two methods".into()));
    }
    let Some(bench_col) = methods.iter().position(|&m| m == benchmark) else {
        return Err(Failure::Usage(format!(
            "benchmark '{benchmark}' is not among --method"
        )));
    };
    let s = settings(market, grid, 2.5, None)?;
    for &m in methods {
        validate_method(m, &s)?;
    }
    let taus = if grid.tau.is_empty() {
        s.natural_grid(benchmark)?
    } else {
        grid.tau.clone()
    };
    let columns = std::thread::scope(|scope| {
        let handles: Vec<_> = methods
            .iter()
            .map(|&m| {
                let (s, taus) = (&s, &taus);
                scope.spawn(move || values_at(m, s, taus))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect::<Vec<_>>()
    });
    let mut cells: Vec<Vec<Option<f64>>> = Vec::with_capacity(methods.len());
    for column in columns {
        let column = column?;
        let mut col = Vec::with_capacity(column.len());
        for v in column {
            match v {
                Ok(v) => col.push(Some(v)),
                Err(e) if e.is_domain() => col.push(None),
                Err(e) => return Err(e.into()),
            }
        }
        cells.push(col);
    }
    let p = out.precision;
    let fmt = |v: Option<f64>| v.map_or_else(|| NA.to_string(), |v| sig(v, p));
    let mut header = vec!["tau".to_string()];
    header.extend(methods.iter().map(|m| m.to_string()));
    header.extend(methods.iter().map(|m| format!("relerr_{m}")));
    let rows = taus
        .iter()
        .enumerate()
        .map(|(i, &tau)| {
            let mut row = vec![sig(tau, p)];
            row.extend(cells.iter().map(|c| fmt(c[i])));
            let bench = cells[bench_col][i];
            row.extend(cells.iter().map(|c| match (c[i], bench) {
                (Some(v), Some(b)) => fmt(Some(relative_deviation(v, b))),
                _ => NA.to_string(),
            }));
            row
        })
        .collect();
    emit(&Table { header, rows }, out)
}

fn gamma0(precision: usize) -> Outcome {
    let gamma = gamma_critical(&QuadratureConfig::default())?;
    let text = sig(gamma, precision);
    let printed: f64 = text.parse().expect("formatted number parses");
    let peak = f2_max(printed)?;
    if (peak - std::f64::consts::PI).abs() > 1e-5 {
        return Err(Failure::Check(format!(
            "max f2 at gamma = {text} is {peak}, not pi"
        )));
    }
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "{text}")?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn mispricing(
    method: Method,
    benchmark: Method,
    points: usize,
    tau_min: f64,
    market: &MarketArgs,
    grid: &GridArgs,
    out: &OutputArgs,
) -> Outcome {
    if points < 2 {
        return Err(Failure::Usage("--points must be at least 2".into()));
    }
    if !grid.tau.is_empty() {
        return Err(Failure::Usage("mispricing sweeps its own tau grid; use --T and --tau-min".into()));
    }
    let mut s = settings(market, grid, 0.25, Some(0.006))?;
    // both error measures are scale free
    s.params = s.params.with_strike(1.0)?;
    if !(tau_min > 0.0 && tau_min < s.maturity) {
        return Err(Failure::Usage(format!(
            "--tau-min must lie in (0, {})",
            s.maturity
        )));
    }
    validate_method(benchmark, &s)?;
    validate_method(method, &s)?;
    let (reference, approx) = std::thread::scope(|scope| {
        let r = scope.spawn(|| solve_curve(benchmark, &s));
        let a = if method.is_grid() {
            Some(scope.spawn(|| solve_curve(method, &s)))
        } else {
            None
        };
        (r.join().expect("solver thread panicked"), a.map(|h| h.join().expect("solver thread panicked")))
    });
    let reference = reference?;
    let approx = match approx {
        Some(c) => c?,
        None => {
            // sample the approximation on the reference nodes
            let taus = reference.taus().to_vec();
            let vals = values_at(method, &s, &taus)?
                .into_iter()
                .collect::<Result<Vec<_>, _>>()?;
            BoundaryCurve::new(TauGrid::new(taus)?, vals)?
        }
    };
    let ratio = (s.maturity / tau_min).powf(1.0 / (points - 1) as f64);
    let p = out.precision;
    let mut rows = Vec::with_capacity(points);
    for k in 0..points {
        let tau = if k == points - 1 {
            s.maturity
        } else {
            tau_min * ratio.powi(k as i32)
        };
        let eps = boundary_rel_err(&reference, &approx, tau)?;
        let err = match mispricing_err(&reference, &approx, tau, &s.params, &s.quad) {
            Ok(v) => sig(v, p),
            Err(Error::DegenerateDenominator { .. }) => NA.to_string(),
            Err(e) => return Err(e.into()),
        };
        rows.push(vec![sig(tau, p), sig(eps, p), err]);
    }
    emit(
        &Table {
            header: vec!["tau".into(), "eps".into(), "err".into()],
            rows,
        },
        out,
    )
}
