//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test -p early-exercise --test acceptance`. The process
//! exits non-zero if any criterion fails; tolerances are fixed here and
//! must not be loosened to make a line pass.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use early_exercise::asymptotics::{rho_ekk, rho_kk, rho_ssc_analytic, rho_zhu_asymptote, sqrt_log_ratio};
use early_exercise::numerics::norm_cdf;
use early_exercise::pricing::{
    boundary_rel_err, mispricing_err, price_gap_at_boundary, price_gap_full, relative_deviation,
    GreenKernel,
};
use early_exercise::psor::{extract_boundary, psor_solve};
use early_exercise::ssch::{solve, solve_boundary};
use early_exercise::zhu::{f2_max, gamma_critical, rho_zhu, zhu_second_derivative};
use early_exercise::{
    BoundaryCurve, MarketParams, MeshKind, PsorConfig, QuadratureConfig, Result, TauGrid,
};

/// Short-horizon reference rows: `(tau, ekk, ssc-a)`.
const SHORT: [(f64, f64, f64); 7] = [
    (1e-5, 99.69, 99.69),
    (5e-5, 99.37, 99.37),
    (1e-4, 99.14, 99.15),
    (5e-4, 98.28, 98.29),
    (1e-3, 97.70, 97.72),
    (0.04, 91.12, 91.31),
    (0.1, 89.29, 89.42),
];

/// Long-horizon reference rows: `(tau, psor, zhu, ssch, rel zhu %, rel ssch %)`.
const LONG: [(f64, f64, f64, f64, f64, f64); 16] = [
    (0.0, 100.0, 100.0, 100.0, 0.0, 0.0),
    (0.02, 92.8672, 90.8575, 92.3461, 2.16, 0.56),
    (0.04, 90.7707, 88.6563, 90.2088, 2.33, 0.62),
    (0.06, 89.3300, 87.2160, 88.7771, 2.37, 0.62),
    (0.08, 88.2350, 86.1300, 87.6695, 2.39, 0.64),
    (0.1, 87.3279, 85.2538, 86.7636, 2.38, 0.65),
    (0.2, 84.2962, 82.3766, 83.7476, 2.28, 0.65),
    (0.4, 81.0179, 79.3593, 80.4793, 2.05, 0.66),
    (0.6, 79.0571, 77.5961, 78.5391, 1.85, 0.66),
    (0.8, 77.6986, 76.3752, 77.1895, 1.70, 0.66),
    (1.0, 76.6695, 75.4580, 76.1632, 1.58, 0.66),
    (1.5, 74.9137, 73.8879, 74.4094, 1.37, 0.67),
    (2.0, 73.8107, 72.8731, 73.2722, 1.27, 0.73),
    (3.0, 72.5786, 71.6205, 71.8735, 1.32, 0.97),
    (4.0, 72.0121, 70.8778, 71.0464, 1.58, 1.34),
    (5.0, 71.7966, 70.3925, 70.5100, 1.96, 1.79),
];

fn market() -> MarketParams {
    MarketParams::new(0.1, 0.3, 100.0).unwrap()
}

fn quad() -> QuadratureConfig {
    QuadratureConfig::default()
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict {
        pass,
        detail: detail.into(),
    })
}

/// Largest `|got - want|` over `rows`, with the tau where it occurs.
fn worst(rows: impl IntoIterator<Item = (f64, f64, f64)>) -> (f64, f64) {
    rows.into_iter()
        .map(|(tau, got, want)| ((got - want).abs(), tau))
        .fold((0.0, f64::NAN), |a, b| if b.0 > a.0 { b } else { a })
}

/// Curves shared between criteria.
struct Fixtures {
    ssch: BoundaryCurve,
    psor: BoundaryCurve,
}

fn fixtures() -> Result<Fixtures> {
    let p = market();
    let (ssch, psor) = std::thread::scope(|s| {
        let a = s.spawn(|| solve_boundary(&p, 5.0, 200, MeshKind::Quadratic, &quad()));
        let b = s.spawn(|| extract_boundary(&psor_solve(&p, &PsorConfig::new(5.0))?));
        (a.join().unwrap(), b.join().unwrap())
    });
    Ok(Fixtures {
        ssch: ssch?,
        psor: psor?,
    })
}

fn c1_short_horizon_analytic() -> Result<Verdict> {
    let p = market();
    let mut rows = Vec::new();
    for (tau, ekk, ssc) in SHORT {
        rows.push((tau, rho_ekk(tau, &p)?, ekk));
        rows.push((tau, rho_ssc_analytic(tau, &p)?, ssc));
    }
    let (dev, tau) = worst(rows);
    verdict(dev <= 0.01, format!("max |dev| {dev:.4} at tau={tau} (tol 0.01)"))
}

fn c2_integral_formula() -> Result<Verdict> {
    let p = market();
    let mut rows = Vec::new();
    for row in LONG {
        rows.push((row.0, rho_zhu(row.0, &p, &quad())?, row.2));
    }
    let (dev, tau) = worst(rows);
    verdict(dev <= 2e-3, format!("max |dev| {dev:.2e} at tau={tau} over 16 rows (tol 2e-3)"))
}

fn c3_integral_equation(fx: &Fixtures) -> Result<Verdict> {
    let tol = |tau: f64| if tau <= 2.0 { 0.05 } else { 0.1 };
    let mut full_ok = true;
    let mut full_worst: f64 = 0.0;
    for row in LONG {
        let dev = (fx.ssch.eval(row.0)? - row.3).abs();
        full_ok &= dev <= tol(row.0);
        full_worst = full_worst.max(dev);
    }
    // reduced profile: 250 requested theta panels rounded up to a multiple of 4
    let smoke = solve_boundary(
        &market(),
        5.0,
        60,
        MeshKind::Quadratic,
        &quad().with_subintervals(252),
    )?;
    let mut smoke_worst: f64 = 0.0;
    for row in LONG {
        smoke_worst = smoke_worst.max((smoke.eval(row.0)? - row.3).abs());
    }
    verdict(
        full_ok && smoke_worst <= 0.3,
        format!(
            "m=200: max |dev| {full_worst:.4} (tol 0.05 / 0.1 beyond tau=2); smoke m=60: {smoke_worst:.4} (tol 0.3)"
        ),
    )
}

fn c4_finite_difference(fx: &Fixtures) -> Result<Verdict> {
    let mut rows = Vec::new();
    for row in LONG {
        rows.push((row.0, fx.psor.eval(row.0)?, row.1));
    }
    let (dev, tau) = worst(rows);
    let at1 = fx.psor.eval(1.0)?;
    verdict(
        dev <= 0.1,
        format!("max |dev| {dev:.4} at tau={tau} (tol 0.1); rho(1) = {at1:.4} vs 76.6695"),
    )
}

fn c5_gamma0() -> Result<Verdict> {
    let g = gamma_critical(&quad())?;
    let peak = f2_max(g)?;
    verdict(
        (g - 0.0167821).abs() <= 1e-5 && (peak - PI).abs() <= 1e-5,
        format!("gamma0 = {g:.9}, max f2 = {peak:.9}"),
    )
}

fn c6_convexity() -> Result<Verdict> {
    let g0 = gamma_critical(&quad())?;
    let mut failures = Vec::new();
    for gamma in [g0, 0.1, 1.0, 2.222] {
        let p = MarketParams::with_gamma(gamma, 0.3, 100.0)?;
        let taus: Vec<f64> = (1..=100).map(|k| 0.05 * k as f64).collect();
        let mut rhos = Vec::with_capacity(taus.len());
        for &tau in &taus {
            if zhu_second_derivative(tau, &p, &quad())? <= 0.0 {
                failures.push(format!("gamma={gamma:.4} rho''({tau:.2}) <= 0"));
            }
            rhos.push(rho_zhu(tau, &p, &quad())?);
        }
        for (k, w) in rhos.windows(3).enumerate() {
            if w[0] - 2.0 * w[1] + w[2] <= 0.0 {
                failures.push(format!("gamma={gamma:.4} second difference at tau={:.2}", taus[k + 1]));
            }
        }
    }
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            "4 gammas x 100 taus, derivative and second differences positive".to_string()
        } else {
            failures.join("; ")
        },
    )
}

fn c7_limits() -> Result<Verdict> {
    let p = market();
    let target = 100.0 * 0.3;
    let tau = 1e-12;
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, rho) in [
        ("kk", rho_kk(tau, &p)?),
        ("ekk", rho_ekk(tau, &p)?),
        ("ssc-a", rho_ssc_analytic(tau, &p)?),
    ] {
        let ratio = sqrt_log_ratio(tau, rho, 100.0);
        ok &= (ratio / target - 1.0).abs() <= 0.05;
        notes.push(format!("{name} {ratio:.2}"));
    }
    let expected = target / (2.0 * PI).sqrt();
    for t in [1e-12, 1e-8, 1e-4, 0.5] {
        let ratio = (100.0 - rho_zhu_asymptote(t, &p)?) / (t.sqrt() * -t.ln());
        ok &= (ratio / expected - 1.0).abs() <= 1e-12;
    }
    notes.push(format!("zhu-asymptote = E sigma/sqrt(2 pi) = {expected:.4}"));
    let sol = solve(&p, 5.0, 200, MeshKind::Quadratic, &quad())?;
    let ratios: Vec<f64> = sol
        .curve
        .points()
        .skip(1)
        .take(5)
        .map(|(t, r)| sqrt_log_ratio(t, r, 100.0))
        .collect();
    // ratios[0] is the smallest node; approaching tau -> 0 they should rise
    let monotone = ratios.windows(2).all(|w| w[0] >= w[1]);
    ok &= (ratios[0] / target - 1.0).abs() <= 0.15 && monotone;
    notes.push(format!(
        "ssch first 5 nodes {:?} (monotone: {monotone})",
        ratios.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>()
    ));
    verdict(ok, notes.join(", "))
}

fn c8_relative_errors(fx: &Fixtures) -> Result<Verdict> {
    let p = market();
    let mut rows = Vec::new();
    for row in LONG.iter().skip(1) {
        let bench = fx.psor.eval(row.0)?;
        let zhu = 100.0 * relative_deviation(rho_zhu(row.0, &p, &quad())?, bench);
        let ssch = 100.0 * relative_deviation(fx.ssch.eval(row.0)?, bench);
        rows.push((row.0, zhu, row.4));
        rows.push((row.0, ssch, row.5));
    }
    let (dev, tau) = worst(rows);
    let bench = fx.psor.eval(1.0)?;
    let zhu1 = 100.0 * relative_deviation(rho_zhu(1.0, &p, &quad())?, bench);
    let ssch1 = 100.0 * relative_deviation(fx.ssch.eval(1.0)?, bench);
    verdict(
        dev <= 0.3,
        format!(
            "max |dev| {dev:.3} pp at tau={tau} (tol 0.3); tau=1: {zhu1:.2}% / {ssch1:.2}% vs 1.58% / 0.66%"
        ),
    )
}

fn c9_mispricing() -> Result<Verdict> {
    let p = MarketParams::new(0.1, 0.3, 1.0)?;
    let cfg = PsorConfig::new(0.006).with_half_width(0.25);
    let bench = extract_boundary(&psor_solve(&p, &cfg)?)?;
    let zhu_vals = bench
        .taus()
        .iter()
        .map(|&t| rho_zhu(t, &p, &quad()))
        .collect::<Result<Vec<_>>>()?;
    let zhu = BoundaryCurve::new(bench.grid().clone(), zhu_vals)?;
    let (mut eps_max, mut eps_tau) = (f64::MIN, 0.0);
    let mut err_small: f64 = 0.0;
    for &tau in &bench.taus()[1..] {
        let eps = boundary_rel_err(&bench, &zhu, tau)?;
        if eps > eps_max {
            (eps_max, eps_tau) = (eps, tau);
        }
        if tau < 5e-4 {
            err_small = err_small.max(mispricing_err(&bench, &zhu, tau, &p, &quad())?);
        }
    }
    let err_day = mispricing_err(&bench, &zhu, 4e-3, &p, &quad())?;
    let ok = (eps_max - 0.0032).abs() <= 0.001
        && (3e-4..=1.5e-3).contains(&eps_tau)
        && (err_day - 0.15).abs() <= 0.05
        && err_small > 0.70;
    verdict(
        ok,
        format!(
            "max eps {eps_max:.4} at tau={eps_tau:.2e} (want 0.0032 +- 0.001 in [3e-4, 1.5e-3]); err(4e-3) = {err_day:.3} (want 0.15 +- 0.05); max err below 5e-4 = {err_small:.3} (want > 0.70)"
        ),
    )
}

/// Standard normal CDF from its Taylor series `1/2 + phi(x) sum x^{2n+1} / (2n+1)!!`.
fn norm_cdf_series(x: f64) -> f64 {
    let (mut term, mut sum, mut k) = (x, x, 1.0);
    while term.abs() > 1e-17 * sum.abs() {
        k += 2.0;
        term *= x * x / k;
        sum += term;
    }
    0.5 + (-0.5 * x * x).exp() / (2.0 * PI).sqrt() * sum
}

fn c10_oracles() -> Result<Verdict> {
    let p = market();
    let grid = TauGrid::quadratic(0.1, 100)?;
    let reference = solve_boundary(&p, 0.1, 100, MeshKind::Quadratic, &quad())?;
    let zhu_vals = grid
        .taus()
        .iter()
        .map(|&t| rho_zhu(t, &p, &quad()))
        .collect::<Result<Vec<_>>>()?;
    let zhu = BoundaryCurve::new(grid, zhu_vals)?;
    let mut gap_dev: f64 = 0.0;
    for tau in [0.001, 0.01, 0.1] {
        let a = price_gap_at_boundary(&reference, &zhu, tau, &p, &quad())?;
        let b = price_gap_full(&reference, &zhu, reference.eval(tau)?, tau, &p, &quad())?;
        gap_dev = gap_dev.max((a - b).abs());
    }
    let kernel = GreenKernel::new(&p);
    let mut mass_dev: f64 = 0.0;
    for tau in [0.01, 0.1, 1.0] {
        let w = 10.0 * 0.3 * f64::sqrt(tau);
        let cfg = quad();
        let mass = early_exercise::numerics::integrate_newton_cotes(|x| kernel.eval(x, tau), -w, w, &cfg)?;
        mass_dev = mass_dev.max((mass - 1.0).abs());
    }
    let cdf_dev = (0..1000)
        .map(|i| -8.0 + 16.0 * i as f64 / 999.0)
        .map(|x| (norm_cdf(x) - norm_cdf_series(x)).abs())
        .fold(0.0, f64::max);
    verdict(
        gap_dev <= 1e-6 * 100.0 && mass_dev <= 1e-10 && cdf_dev <= 1e-12,
        format!("gap forms {gap_dev:.1e} (tol 1e-4), kernel mass {mass_dev:.1e}, cdf {cdf_dev:.1e}"),
    )
}

fn c11_self_convergence(fx: &Fixtures) -> Result<Verdict> {
    let p = market();
    let (ssch2, psor2) = std::thread::scope(|s| {
        let a = s.spawn(|| solve_boundary(&p, 5.0, 400, MeshKind::Quadratic, &quad()));
        let b = s.spawn(|| {
            extract_boundary(&psor_solve(&p, &PsorConfig::new(5.0).with_grid(2000, 2000))?)
        });
        (a.join().unwrap(), b.join().unwrap())
    });
    let ds = (ssch2?.eval(1.0)? - fx.ssch.eval(1.0)?).abs();
    let dp = (psor2?.eval(1.0)? - fx.psor.eval(1.0)?).abs();
    verdict(
        ds < 0.05 && dp < 0.1,
        format!("ssch m 200->400 moves rho(1) by {ds:.2e} (tol 0.05); psor 1000->2000 by {dp:.2e} (tol 0.1)"),
    )
}

fn main() -> ExitCode {
    let started = Instant::now();
    let fx = match fixtures() {
        Ok(fx) => fx,
        Err(e) => {
            println!("FAIL  setup: {e}");
            return ExitCode::FAILURE;
        }
    };
    type Check<'a> = Box<dyn Fn() -> Result<Verdict> + 'a>;
    let checks: Vec<(&str, Check)> = vec![
        ("short-horizon analytic formulas", Box::new(c1_short_horizon_analytic)),
        ("integral formula", Box::new(c2_integral_formula)),
        ("integral-equation solver", Box::new(|| c3_integral_equation(&fx))),
        ("finite-difference benchmark", Box::new(|| c4_finite_difference(&fx))),
        ("convexity threshold gamma0", Box::new(c5_gamma0)),
        ("convexity", Box::new(c6_convexity)),
        ("limits at expiry", Box::new(c7_limits)),
        ("relative errors vs benchmark", Box::new(|| c8_relative_errors(&fx))),
        ("near-expiry mispricing", Box::new(c9_mispricing)),
        ("oracle equivalence", Box::new(c10_oracles)),
        ("self-convergence", Box::new(|| c11_self_convergence(&fx))),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in checks.iter().enumerate() {
        let t = Instant::now();
        let (pass, detail) = match check() {
            Ok(v) => (v.pass, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        println!(
            "{}  {:>2}. {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            t.elapsed().as_secs_f64()
        );
        if !pass {
            failed.push(i + 1);
        }
    }
    println!(
        "{} of {} criteria pass ({:.0}s)",
        checks.len() - failed.len(),
        checks.len(),
        started.elapsed().as_secs_f64()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failing: {failed:?}");
        ExitCode::FAILURE
    }
}
