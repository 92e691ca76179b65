use std::f64::consts::PI;

use early_exercise::asymptotics::{rho_ekk, rho_ssc_analytic, rho_zhu_asymptote};
use early_exercise::pricing::european_put;
use early_exercise::psor::{extract_boundary, psor_solve};
use early_exercise::ssch::solve_boundary;
use early_exercise::zhu::rho_zhu;
use early_exercise::{AsymptoticMethod, MarketParams, MeshKind, PsorConfig, QuadratureConfig};
use proptest::prelude::*;

fn market() -> MarketParams {
    MarketParams::new(0.1, 0.3, 100.0).unwrap()
}

fn quad() -> QuadratureConfig {
    QuadratureConfig::default()
}

#[test]
fn solver_and_benchmark_agree() {
    // two unrelated discretisations of the same free boundary; each is good
    // to roughly 0.05 here, and the grid extraction snaps within a cell
    let p = market();
    let ssch = solve_boundary(&p, 1.0, 100, MeshKind::Quadratic, &quad()).unwrap();
    let psor = extract_boundary(&psor_solve(&p, &PsorConfig::new(1.0)).unwrap()).unwrap();
    for tau in [0.25, 0.5, 0.75, 1.0] {
        let (a, b) = (ssch.eval(tau).unwrap(), psor.eval(tau).unwrap());
        assert!((a - b).abs() < 0.1, "tau={tau}: {a} vs {b}");
    }
}

#[test]
fn solver_curve_decreases() {
    let curve = solve_boundary(&market(), 2.0, 80, MeshKind::Quadratic, &quad()).unwrap();
    for w in curve.rhos().windows(2) {
        assert!(w[1] < w[0]);
    }
    let p = market();
    assert!(curve.rhos().iter().all(|&r| r > p.perpetual_boundary()));
}

#[test]
fn uniform_and_quadratic_meshes_agree() {
    let p = market();
    let q = solve_boundary(&p, 1.0, 100, MeshKind::Quadratic, &quad()).unwrap();
    let u = solve_boundary(&p, 1.0, 100, MeshKind::Uniform, &quad()).unwrap();
    assert!((q.eval(1.0).unwrap() - u.eval(1.0).unwrap()).abs() < 0.05);
}

#[test]
fn integral_formula_undershoots_near_expiry() {
    let p = market();
    let solved = solve_boundary(&p, 0.01, 60, MeshKind::Quadratic, &quad()).unwrap();
    for &tau in &solved.taus()[1..] {
        let zhu = rho_zhu(tau, &p, &quad()).unwrap();
        assert!(zhu < solved.eval(tau).unwrap(), "tau={tau}");
    }
}

#[test]
fn undershoot_ratio_tends_to_sqrt_two_pi() {
    // (E - rho_ssc) / (E - rho_asym) * sqrt(-ln tau); the leading terms give
    // sqrt(2 pi), approached slowly from below
    let p = market();
    let ratio = |tau: f64| {
        let ssc = rho_ssc_analytic(tau, &p).unwrap();
        let asym = rho_zhu_asymptote(tau, &p).unwrap();
        (100.0 - ssc) / (100.0 - asym) * (-tau.ln()).sqrt()
    };
    let limit = (2.0 * PI).sqrt();
    let mut prev = 0.0;
    for tau in [1e-4, 1e-6, 1e-8, 1e-10, 1e-12] {
        let r = ratio(tau);
        assert!(r > prev && r < limit, "tau={tau}: {r}");
        prev = r;
    }
    assert!((prev / limit - 1.0).abs() < 0.03);
}

#[test]
fn american_exceeds_european_at_the_boundary() {
    let p = market();
    let curve = solve_boundary(&p, 1.0, 60, MeshKind::Quadratic, &quad()).unwrap();
    for (tau, rho) in curve.points().skip(1) {
        assert!(european_put(rho, tau, &p) < 100.0 - rho, "tau={tau}");
    }
}

#[test]
fn analytic_methods_agree_at_a_minute() {
    let p = market();
    let tau = 1.0 / (365.0 * 24.0 * 60.0);
    let ekk = rho_ekk(tau, &p).unwrap();
    for m in AsymptoticMethod::ALL {
        let v = m.eval(tau, &p).unwrap();
        assert!((v - ekk).abs() < 0.5, "{}: {v}", m.name());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn integral_formula_between_perpetual_and_strike(
        r in 0.01f64..0.2, sigma in 0.1f64..0.6, tau in 1e-3f64..10.0,
    ) {
        let p = MarketParams::new(r, sigma, 100.0).unwrap();
        let v = rho_zhu(tau, &p, &quad()).unwrap();
        prop_assert!(v > p.perpetual_boundary() && v < 100.0);
    }

    #[test]
    fn integral_formula_decreases(
        r in 0.01f64..0.2, sigma in 0.1f64..0.6, tau in 1e-3f64..5.0,
    ) {
        let p = MarketParams::new(r, sigma, 100.0).unwrap();
        let a = rho_zhu(tau, &p, &quad()).unwrap();
        let b = rho_zhu(tau * 1.1, &p, &quad()).unwrap();
        prop_assert!(b < a);
    }

    #[test]
    fn boundary_scales_with_strike(strike in 1.0f64..1000.0, tau in 1e-4f64..2.0) {
        let p = market();
        let q = p.with_strike(strike).unwrap();
        let a = rho_zhu(tau, &p, &quad()).unwrap() / 100.0;
        let b = rho_zhu(tau, &q, &quad()).unwrap() / strike;
        prop_assert!((a - b).abs() < 1e-12);
    }
}
