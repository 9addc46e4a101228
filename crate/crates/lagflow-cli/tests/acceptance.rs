//! Acceptance gate: twelve end-to-end criteria, each printing one PASS/FAIL
//! line with its measured values and the stated tolerance. A criterion that
//! misses its tolerance (or its runtime budget) fails the test.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use lagflow::cauchy::{
    amplification_factor, design_control, normal_derivative_at_level, normal_derivative_bottom,
    solve_cauchy, solve_mixed, BoundaryData, Segment,
};
use lagflow::diskop::{
    approximate_control, duality_identity_residual, invertibility_audit, CircleModes, DiskGeometry,
};
use lagflow::fdsolve::{
    relative_difference, solve_rectangle, BoundaryCondition, Norm, RectangleGrid, RectangleProblem,
};
use lagflow::flow::{advect, enclosed_area, JordanCurve, VelocityField};
use lagflow::runge::blend::fit_time_varying;
use lagflow::runge::partition::Partition;
use lagflow::runge::{runge_approximate, Region, C64};
use lagflow::steklov::{eigenvalue, LateralCondition, RectangleDomain, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(num: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {num:02} ({name}): {verdict} — {detail}");
    assert!(pass, "criterion {num:02} ({name}) failed: {detail}");
}

/// 1. Product identity of the opposing-side eigenvalues:
///    mu_bottom(k) * mu_top(k) = k^2 for the Neumann variant with l1 = pi.
#[test]
fn criterion_01_eigenvalue_product_identity() {
    let start = Instant::now();
    let lateral = LateralCondition::neumann();
    let mut worst = 0.0f64;
    for l2 in [0.5, 1.0, 2.0] {
        let domain = RectangleDomain::new(PI, l2).unwrap();
        for k in 1..=50usize {
            let mu0 = eigenvalue(&domain, &lateral, Side::Bottom, k).unwrap();
            let mu1 = eigenvalue(&domain, &lateral, Side::Top, k).unwrap();
            let k2 = (k * k) as f64;
            worst = worst.max((mu0 * mu1 - k2).abs() / k2);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        1,
        "eigenvalue product identity",
        worst <= 1e-10 && elapsed < 1.0,
        &format!("max relative defect {worst:.3e} (tol 1e-10), {elapsed:.2}s (budget 1s)"),
    );
}

/// 2. Spectral mixed solve against the independent finite-difference oracle
///    on a 257x257 grid, mean-aligned relative L2 <= 1e-3.
#[test]
fn criterion_02_mixed_solve_oracle_equivalence() {
    let start = Instant::now();
    let domain = RectangleDomain::new(PI, 1.0).unwrap();
    let lateral = LateralCondition::neumann();
    let n = 40;
    let cells = 256usize;
    let mut worst = 0.0f64;
    for k in [1usize, 2, 5] {
        let mut g = vec![0.0; n];
        g[k] = 1.0;
        let f0 = BoundaryData::new(Segment::Bottom, lateral, vec![0.0; n]);
        let g1 = BoundaryData::new(Segment::Top, lateral, g);
        let series = solve_mixed(&f0, &g1, &domain, n).unwrap();
        let grid = RectangleGrid::new(domain, cells, cells).unwrap();
        let top: Vec<f64> = (0..=cells)
            .map(|ix| g1.value(&domain, grid.node_x(ix)).unwrap())
            .collect();
        let problem = RectangleProblem {
            grid,
            lateral,
            bottom: BoundaryCondition::Dirichlet(vec![0.0; cells + 1]),
            top: BoundaryCondition::Neumann(top),
        };
        let fd = solve_rectangle(&problem).unwrap();
        let g = fd.grid();
        let mut spectral = Vec::with_capacity((cells + 1) * (cells + 1));
        for iy in 0..=cells {
            for ix in 0..=cells {
                spectral.push(series.value(g.node_x(ix), g.node_y(iy)).unwrap());
            }
        }
        worst = worst.max(relative_difference(&spectral, fd.values(), Norm::L2, true));
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        2,
        "mixed solve vs finite differences",
        worst <= 1e-3 && elapsed < 30.0,
        &format!("max rel L2 {worst:.3e} (tol 1e-3), {elapsed:.2}s (budget 30s)"),
    );
}

/// 3. Cauchy round trip on compatible data reproduces trace and flux.
#[test]
fn criterion_03_cauchy_round_trip() {
    let start = Instant::now();
    let domain = RectangleDomain::new(PI, 1.0).unwrap();
    let lateral = LateralCondition::neumann();
    let n = 9;
    let mut f = vec![0.0; n];
    let mut g = vec![0.0; n];
    f[0] = 0.7;
    for k in 1..n {
        f[k] = ((k * 37 % 11) as f64 - 5.0) / (k * k) as f64;
        g[k] = eigenvalue(&domain, &lateral, Side::Bottom, k).unwrap() * f[k];
    }
    let field = solve_cauchy(
        &BoundaryData::new(Segment::Bottom, lateral, f.clone()),
        &BoundaryData::new(Segment::Bottom, lateral, g.clone()),
        &domain,
        &lateral,
        n,
    )
    .unwrap();
    let flux = normal_derivative_bottom(&field);
    let mut err = 0.0f64;
    for k in 0..n {
        err = err.max((field.coeffs_bottom()[k] - f[k]).abs());
        err = err.max((flux.coeffs[k] - g[k]).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        3,
        "compatible Cauchy round trip",
        err <= 1e-10 && elapsed < 1.0,
        &format!("max coefficient error {err:.3e} (tol 1e-10), {elapsed:.2}s (budget 1s)"),
    );
}

/// 4. The solver's bottom normal derivative agrees with its closed form
///    mu_k f_k - g_k / cosh(k l2) (constant mode -g_0) to 1e-12.
#[test]
fn criterion_04_normal_derivative_closed_form() {
    let domain = RectangleDomain::new(PI, 1.0).unwrap();
    let lateral = LateralCondition::neumann();
    let n = 32;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let g: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let field = solve_mixed(
        &BoundaryData::new(Segment::Bottom, lateral, f.clone()),
        &BoundaryData::new(Segment::Top, lateral, g.clone()),
        &domain,
        n,
    )
    .unwrap();
    let flux = normal_derivative_bottom(&field);
    let mut err = (flux.coeffs[0] - (-g[0])).abs();
    for k in 1..n {
        let mu = eigenvalue(&domain, &lateral, Side::Bottom, k).unwrap();
        let expected = mu * f[k] - g[k] / (k as f64).cosh();
        err = err.max((flux.coeffs[k] - expected).abs());
    }
    report(
        4,
        "normal derivative closed form",
        err <= 1e-12,
        &format!("max coefficient defect {err:.3e} (tol 1e-12), random data, N = 32"),
    );
}

/// 5. Data-to-control amplification behaves like e^(k lstar) (factor-2
///    window), and the interior-line design round-trips to rel 1e-10.
#[test]
fn criterion_05_amplification_and_design_round_trip() {
    let start = Instant::now();
    let domain = RectangleDomain::new(PI, 1.0)
        .unwrap()
        .with_interior_level(0.5)
        .unwrap();
    let mut ratio_lo = f64::INFINITY;
    let mut ratio_hi = 0.0f64;
    for k in 3..=15usize {
        let ratio = amplification_factor(&domain, k).unwrap() / (0.5 * k as f64).exp();
        ratio_lo = ratio_lo.min(ratio);
        ratio_hi = ratio_hi.max(ratio);
    }
    let window_ok = ratio_lo >= 0.5 && ratio_hi <= 2.0;

    let n = 8;
    let mut a = vec![0.0; n];
    for (k, item) in a.iter_mut().enumerate().skip(1) {
        *item = 1.0 / (1.0 + k as f64);
    }
    let target = BoundaryData::new(Segment::InteriorLine, LateralCondition::neumann(), a.clone());
    let control = design_control(&target, &domain, n).unwrap();
    let field = solve_cauchy(
        &control.trace,
        &control.flux,
        &domain,
        &LateralCondition::neumann(),
        n,
    )
    .unwrap();
    let recovered = normal_derivative_at_level(&field, 0.5).unwrap();
    let mut rel = 0.0f64;
    for k in 1..n {
        rel = rel.max((recovered.coeffs[k] - a[k]).abs() / a[k].abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        5,
        "amplification law and design round trip",
        window_ok && rel <= 1e-10 && elapsed < 1.0,
        &format!(
            "amplification/e^(k lstar) in [{ratio_lo:.3}, {ratio_hi:.3}] (window [0.5, 2]), \
             round-trip rel {rel:.3e} (tol 1e-10), {elapsed:.2}s (budget 1s)"
        ),
    );
}

/// 6. Pairing identity between the control-flux route and the annulus-trace
///    route, 100 random pairs at K = 32.
#[test]
fn criterion_06_duality_identity() {
    let start = Instant::now();
    let geometry = DiskGeometry::new(0.3, 1.0, 0.0, PI).unwrap();
    let k_max = 32usize;
    let m_max = 8usize;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let control: Vec<f64> = (0..2 * m_max).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let phi = CircleModes::from_interleaved(
            (0..2 * k_max).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        )
        .unwrap();
        worst = worst.max(duality_identity_residual(&geometry, k_max, &control, &phi).unwrap());
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        6,
        "duality pairing identity",
        worst <= 1e-9 && elapsed < 5.0,
        &format!("max residual {worst:.3e} over 100 pairs (tol 1e-9), {elapsed:.2}s (budget 5s)"),
    );
}

/// 7. Invertibility audit of I + lambda*A*B for random SPSD pairs.
#[test]
fn criterion_07_invertibility_audit() {
    let start = Instant::now();
    let audit = invertibility_audit(200, 50, &[0.1, 1.0, 10.0], 7).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    report(
        7,
        "operator invertibility audit",
        audit.failures == 0 && audit.max_solve_residual <= 1e-8 && elapsed < 60.0,
        &format!(
            "{} failures over {} trials, max solve residual {:.3e} (tol 1e-8), {elapsed:.2}s (budget 60s)",
            audit.failures, audit.trials, audit.max_solve_residual
        ),
    );
}

/// 8. Density trend of the arc-control fit: weighted residual nonincreasing
///    in the control-basis size, final residual <= 1e-2.
#[test]
fn criterion_08_control_density_trend() {
    let start = Instant::now();
    let geometry = DiskGeometry::new(0.3, 1.0, 0.0, PI).unwrap();
    let k_max = 16usize;
    let mut target = CircleModes::zeros(k_max);
    target.set_cos(1, 1.0);
    let mut previous = f64::INFINITY;
    let mut monotone = true;
    let mut last = f64::INFINITY;
    let mut trend = Vec::new();
    for m_max in [8usize, 16, 32, 64] {
        let fit = approximate_control(&geometry, m_max, k_max, &target, 1e-10).unwrap();
        monotone &= fit.weighted_residual <= previous + 1e-12;
        previous = fit.weighted_residual;
        last = fit.weighted_residual;
        trend.push(format!("{m_max}:{:.3e}", fit.weighted_residual));
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        8,
        "control residual density trend",
        monotone && last <= 1e-2 && elapsed < 10.0,
        &format!(
            "residuals [{}] nonincreasing = {monotone}, final tol 1e-2, {elapsed:.2}s (budget 10s)",
            trend.join(", ")
        ),
    );
}

/// 9. Rational approximation: in-basis recovery, exp on the unit disk at
///    degree 12, and the time-varying blend on the rotating family.
#[test]
fn criterion_09_rational_approximation() {
    let start = Instant::now();
    let region = Region::disk(C64::new(0.0, 0.0), 1.0).unwrap();
    let fit_samples = region.boundary_samples(96, 0.0);
    let validation = region.boundary_samples(109, 0.37);

    let pole = C64::new(2.0, 0.5);
    let in_basis = runge_approximate(
        &|z| C64::new(1.0, 0.0) / (z - pole),
        &fit_samples,
        &validation,
        &[pole],
        6,
        1e-13,
    )
    .unwrap();

    let exp_fit = runge_approximate(&|z| z.exp(), &fit_samples, &validation, &[], 12, 1e-8).unwrap();

    let f = |t: f64, z: C64| (z + C64::new(0.1 * t, 0.0)).exp();
    let region_of_t = |t: f64| {
        let angle = std::f64::consts::TAU * t;
        Region::disk(C64::new(0.3 * angle.cos(), 0.3 * angle.sin()), 0.45).unwrap()
    };
    let blend = fit_time_varying(&f, &region_of_t, &[], 1e-3, 14, 1024).unwrap();

    let elapsed = start.elapsed().as_secs_f64();
    let pass = in_basis.validated_error <= 1e-13
        && exp_fit.validated_error <= 1e-8
        && exp_fit.degree <= 12
        && blend.validated_sup <= 1e-3
        && elapsed < 30.0;
    report(
        9,
        "rational approximation",
        pass,
        &format!(
            "in-basis {:.3e} (tol 1e-13), exp degree {} error {:.3e} (tol 1e-8), \
             blend sup {:.3e} over {} nodes (tol 1e-3), {elapsed:.2}s (budget 30s)",
            in_basis.validated_error,
            exp_fit.degree,
            exp_fit.validated_error,
            blend.validated_sup,
            blend.nodes
        ),
    );
}

/// 10. Partition of unity: weights sum to 1 within 1e-12 at 1001 points and
///     vanish exactly off the declared supports.
#[test]
fn criterion_10_partition_of_unity() {
    let mut sum_defect = 0.0f64;
    let mut support_exact = true;
    for n in [1usize, 2, 3, 5, 8] {
        let partition = Partition::equispaced(n).unwrap();
        for i in 0..=1000 {
            let t = i as f64 / 1000.0;
            let weights = partition.weights(t).unwrap();
            let sum: f64 = weights.iter().sum();
            sum_defect = sum_defect.max((sum - 1.0).abs());
            for (j, (&node, &w)) in partition.nodes().iter().zip(&weights).enumerate() {
                let inside = (t - node).abs() < partition.kappa();
                if !inside && w != 0.0 {
                    support_exact = false;
                    eprintln!("node {j} leaks at t = {t}");
                }
            }
        }
    }
    report(
        10,
        "partition of unity",
        sum_defect <= 1e-12 && support_exact,
        &format!("max |sum - 1| = {sum_defect:.3e} (tol 1e-12), supports exact = {support_exact}"),
    );
}

/// 11. Curve transport: quarter-turn accuracy, area conservation, and
///     forward-backward reversibility.
#[test]
fn criterion_11_curve_transport() {
    let start = Instant::now();
    let curve = JordanCurve::circle((0.0, 0.0), 1.0, 256).unwrap();
    let field = VelocityField::RigidRotation { omega: 1.0 };
    let turned = advect(&curve, &field, 0.0, PI / 2.0, 1000, None).unwrap();
    let mut vertex_err = 0.0f64;
    for (i, &(x, y)) in curve.vertices().iter().enumerate() {
        let (gx, gy) = turned.vertices()[i];
        vertex_err = vertex_err.max((gx + y).abs()).max((gy - x).abs());
    }
    let a0 = enclosed_area(&curve).unwrap();
    let a1 = enclosed_area(&turned).unwrap();
    let drift = (a1 - a0).abs() / a0;
    let back = advect(&turned, &field, PI / 2.0, 0.0, 1000, None).unwrap();
    let mut rev_err = 0.0f64;
    for (i, &(x, y)) in curve.vertices().iter().enumerate() {
        let (gx, gy) = back.vertices()[i];
        rev_err = rev_err.max((gx - x).abs()).max((gy - y).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        11,
        "curve transport",
        vertex_err <= 1e-10 && drift <= 1e-6 && rev_err <= 1e-8 && elapsed < 10.0,
        &format!(
            "quarter-turn error {vertex_err:.3e} (tol 1e-10), area drift {drift:.3e} (tol 1e-6), \
             reversibility {rev_err:.3e} (tol 1e-8), {elapsed:.2}s (budget 10s)"
        ),
    );
}

/// 12. Two runs of the binary with the same seed produce byte-identical
///     outputs (verification stdout and a written CSV).
#[test]
fn criterion_12_determinism() {
    let bin = env!("CARGO_BIN_EXE_lagflow");
    let run_verify = || {
        Command::new(bin)
            .args(["verify", "--seed", "11"])
            .output()
            .expect("verify run")
    };
    let first = run_verify();
    let second = run_verify();
    let verify_ok = first.status.success()
        && second.status.success()
        && first.stdout == second.stdout
        && !first.stdout.is_empty();

    let dir = tempfile::tempdir().expect("tempdir");
    let run_modes = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(bin)
            .args(["modes", "--l1", "3.141592653589793", "--l2", "1.0", "--variant", "robin"])
            .args(["--alpha", "0.5", "--kmax", "24", "--out"])
            .arg(&out)
            .status()
            .expect("modes run");
        assert!(status.success());
        std::fs::read(&out).expect("modes output")
    };
    let csv_ok = run_modes("a.csv") == run_modes("b.csv");

    report(
        12,
        "byte-identical reruns",
        verify_ok && csv_ok,
        &format!(
            "verify stdout identical = {}, modes CSV identical = {csv_ok}",
            first.stdout == second.stdout
        ),
    );
}
