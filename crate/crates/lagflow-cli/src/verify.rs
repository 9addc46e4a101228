//! `verify`: self-contained cross-checks pitting the spectral solvers
//! against the independent finite-difference oracle (and the exact duality
//! identity), one PASS/FAIL line per case.

use std::f64::consts::PI;

use lagflow::cauchy::{normal_derivative_bottom, solve_cauchy, solve_mixed, BoundaryData, Segment};
use lagflow::diskop::{duality_identity_residual, CircleModes, DiskGeometry};
use lagflow::fdsolve::{
    relative_difference, solve_polar, solve_rectangle, BoundaryCondition, Norm, PolarGrid,
    PolarProblem, RectangleGrid, RectangleProblem,
};
use lagflow::steklov::{eigenvalue, LateralCondition, RectangleDomain, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::io::{usage, RunResult};

pub const CASES: [&str; 5] = ["mixed", "cauchy", "disk-lambda1", "disk-lambda2", "duality"];

struct Outcome {
    case: &'static str,
    pass: bool,
    detail: String,
}

impl Outcome {
    fn line(&self) -> String {
        format!(
            "{}: {} ({})",
            self.case,
            if self.pass { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

/// Spectral mixed solve against the finite-difference oracle on a 257x257
/// grid, single top-flux modes k in {1, 2, 5}, mean-aligned relative L2.
fn case_mixed() -> RunResult<Outcome> {
    let domain = RectangleDomain::new(PI, 1.0)?;
    let lateral = LateralCondition::neumann();
    let n = 40;
    let cells = 256usize;
    let mut worst = 0.0f64;
    for k in [1usize, 2, 5] {
        let mut g = vec![0.0; n];
        g[k] = 1.0;
        let f0 = BoundaryData::new(Segment::Bottom, lateral, vec![0.0; n]);
        let g1 = BoundaryData::new(Segment::Top, lateral, g);
        let series = solve_mixed(&f0, &g1, &domain, n)?;

        let grid = RectangleGrid::new(domain, cells, cells)?;
        let top: Vec<f64> = (0..=cells)
            .map(|ix| g1.value(&domain, grid.node_x(ix)))
            .collect::<lagflow::Result<_>>()?;
        let problem = RectangleProblem {
            grid,
            lateral,
            bottom: BoundaryCondition::Dirichlet(vec![0.0; cells + 1]),
            top: BoundaryCondition::Neumann(top),
        };
        let fd = solve_rectangle(&problem)?;
        let g = fd.grid();
        let mut spectral = Vec::with_capacity((cells + 1) * (cells + 1));
        for iy in 0..=cells {
            for ix in 0..=cells {
                spectral.push(series.value(g.node_x(ix), g.node_y(iy))?);
            }
        }
        let rel = relative_difference(&spectral, fd.values(), Norm::L2, true);
        worst = worst.max(rel);
    }
    Ok(Outcome {
        case: "mixed",
        pass: worst <= 1e-3,
        detail: format!("max rel L2 error {worst:.6e}, tolerance 1.0e-3"),
    })
}

/// Cauchy round trip on compatible data: the solved field must reproduce
/// both the trace and the flux coefficientwise.
fn case_cauchy() -> RunResult<Outcome> {
    let domain = RectangleDomain::new(PI, 1.0)?;
    let lateral = LateralCondition::neumann();
    let n = 9;
    let mut f = vec![0.0; n];
    let mut g = vec![0.0; n];
    f[0] = 1.0;
    for k in 1..n {
        f[k] = 1.0 / ((1 + k) * (1 + k)) as f64;
        g[k] = eigenvalue(&domain, &lateral, Side::Bottom, k)? * f[k];
    }
    let fd = BoundaryData::new(Segment::Bottom, lateral, f.clone());
    let gd = BoundaryData::new(Segment::Bottom, lateral, g.clone());
    let field = solve_cauchy(&fd, &gd, &domain, &lateral, n)?;
    let flux = normal_derivative_bottom(&field);
    let mut err = 0.0f64;
    for k in 0..n {
        err = err.max((field.coeffs_bottom()[k] - f[k]).abs());
        err = err.max((flux.coeffs[k] - g[k]).abs());
    }
    Ok(Outcome {
        case: "cauchy",
        pass: err <= 1e-10,
        detail: format!("max coefficient round-trip error {err:.6e}, tolerance 1.0e-10"),
    })
}

/// Projects cell-sampled boundary values onto `cos(k theta)`.
fn cos_coefficient(values: &[f64], k: usize) -> f64 {
    let nt = values.len();
    let mut acc = 0.0;
    for (j, v) in values.iter().enumerate() {
        acc += v * (k as f64 * 2.0 * PI * j as f64 / nt as f64).cos();
    }
    2.0 * acc / nt as f64
}

/// Flux-to-trace diagonal on the annulus (0.3, 1), mode k = 2, against the
/// finite-difference trace of the all-Neumann annulus solve.
fn case_disk_lambda1() -> RunResult<Outcome> {
    let (rho, outer, k) = (0.3, 1.0, 2usize);
    let q: f64 = rho / outer;
    let exact = (rho / k as f64) * (1.0 + q.powi(2 * k as i32)) / (1.0 - q.powi(2 * k as i32));
    let (nr, nt) = (160usize, 256usize);
    let grid = PolarGrid::annulus(rho, outer, nr, nt)?;
    let inner: Vec<f64> = (0..nt).map(|j| (k as f64 * grid.theta(j)).cos()).collect();
    let problem = PolarProblem {
        grid,
        inner: Some(BoundaryCondition::Neumann(inner)),
        outer: BoundaryCondition::Neumann(vec![0.0; nt]),
    };
    let solution = solve_polar(&problem)?;
    let measured = cos_coefficient(&solution.inner_trace()?, k);
    let rel = ((measured - exact) / exact).abs();
    Ok(Outcome {
        case: "disk-lambda1",
        pass: rel <= 1e-2,
        detail: format!(
            "trace coefficient {measured:.6e} vs closed form {exact:.6e}, rel {rel:.3e}, tolerance 1.0e-2"
        ),
    })
}

/// Trace-to-flux diagonal on the disk of radius 0.3, mode k = 3 (closed
/// form k/rho = 10), against the finite-difference normal derivative.
fn case_disk_lambda2() -> RunResult<Outcome> {
    let (rho, k) = (0.3, 3usize);
    let exact = k as f64 / rho;
    let (nr, nt) = (160usize, 256usize);
    let grid = PolarGrid::disk(rho, nr, nt)?;
    let outer: Vec<f64> = (0..nt).map(|j| (k as f64 * grid.theta(j)).cos()).collect();
    let problem = PolarProblem {
        grid,
        inner: None,
        outer: BoundaryCondition::Dirichlet(outer),
    };
    let solution = solve_polar(&problem)?;
    let measured = cos_coefficient(&solution.outer_flux(), k);
    let rel = ((measured - exact) / exact).abs();
    Ok(Outcome {
        case: "disk-lambda2",
        pass: rel <= 1e-2,
        detail: format!(
            "flux coefficient {measured:.6e} vs closed form {exact:.6e}, rel {rel:.3e}, tolerance 1.0e-2"
        ),
    })
}

/// Exact pairing identity between the arc-control flux route and the
/// annulus-trace route, random controls and interface data.
fn case_duality(seed: u64) -> RunResult<Outcome> {
    let geometry = DiskGeometry::new(0.3, 1.0, 0.0, PI)?;
    let k_max = 32usize;
    let m_max = 8usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let control: Vec<f64> = (0..2 * m_max).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let phi = CircleModes::from_interleaved(
            (0..2 * k_max).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        )?;
        worst = worst.max(duality_identity_residual(&geometry, k_max, &control, &phi)?);
    }
    Ok(Outcome {
        case: "duality",
        pass: worst <= 1e-9,
        detail: format!("max pairing residual {worst:.6e} over 10 seeded pairs, tolerance 1.0e-9"),
    })
}

/// Runs the requested case (or all of them), printing one line each;
/// returns Err (computational failure) if any case fails.
pub fn run_verify(case: Option<&str>, seed: u64) -> RunResult<()> {
    let selected: Vec<&str> = match case {
        None => CASES.to_vec(),
        Some(c) if CASES.contains(&c) => vec![c],
        Some(other) => {
            return Err(usage(format!(
                "unknown case {other:?}; expected one of {}",
                CASES.join(", ")
            )))
        }
    };
    let mut failures = 0usize;
    for name in selected {
        let outcome = match name {
            "mixed" => case_mixed()?,
            "cauchy" => case_cauchy()?,
            "disk-lambda1" => case_disk_lambda1()?,
            "disk-lambda2" => case_disk_lambda2()?,
            "duality" => case_duality(seed)?,
            _ => unreachable!("cases filtered above"),
        };
        println!("{}", outcome.line());
        if !outcome.pass {
            failures += 1;
        }
    }
    if failures > 0 {
        return Err(crate::io::compute(format!("{failures} verification case(s) failed")));
    }
    Ok(())
}
