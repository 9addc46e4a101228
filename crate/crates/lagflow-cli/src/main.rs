//! `lagflow` — spectral boundary machinery on the command line.
//!
//! Exit codes: 0 on success, 1 on computational failure (non-convergence,
//! unmet approximation targets, transport escapes, failed verification),
//! 2 on usage errors (unknown flags, malformed inputs, violated
//! preconditions). Every failure prints a one-line machine-parsable reason
//! on stderr. All file outputs are written atomically (temp file + rename),
//! numbers as decimal text with 17 significant digits; identical inputs and
//! seed produce byte-identical outputs.

mod approx;
mod disk;
mod io;
mod rect;
mod transport;
mod verify;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use io::{parse_pair, usage, RunResult};

#[derive(Parser)]
#[command(
    name = "lagflow",
    version,
    about = "Steklov eigenmode tables, harmonic Cauchy solves, boundary control design, disk-operator fits, rational approximation, partitions of unity, curve transport, and self-verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate boundary eigenvalues and transverse frequencies of the rectangle
    Modes {
        /// Horizontal side length
        #[arg(long)]
        l1: f64,
        /// Vertical side length
        #[arg(long)]
        l2: f64,
        /// Lateral condition on the vertical sides: neumann, dirichlet, or robin
        #[arg(long, default_value = "neumann")]
        variant: String,
        /// Robin parameter (robin variant only)
        #[arg(long)]
        alpha: Option<f64>,
        /// Largest transverse index tabulated
        #[arg(long)]
        kmax: usize,
        /// Output CSV (j,k,eigenvalue,transverse_frequency)
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve the two-data (trace + flux) boundary problem from a JSON config
    Cauchy {
        /// JSON config: {domain:{l1,l2,lstar?}, variant, alpha?, N, f0:[..], g0:[..]}
        #[arg(long)]
        config: PathBuf,
        /// Output field JSON ({coeffs0, coeffs1, domain, variant})
        #[arg(long)]
        out: PathBuf,
    },
    /// Design bottom-side data that reproduces a target flux on an interior line
    Design {
        /// Target CSV with header k,a_k
        #[arg(long)]
        target: PathBuf,
        /// Interior line height (must satisfy 0 < lstar < l2)
        #[arg(long)]
        lstar: f64,
        /// Horizontal side length
        #[arg(long, default_value_t = std::f64::consts::PI)]
        l1: f64,
        /// Vertical side length
        #[arg(long, default_value_t = 1.0)]
        l2: f64,
        /// Output control JSON
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit per-mode amplification factors and compatibility partial sums
    Diagnose {
        /// Same JSON config as `cauchy`; domain.lstar is required
        #[arg(long)]
        config: PathBuf,
        /// Output CSV (k,amplification,clcns_partial_sum)
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit an arc-supported control whose interface flux matches a target
    DiskControl {
        /// Interface circle radius
        #[arg(long)]
        rho: f64,
        /// Outer circle radius
        #[arg(long = "R")]
        outer: f64,
        /// Control arc as THETA_START,THETA_END (radians in [0, 2pi))
        #[arg(long)]
        arc: String,
        /// Control-basis size (the residual trend sweeps doubling sizes up to this)
        #[arg(long = "K")]
        k_control: usize,
        /// Circle-mode truncation of the fit
        #[arg(long, default_value_t = 32)]
        kmax: usize,
        /// Target CSV with header k_sin_or_cos,k,value
        #[arg(long)]
        target: PathBuf,
        /// Tikhonov weight (0 selects a pseudo-inverse with drop tolerance)
        #[arg(long, default_value_t = 0.0)]
        reg: f64,
        /// Output control JSON; residuals.csv is written next to it
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a rational function with prescribed poles on a disk region
    Runge {
        /// Target: exp, rational:RE,IM (simple pole), or file:PATH (rational JSON)
        #[arg(long)]
        function: String,
        /// Disk region as CENTER_RE,CENTER_IM,RADIUS
        #[arg(long)]
        region: String,
        /// Prescribed pole location RE,IM (repeatable)
        #[arg(long)]
        poles: Vec<String>,
        /// Sup-error target on the region
        #[arg(long)]
        eps: f64,
        /// Largest polynomial/pole-stack degree tried
        #[arg(long, default_value_t = 24)]
        degree_budget: usize,
        /// Output rational JSON ({poles:[{re,im,order}], coeffs, poly})
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample a smooth partition of unity on [0, 1]
    Blend {
        /// Number of partition nodes
        #[arg(long)]
        nodes: usize,
        /// Half-width of each bump (default 1/nodes)
        #[arg(long)]
        kappa: Option<f64>,
        /// Number of sample rows
        #[arg(long, default_value_t = 1001)]
        samples: usize,
        /// Output CSV (t,phi_1..phi_n)
        #[arg(long)]
        out: PathBuf,
    },
    /// Transport a polygonal curve along a velocity field
    Flow {
        /// Curve CSV with header x,y (closed implicitly)
        #[arg(long)]
        curve: PathBuf,
        /// Field JSON (a `cauchy` field file or a `runge` rational file)
        #[arg(long)]
        field: Option<PathBuf>,
        /// Built-in field: rotation, shear, or zero
        #[arg(long)]
        builtin: Option<String>,
        /// Start time
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        /// End time
        #[arg(long, default_value_t = 1.0)]
        t1: f64,
        /// Total integration steps across [t0, t1]
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Number of snapshot curves to emit (curve_t000.csv is the input)
        #[arg(long, default_value_t = 1)]
        snapshots: usize,
        /// Optional comparison curve; adds distance_to_target to metrics.csv
        #[arg(long)]
        target: Option<PathBuf>,
        /// Directory for curve_t*.csv and metrics.csv
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Cross-check the spectral solvers against the finite-difference oracle
    Verify {
        /// One of mixed, cauchy, disk-lambda1, disk-lambda2, duality (default: all)
        #[arg(long)]
        case: Option<String>,
        /// Seed for the randomized cases (env LAGFLOW_SEED overrides)
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn dispatch(cli: Cli) -> RunResult<()> {
    match cli.command {
        Command::Modes {
            l1,
            l2,
            variant,
            alpha,
            kmax,
            out,
        } => rect::run_modes(l1, l2, &variant, alpha, kmax, &out),
        Command::Cauchy { config, out } => rect::run_cauchy(&config, &out),
        Command::Design {
            target,
            lstar,
            l1,
            l2,
            out,
        } => rect::run_design(&target, lstar, l1, l2, &out),
        Command::Diagnose { config, out } => rect::run_diagnose(&config, &out),
        Command::DiskControl {
            rho,
            outer,
            arc,
            k_control,
            kmax,
            target,
            reg,
            out,
        } => {
            let arc = parse_pair("arc", &arc)?;
            disk::run_disk_control(rho, outer, arc, k_control, kmax, &target, reg, &out)
        }
        Command::Runge {
            function,
            region,
            poles,
            eps,
            degree_budget,
            out,
        } => approx::run_runge(&function, &region, &poles, eps, degree_budget, &out),
        Command::Blend {
            nodes,
            kappa,
            samples,
            out,
        } => approx::run_blend(nodes, kappa, samples, &out),
        Command::Flow {
            curve,
            field,
            builtin,
            t0,
            t1,
            steps,
            snapshots,
            target,
            out_dir,
        } => transport::run_flow(
            &curve,
            field.as_deref(),
            builtin.as_deref(),
            t0,
            t1,
            steps,
            snapshots,
            target.as_deref(),
            &out_dir,
        ),
        Command::Verify { case, seed } => {
            let seed = match std::env::var("LAGFLOW_SEED") {
                Ok(raw) => raw
                    .parse::<u64>()
                    .map_err(|_| usage(format!("LAGFLOW_SEED is not a u64: {raw:?}")))?,
                Err(_) => seed,
            };
            verify::run_verify(case.as_deref(), seed)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(failure) = dispatch(cli) {
        eprintln!("{failure}");
        std::process::exit(failure.exit_code());
    }
}
