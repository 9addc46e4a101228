//! `disk-control`: regularized fit of an arc-supported control whose
//! interface flux matches a target mode mixture, with a residual trend over
//! increasing control-basis sizes.

use std::path::Path;

use lagflow::diskop::{approximate_control, CircleModes, DiskGeometry};

use crate::io::{
    expect_header, fmt17, parse_f64, parse_usize, read_csv, usage, write_atomic, RunResult,
};
use crate::rect::sibling;

/// Reads a `k_sin_or_cos,k,value` table into interleaved circle modes.
fn read_target_modes(path: &Path, k_max: usize) -> RunResult<CircleModes> {
    let (header, rows) = read_csv(path)?;
    expect_header(path, &header, &["k_sin_or_cos", "k", "value"])?;
    if rows.is_empty() {
        return Err(usage(format!("{}: no target rows", path.display())));
    }
    let mut target = CircleModes::zeros(k_max);
    for row in &rows {
        if row.len() != 3 {
            return Err(usage(format!("{}: each row needs three fields", path.display())));
        }
        let k = parse_usize(path, "k", &row[1])?;
        if k == 0 || k > k_max {
            return Err(usage(format!(
                "{}: mode index {k} outside 1..={k_max}",
                path.display()
            )));
        }
        let value = parse_f64(path, "value", &row[2])?;
        match row[0].as_str() {
            "cos" => target.set_cos(k, target.cos(k) + value),
            "sin" => target.set_sin(k, target.sin(k) + value),
            other => {
                return Err(usage(format!(
                    "{}: k_sin_or_cos must be cos or sin, got {other:?}",
                    path.display()
                )))
            }
        }
    }
    Ok(target)
}

/// Control-basis sizes to sweep: doubling from 8 up to `k_control`, with
/// `k_control` itself always last.
fn sweep_sizes(k_control: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut m = 8usize;
    while m < k_control {
        sizes.push(m);
        m *= 2;
    }
    sizes.push(k_control);
    sizes
}

#[allow(clippy::too_many_arguments)]
pub fn run_disk_control(
    rho: f64,
    outer: f64,
    arc: (f64, f64),
    k_control: usize,
    k_max: usize,
    target_path: &Path,
    reg: f64,
    out: &Path,
) -> RunResult<()> {
    if k_control == 0 {
        return Err(usage("--K must be at least 1"));
    }
    let geometry = DiskGeometry::new(rho, outer, arc.0, arc.1)?;
    let target = read_target_modes(target_path, k_max)?;

    let mut residuals_csv = String::from("K_control,weighted_residual\n");
    let mut last = None;
    for m in sweep_sizes(k_control) {
        let fit = approximate_control(&geometry, m, k_max, &target, reg)?;
        residuals_csv.push_str(&format!("{m},{}\n", fmt17(fit.weighted_residual)));
        last = Some((m, fit));
    }
    let (m_final, fit) = last.expect("sweep is nonempty");

    let json = serde_json::json!({
        "rho": rho,
        "R": outer,
        "arc": [arc.0, arc.1],
        "K_control": m_final,
        "k_max": k_max,
        "reg": reg,
        "control": fit.control,
        "weighted_residual": fit.weighted_residual,
        "achieved_flux": fit.achieved.coeffs(),
        "dropped_singular_values": fit.dropped_singular_values,
    });
    let text = serde_json::to_string_pretty(&json)
        .map_err(|e| usage(format!("serializing control failed: {e}")))?;
    write_atomic(out, &(text + "\n"))?;
    write_atomic(&sibling(out, "residuals.csv"), &residuals_csv)
}
