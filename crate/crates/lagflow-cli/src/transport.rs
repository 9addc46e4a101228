//! `flow`: transports a polygonal curve along a velocity field, emitting
//! snapshot curves and per-snapshot area/distance metrics.

use std::path::Path;

use lagflow::cauchy::SeriesField;
use lagflow::flow::{advect, curve_distance, enclosed_area, JordanCurve, VelocityField};
use lagflow::runge::RationalFunction;

use crate::approx::load_rational;
use crate::io::{compute, expect_header, fmt17, parse_f64, read_csv, read_to_string, usage};
use crate::io::{write_atomic, RunResult};
use crate::rect::FieldFile;

pub fn read_curve(path: &Path) -> RunResult<JordanCurve> {
    let (header, rows) = read_csv(path)?;
    expect_header(path, &header, &["x", "y"])?;
    let mut vertices = Vec::with_capacity(rows.len());
    for row in &rows {
        if row.len() != 2 {
            return Err(usage(format!("{}: each row needs two fields", path.display())));
        }
        vertices.push((parse_f64(path, "x", &row[0])?, parse_f64(path, "y", &row[1])?));
    }
    Ok(JordanCurve::new(vertices)?)
}

fn curve_csv(curve: &JordanCurve) -> String {
    let mut csv = String::from("x,y\n");
    for &(x, y) in curve.vertices() {
        csv.push_str(&format!("{},{}\n", fmt17(x), fmt17(y)));
    }
    csv
}

/// Owned field data; the velocity field borrows from it per advection call.
enum FieldStorage {
    Zero,
    Rotation,
    Shear,
    Series(SeriesField),
    Rational(RationalFunction),
}

impl FieldStorage {
    fn velocity(&self) -> VelocityField<'_> {
        match self {
            FieldStorage::Zero => VelocityField::Zero,
            FieldStorage::Rotation => VelocityField::RigidRotation { omega: 1.0 },
            FieldStorage::Shear => VelocityField::Shear { rate: 1.0 },
            FieldStorage::Series(field) => VelocityField::SeriesGradient { field },
            FieldStorage::Rational(function) => VelocityField::Rational { function },
        }
    }
}

fn load_field(
    field_path: Option<&Path>,
    builtin: Option<&str>,
) -> RunResult<FieldStorage> {
    match (field_path, builtin) {
        (Some(_), Some(_)) => Err(usage("--field and --builtin are mutually exclusive")),
        (None, None) => Err(usage("one of --field or --builtin is required")),
        (None, Some(name)) => match name {
            "rotation" => Ok(FieldStorage::Rotation),
            "shear" => Ok(FieldStorage::Shear),
            "zero" => Ok(FieldStorage::Zero),
            other => Err(usage(format!(
                "unknown builtin {other:?}; expected rotation, shear, or zero"
            ))),
        },
        (Some(path), None) => {
            let text = read_to_string(path)?;
            let json: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| usage(format!("{}: bad JSON: {e}", path.display())))?;
            // The file kind is sniffed from its schema: series fields carry
            // coefficient families, rational functions carry a polynomial part.
            if json.get("coeffs0").is_some() {
                Ok(FieldStorage::Series(FieldFile::load(path, &json)?))
            } else if json.get("poly").is_some() {
                Ok(FieldStorage::Rational(load_rational(path, &json)?))
            } else {
                Err(usage(format!(
                    "{}: unrecognized field file (neither coeffs0 nor poly present)",
                    path.display()
                )))
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn run_flow(
    curve_path: &Path,
    field_path: Option<&Path>,
    builtin: Option<&str>,
    t0: f64,
    t1: f64,
    steps: usize,
    snapshots: usize,
    target_path: Option<&Path>,
    out_dir: &Path,
) -> RunResult<()> {
    if snapshots == 0 || snapshots > 999 {
        return Err(usage("--snapshots must lie in 1..=999"));
    }
    if steps < snapshots {
        return Err(usage("--steps must be at least --snapshots"));
    }
    let curve = read_curve(curve_path)?;
    let storage = load_field(field_path, builtin)?;
    let field = storage.velocity();
    let target = target_path.map(read_curve).transpose()?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| usage(format!("creating {} failed: {e}", out_dir.display())))?;

    let mut metrics = String::from(if target.is_some() {
        "t,area,distance_to_target\n"
    } else {
        "t,area\n"
    });
    let mut current = curve;
    let mut metric_row = |t: f64, c: &JordanCurve| -> RunResult<()> {
        // A transported curve that lost simplicity is a runtime failure of
        // the transport, not a usage error.
        let area = enclosed_area(c).map_err(|e| compute(e.to_string()))?;
        metrics.push_str(&fmt17(t));
        metrics.push(',');
        metrics.push_str(&fmt17(area));
        if let Some(tc) = &target {
            metrics.push(',');
            metrics.push_str(&fmt17(curve_distance(c, tc)));
        }
        metrics.push('\n');
        Ok(())
    };

    write_atomic(&out_dir.join("curve_t000.csv"), &curve_csv(&current))?;
    metric_row(t0, &current)?;
    // Cumulative step allocation: snapshot i has seen floor(steps*i/n)
    // steps, so the segment counts sum to exactly `steps`.
    let mut done_steps = 0usize;
    let mut t_prev = t0;
    for i in 1..=snapshots {
        let cum = steps * i / snapshots;
        let seg_steps = cum - done_steps;
        let t_next = t0 + (t1 - t0) * i as f64 / snapshots as f64;
        if seg_steps > 0 {
            current = advect(&current, &field, t_prev, t_next, seg_steps, None)?;
        }
        write_atomic(
            &out_dir.join(format!("curve_t{i:03}.csv")),
            &curve_csv(&current),
        )?;
        metric_row(t_next, &current)?;
        done_steps = cum;
        t_prev = t_next;
    }
    write_atomic(&out_dir.join("metrics.csv"), &metrics)
}
