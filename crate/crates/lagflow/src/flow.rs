//! Transport of Jordan curves by velocity fields: flow-map integration with
//! classical fixed-step Runge–Kutta, area and distance diagnostics, and the
//! Bernoulli pressure attached to a time-dependent potential.
//!
//! Velocity fields arrive from several sources — closed forms, gradients of
//! the rectangle series solutions, Cauchy–Riemann fields of rational
//! functions or their time-varying blends, and the assembled control
//! potential. All of them are divergence-free where defined, so enclosed
//! area is a conserved quantity that doubles as an integration diagnostic.
//! An optional domain guard turns any trajectory leaving the declared
//! region into a transport-escape error naming the first offending vertex,
//! matching the requirement that transported curves stay inside the domain.

use crate::cauchy::SeriesField;
use crate::error::{invalid, Error, Result};
use crate::runge::assemble::ControlPotential;
use crate::runge::blend::TimeVaryingRational;
use crate::runge::{cauchy_riemann_velocity, RationalFunction, C64};
use serde::{Deserialize, Serialize};

// -------------------------------------------------------------- curves

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
}

/// Closed simple polyline (the last vertex connects back to the first).
#[derive(Debug, Clone, PartialEq)]
pub struct JordanCurve {
    vertices: Vec<(f64, f64)>,
    orientation: Orientation,
}

fn shoelace(vertices: &[(f64, f64)]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for i in 0..n {
        let (x0, y0) = vertices[i];
        let (x1, y1) = vertices[(i + 1) % n];
        acc += x0 * y1 - x1 * y0;
    }
    0.5 * acc
}

/// Strict segment intersection (shared interior point or overlap); touching
/// at a shared endpoint is handled by the caller skipping adjacent pairs.
fn segments_cross(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    fn orient(p: (f64, f64), q: (f64, f64), r: (f64, f64)) -> f64 {
        (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0)
    }
    fn on_segment(p: (f64, f64), q: (f64, f64), r: (f64, f64)) -> bool {
        r.0 >= p.0.min(q.0) && r.0 <= p.0.max(q.0) && r.1 >= p.1.min(q.1) && r.1 <= p.1.max(q.1)
    }
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

fn is_simple(vertices: &[(f64, f64)]) -> bool {
    let n = vertices.len();
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        for j in i + 1..n {
            // Skip the segment itself and the two neighbors sharing a vertex.
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let c = vertices[j];
            let d = vertices[(j + 1) % n];
            if segments_cross(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

impl JordanCurve {
    /// Validates vertex count (>= 8), finiteness, simplicity, and a nonzero
    /// enclosed area; the orientation is read off the signed area.
    pub fn new(vertices: Vec<(f64, f64)>) -> Result<Self> {
        if vertices.len() < 8 {
            return Err(invalid("a curve needs at least 8 vertices"));
        }
        if vertices
            .iter()
            .any(|(x, y)| !x.is_finite() || !y.is_finite())
        {
            return Err(invalid("curve vertices must be finite"));
        }
        let area = shoelace(&vertices);
        if area == 0.0 {
            return Err(invalid("curve encloses no area"));
        }
        if !is_simple(&vertices) {
            return Err(invalid("curve must not self-intersect"));
        }
        let orientation = if area > 0.0 {
            Orientation::CounterClockwise
        } else {
            Orientation::Clockwise
        };
        Ok(Self {
            vertices,
            orientation,
        })
    }

    /// Regular polygon approximating a circle, counterclockwise.
    pub fn circle(center: (f64, f64), radius: f64, n: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid("circle radius must be positive"));
        }
        let vertices = (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                (center.0 + radius * t.cos(), center.1 + radius * t.sin())
            })
            .collect();
        Self::new(vertices)
    }

    /// Transported curves skip re-validation: smooth flows of simple curves
    /// stay simple in exact arithmetic, and area/simplicity checks are
    /// re-run by the diagnostics that need them.
    fn transported(vertices: Vec<(f64, f64)>, orientation: Orientation) -> Self {
        Self {
            vertices,
            orientation,
        }
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Reversed copy (opposite orientation).
    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        let orientation = match self.orientation {
            Orientation::CounterClockwise => Orientation::Clockwise,
            Orientation::Clockwise => Orientation::CounterClockwise,
        };
        Self {
            vertices,
            orientation,
        }
    }
}

/// Unsigned enclosed area by the shoelace formula; re-validates simplicity
/// because transported curves bypass construction checks.
pub fn enclosed_area(curve: &JordanCurve) -> Result<f64> {
    if !is_simple(curve.vertices()) {
        return Err(invalid("area of a self-intersecting curve is undefined"));
    }
    Ok(shoelace(curve.vertices()).abs())
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}

fn directed_hausdorff(from: &JordanCurve, to: &JordanCurve) -> f64 {
    let n = to.len();
    from.vertices()
        .iter()
        .map(|&p| {
            (0..n)
                .map(|j| point_segment_distance(p, to.vertices()[j], to.vertices()[(j + 1) % n]))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between closed polylines
/// (parameterization-free stand-in for the sup distance between curves).
pub fn curve_distance(a: &JordanCurve, b: &JordanCurve) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

// -------------------------------------------------------- velocity fields

/// Velocity field sources a curve can be transported by.
pub enum VelocityField<'a> {
    /// Identically zero.
    Zero,
    /// Rigid rotation `(-omega*y, omega*x)`.
    RigidRotation { omega: f64 },
    /// Horizontal shear `(rate*y, 0)`.
    Shear { rate: f64 },
    /// Gradient of a rectangle series solution (time-independent).
    SeriesGradient { field: &'a SeriesField },
    /// Cauchy–Riemann field of a static rational function.
    Rational { function: &'a RationalFunction },
    /// Cauchy–Riemann field of a time-varying rational blend.
    Blend { blend: &'a TimeVaryingRational },
    /// The assembled ramped control potential.
    Control { potential: &'a ControlPotential },
}

impl VelocityField<'_> {
    /// Velocity at `(t, x, y)`. May legitimately return non-finite values
    /// (e.g. at a pole); the integrator treats those as escapes.
    pub fn evaluate(&self, t: f64, x: f64, y: f64) -> Result<(f64, f64)> {
        match self {
            VelocityField::Zero => Ok((0.0, 0.0)),
            VelocityField::RigidRotation { omega } => Ok((-omega * y, omega * x)),
            VelocityField::Shear { rate } => Ok((rate * y, 0.0)),
            VelocityField::SeriesGradient { field } => field.gradient(x, y),
            VelocityField::Rational { function } => {
                Ok(cauchy_riemann_velocity(function.evaluate(C64::new(x, y))))
            }
            VelocityField::Blend { blend } => {
                Ok(cauchy_riemann_velocity(blend.value(t, C64::new(x, y))?))
            }
            VelocityField::Control { potential } => potential.velocity(t, x, y),
        }
    }
}

// --------------------------------------------------------------- advection

/// Transports a curve by the field with classical 4-stage Runge–Kutta at
/// fixed step `(t1 - t0)/steps` (negative spans integrate backwards). Every
/// stage point is checked against the optional domain guard; a violation or
/// a non-finite velocity aborts with a transport-escape error naming the
/// first offending vertex and time.
pub fn advect(
    curve: &JordanCurve,
    field: &VelocityField,
    t0: f64,
    t1: f64,
    steps: usize,
    domain: Option<&dyn Fn(f64, f64) -> bool>,
) -> Result<JordanCurve> {
    if steps == 0 {
        return Err(invalid("advection needs at least one step"));
    }
    if !(t0.is_finite() && t1.is_finite()) {
        return Err(invalid("advection times must be finite"));
    }
    let h = (t1 - t0) / steps as f64;
    let mut vertices = curve.vertices().to_vec();
    for (index, vertex) in vertices.iter_mut().enumerate() {
        let (mut x, mut y) = *vertex;
        for step in 0..steps {
            let t = t0 + step as f64 * h;
            let guard = |gx: f64, gy: f64, gt: f64| -> Result<()> {
                let inside = domain.map(|d| d(gx, gy)).unwrap_or(true);
                if !inside || !gx.is_finite() || !gy.is_finite() {
                    return Err(Error::TransportEscape {
                        vertex: index,
                        time: gt,
                        x: gx,
                        y: gy,
                    });
                }
                Ok(())
            };
            let eval = |ex: f64, ey: f64, et: f64| -> Result<(f64, f64)> {
                guard(ex, ey, et)?;
                // A stage point the field rejects (left its domain of
                // definition) is an escape, not a usage error.
                let (vx, vy) = match field.evaluate(et, ex, ey) {
                    Ok(v) => v,
                    Err(Error::InvalidInput(_)) => {
                        return Err(Error::TransportEscape {
                            vertex: index,
                            time: et,
                            x: ex,
                            y: ey,
                        })
                    }
                    Err(other) => return Err(other),
                };
                if !vx.is_finite() || !vy.is_finite() {
                    return Err(Error::TransportEscape {
                        vertex: index,
                        time: et,
                        x: ex,
                        y: ey,
                    });
                }
                Ok((vx, vy))
            };
            let (k1x, k1y) = eval(x, y, t)?;
            let (k2x, k2y) = eval(x + 0.5 * h * k1x, y + 0.5 * h * k1y, t + 0.5 * h)?;
            let (k3x, k3y) = eval(x + 0.5 * h * k2x, y + 0.5 * h * k2y, t + 0.5 * h)?;
            let (k4x, k4y) = eval(x + h * k3x, y + h * k3y, t + h)?;
            x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            guard(x, y, t + h)?;
        }
        *vertex = (x, y);
    }
    Ok(JordanCurve::transported(vertices, curve.orientation()))
}

// ---------------------------------------------------------------- pressure

/// Bernoulli pressure `p = -d(psi)/dt - |grad psi|^2 / 2` of a time-dependent
/// potential, by central differences with the same step `dt` in time and
/// space.
pub fn pressure_from_potential(
    psi: &dyn Fn(f64, f64, f64) -> f64,
    t: f64,
    x: f64,
    y: f64,
    dt: f64,
) -> f64 {
    let dpsi_dt = (psi(t + dt, x, y) - psi(t - dt, x, y)) / (2.0 * dt);
    let gx = (psi(t, x + dt, y) - psi(t, x - dt, y)) / (2.0 * dt);
    let gy = (psi(t, x, y + dt) - psi(t, x, y - dt)) / (2.0 * dt);
    -dpsi_dt - 0.5 * (gx * gx + gy * gy)
}
