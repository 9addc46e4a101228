//! Assembly of the boundary-corrected, smoothly ramped control potential.
//!
//! Three ingredients combine into the final time-dependent holomorphic
//! velocity generator on the disk:
//!
//! 1. the time-varying rational blend (optionally multiplied by an
//!    indicator cutoff polynomial),
//! 2. minus the complex gradients of harmonic correction fields whose
//!    Neumann data cancel the blend's normal flux off the control arc,
//! 3. all multiplied by a smooth ramp that vanishes at `t = 0, 1` and is
//!    exactly `1` on the inner plateau — so the control switches on and off
//!    smoothly without touching the midcourse behavior.

use super::blend::TimeVaryingRational;
use super::partition::smooth_step;
use super::C64;
use crate::diskop::{disk_from_boundary_flux, CircleModes, DiskGeometry, HarmonicDiskField};
use crate::error::{invalid, Result};
use std::f64::consts::{PI, TAU};

// -------------------------------------------------- harmonic correction

/// Result of extending complement-arc Neumann data to the full circle and
/// solving the disk problem it drives.
#[derive(Debug, Clone)]
pub struct HarmonicCorrection {
    /// The harmonic field on the disk.
    pub field: HarmonicDiskField,
    /// Mean-free Neumann modes actually used (the extension's expansion).
    pub modes: CircleModes,
    /// Stability witness: sup of the field's boundary trace over the sup of
    /// the given data (0 for zero data).
    pub amplification: f64,
}

/// Extends Neumann data given on the complement of the control arc to the
/// whole circle — keeping it as-is off the arc, cosine-tapering across the
/// arc between the two edge values — removes the mean, expands in circle
/// modes by periodic trapezoid quadrature, and solves the disk Neumann
/// problem spectrally.
///
/// `data` receives angles in `[arc_end, arc_start + 2*pi]` (the complement).
pub fn harmonic_correction(
    geometry: &DiskGeometry,
    data: &dyn Fn(f64) -> f64,
    k_max: usize,
    quadrature_points: usize,
) -> Result<HarmonicCorrection> {
    if k_max == 0 {
        return Err(invalid("correction needs at least one mode"));
    }
    if quadrature_points < 4 * k_max {
        return Err(invalid(
            "correction quadrature needs at least four points per mode",
        ));
    }
    let (theta_a, theta_b) = geometry.arc();
    let extension = |theta: f64| -> f64 {
        // Reduce to [theta_a, theta_a + 2*pi).
        let mut th = (theta - theta_a).rem_euclid(TAU) + theta_a;
        if th >= theta_a + TAU {
            th -= TAU;
        }
        if th >= theta_b {
            data(th)
        } else {
            let s = (th - theta_a) / (theta_b - theta_a);
            let w = 0.5 * (1.0 + (PI * s).cos());
            w * data(theta_a + TAU) + (1.0 - w) * data(theta_b)
        }
    };
    let n = quadrature_points;
    let dt = TAU / n as f64;
    let mut modes = CircleModes::zeros(k_max);
    let mut sup_data = 0.0f64;
    for i in 0..n {
        let th = theta_a + i as f64 * dt;
        let v = extension(th);
        if th >= theta_b {
            sup_data = sup_data.max(v.abs());
        }
        for k in 1..=k_max {
            let (s, c) = (k as f64 * th).sin_cos();
            modes.set_cos(k, modes.cos(k) + v * c * dt / PI);
            modes.set_sin(k, modes.sin(k) + v * s * dt / PI);
        }
    }
    let field = disk_from_boundary_flux(geometry, &modes)?;
    let trace = field.trace_modes(geometry.outer_radius())?;
    let mut sup_trace = 0.0f64;
    for i in 0..n {
        sup_trace = sup_trace.max(trace.value(i as f64 * dt).abs());
    }
    let amplification = if sup_data > 0.0 { sup_trace / sup_data } else { 0.0 };
    Ok(HarmonicCorrection {
        field,
        modes,
        amplification,
    })
}

/// Complex derivative `G'(z)` of the analytic completion of a disk field
/// `zeta = Re G`: the attached velocity `(Re G', -Im G')` equals
/// `grad zeta`.
pub fn disk_field_complex_gradient(field: &HarmonicDiskField, z: C64) -> Result<C64> {
    if !field.inner_coeffs().is_empty() {
        return Err(invalid("complex gradient implemented for disk fields only"));
    }
    let (_, r_outer) = field.radii();
    let coeffs = field.outer_coeffs();
    let zr = z / C64::new(r_outer, 0.0);
    let mut acc = C64::new(0.0, 0.0);
    let mut power = C64::new(1.0, 0.0); // (z/R)^{k-1}
    for k in 1..=field.k_max() {
        let c = coeffs[2 * (k - 1)];
        let s = coeffs[2 * (k - 1) + 1];
        acc += C64::new(k as f64 / r_outer, 0.0) * C64::new(c, -s) * power;
        power *= zr;
    }
    Ok(acc)
}

// ---------------------------------------------------------- smooth ramp

/// Smooth on/off ramp: exactly `0` at `t <= 0` and `t >= 1`, exactly `1` on
/// `[eta, 1 - eta]`, infinitely smooth in between.
#[derive(Debug, Clone, Copy)]
pub struct SmoothRamp {
    eta: f64,
}

impl SmoothRamp {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta.is_finite() && 0.0 < eta && eta < 0.5) {
            return Err(invalid("ramp width must satisfy 0 < eta < 1/2"));
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn value(&self, t: f64) -> f64 {
        smooth_step(t / self.eta) * smooth_step((1.0 - t) / self.eta)
    }
}

// ----------------------------------------------------- control potential

/// The assembled time-dependent holomorphic velocity generator:
/// `ramp(t) * (cutoff(z) * blend(t, z) - sum_j phi_j(t) G_j'(z))`.
#[derive(Debug, Clone)]
pub struct ControlPotential {
    blend: TimeVaryingRational,
    cutoff: Option<Vec<C64>>,
    corrections: Vec<HarmonicDiskField>,
    ramp: SmoothRamp,
}

impl ControlPotential {
    /// `corrections` must be empty (no correction) or hold one disk field
    /// per partition node.
    pub fn new(
        blend: TimeVaryingRational,
        corrections: Vec<HarmonicDiskField>,
        cutoff: Option<Vec<C64>>,
        ramp: SmoothRamp,
    ) -> Result<Self> {
        if !corrections.is_empty() && corrections.len() != blend.partition().len() {
            return Err(invalid(
                "corrections must match the blend's partition nodes",
            ));
        }
        if corrections.iter().any(|f| !f.inner_coeffs().is_empty()) {
            return Err(invalid("corrections must be disk fields"));
        }
        Ok(Self {
            blend,
            cutoff,
            corrections,
            ramp,
        })
    }

    pub fn ramp(&self) -> &SmoothRamp {
        &self.ramp
    }

    pub fn blend(&self) -> &TimeVaryingRational {
        &self.blend
    }

    /// The holomorphic value whose Cauchy–Riemann field is the velocity.
    pub fn holomorphic_value(&self, t: f64, z: C64) -> Result<C64> {
        let rho = self.ramp.value(t);
        if rho == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let mut value = self.blend.value(t, z)?;
        if let Some(poly) = &self.cutoff {
            let mut p = C64::new(0.0, 0.0);
            for c in poly.iter().rev() {
                p = p * z + c;
            }
            value *= p;
        }
        if !self.corrections.is_empty() {
            let weights = self.blend.partition().weights(t)?;
            for j in self.blend.partition().active(t) {
                if weights[j] != 0.0 {
                    value -= C64::new(weights[j], 0.0)
                        * disk_field_complex_gradient(&self.corrections[j], z)?;
                }
            }
        }
        Ok(C64::new(rho, 0.0) * value)
    }

    /// Velocity `(Re w, -Im w)` of the holomorphic value `w`; identically
    /// zero at `t = 0` and `t = 1` by the ramp.
    pub fn velocity(&self, t: f64, x: f64, y: f64) -> Result<(f64, f64)> {
        let w = self.holomorphic_value(t, C64::new(x, y))?;
        Ok(super::cauchy_riemann_velocity(w))
    }
}
