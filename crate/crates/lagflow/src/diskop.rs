//! Boundary operators on a concentric-disk geometry.
//!
//! The region is the disk of radius `R`; the interface is the inner circle
//! of radius `rho`, splitting it into the inner disk and the annulus.
//! Controls are Neumann data supported on an arc of the outer circle. On
//! this geometry every operator acts mode-by-mode on the trigonometric
//! modes `cos k\theta`, `sin k\theta` (`k >= 1`; the mean is excluded
//! throughout):
//!
//! * [`neumann_to_dirichlet`] — annulus solve with zero outer flux: flux on
//!   the interface to trace on the interface, diagonal
//!   `(rho/k) (1 + q^{2k})/(1 - q^{2k})` with `q = rho/R`;
//! * [`dirichlet_to_neumann`] — inner-disk solve: trace to outward flux,
//!   diagonal `k/rho`;
//! * [`coupling`] — `I` plus the composition of the two (diagonal
//!   `2/(1 - q^{2k})`, always `> 1`, hence always invertible);
//! * [`control_to_flux`] — the dense map from an arc-supported control basis
//!   to the flux it drives through the interface. Its singular values decay
//!   geometrically like `q^{k-1}`: the control problem is severely
//!   ill-posed, which is why [`approximate_control`] regularizes.
//!
//! The whole-disk field driven by a control `v` has mode coefficients
//! `v_k/(k R^{k-1})`, so its flux across the interface (inward normal) is
//! `-q^{k-1} v_k`. Green's identities tie these operators together; the
//! checkable form is the pairing identity of [`duality_identity_residual`].

use crate::error::{invalid, Result};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Concentric-disk geometry: outer radius, interface radius, and the closed
/// angular arc of the outer circle that supports controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskGeometry {
    rho: f64,
    outer: f64,
    arc_start: f64,
    arc_end: f64,
}

impl DiskGeometry {
    /// `0 < rho < outer`; the arc `[arc_start, arc_end]` must have positive
    /// length strictly less than the full circle.
    pub fn new(rho: f64, outer: f64, arc_start: f64, arc_end: f64) -> Result<Self> {
        if !(rho.is_finite() && outer.is_finite() && 0.0 < rho && rho < outer) {
            return Err(invalid(format!(
                "interface radius must satisfy 0 < rho < R, got rho = {rho}, R = {outer}"
            )));
        }
        if !(arc_start.is_finite() && arc_end.is_finite())
            || !(0.0..TAU).contains(&arc_start)
            || arc_end <= arc_start
            || arc_end - arc_start >= TAU
            || arc_end > TAU
        {
            return Err(invalid(format!(
                "control arc must be a proper subinterval of [0, 2pi), got [{arc_start}, {arc_end}]"
            )));
        }
        Ok(Self {
            rho,
            outer,
            arc_start,
            arc_end,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer
    }

    /// Radius ratio `rho/R` — the per-mode decay of the control-to-flux map.
    pub fn q(&self) -> f64 {
        self.rho / self.outer
    }

    pub fn arc(&self) -> (f64, f64) {
        (self.arc_start, self.arc_end)
    }

    pub fn arc_length(&self) -> f64 {
        self.arc_end - self.arc_start
    }
}

// ----------------------------------------------------------- circle modes

/// Mean-zero function on a circle as interleaved trigonometric coefficients
/// `[a_1, b_1, a_2, b_2, ...]` for `a_k cos(k theta) + b_k sin(k theta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleModes {
    coeffs: Vec<f64>,
}

impl CircleModes {
    pub fn zeros(k_max: usize) -> Self {
        Self {
            coeffs: vec![0.0; 2 * k_max],
        }
    }

    /// Interleaved `[a_1, b_1, a_2, b_2, ...]`; the length must be even.
    pub fn from_interleaved(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() % 2 != 0 {
            return Err(invalid("circle modes need a nonempty, even-length coefficient vector"));
        }
        Ok(Self { coeffs })
    }

    /// Number of trigonometric mode pairs.
    pub fn k_max(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `cos(k theta)` coefficient, `1 <= k <= k_max`.
    pub fn cos(&self, k: usize) -> f64 {
        self.coeffs[2 * (k - 1)]
    }

    /// `sin(k theta)` coefficient, `1 <= k <= k_max`.
    pub fn sin(&self, k: usize) -> f64 {
        self.coeffs[2 * (k - 1) + 1]
    }

    pub fn set_cos(&mut self, k: usize, value: f64) {
        self.coeffs[2 * (k - 1)] = value;
    }

    pub fn set_sin(&mut self, k: usize, value: f64) {
        self.coeffs[2 * (k - 1) + 1] = value;
    }

    pub fn value(&self, theta: f64) -> f64 {
        let mut acc = 0.0;
        for k in 1..=self.k_max() {
            let kt = k as f64 * theta;
            acc += self.cos(k) * kt.cos() + self.sin(k) * kt.sin();
        }
        acc
    }

    /// `integral u v ds` on a circle of the given radius
    /// (`= radius * pi * sum of coefficient products` for mean-zero data).
    pub fn pairing(&self, other: &CircleModes, radius: f64) -> f64 {
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut acc = 0.0;
        for i in 0..n {
            acc += self.coeffs[i] * other.coeffs[i];
        }
        radius * PI * acc
    }

    /// Norm with the `1/k` mode weight (the trace-flux dual to the `k`
    /// weight), with the circle's arc-length measure.
    pub fn weighted_flux_norm(&self, radius: f64) -> f64 {
        let mut acc = 0.0;
        for k in 1..=self.k_max() {
            acc += (self.cos(k).powi(2) + self.sin(k).powi(2)) / k as f64;
        }
        (radius * PI * acc).sqrt()
    }
}

// ------------------------------------------------------------- operators

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    /// Annulus: interface flux to interface trace.
    NeumannToDirichlet,
    /// Inner disk: interface trace to outward interface flux.
    DirichletToNeumann,
    /// `I + (NeumannToDirichlet)(DirichletToNeumann)` on the interface.
    Coupling,
    /// Arc-supported control to the flux it drives through the interface.
    ControlToFlux,
}

#[derive(Debug, Clone, PartialEq)]
enum OperatorData {
    /// One entry per mode `k`, acting identically on `cos` and `sin`.
    Diagonal(Vec<f64>),
    /// Dense matrix from interleaved arc-basis coefficients to interleaved
    /// circle modes.
    Dense(DMatrix<f64>),
}

/// A boundary operator in its spectral realization.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOperator {
    kind: OperatorKind,
    k_max: usize,
    data: OperatorData,
}

impl SpectralOperator {
    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    /// Number of interface mode pairs the operator produces.
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Per-mode diagonal, if the operator is diagonal.
    pub fn diagonal(&self) -> Option<&[f64]> {
        match &self.data {
            OperatorData::Diagonal(d) => Some(d),
            OperatorData::Dense(_) => None,
        }
    }

    pub fn matrix(&self) -> Option<&DMatrix<f64>> {
        match &self.data {
            OperatorData::Dense(m) => Some(m),
            OperatorData::Diagonal(_) => None,
        }
    }

    /// Applies a diagonal operator to interface modes.
    pub fn apply(&self, input: &CircleModes) -> Result<CircleModes> {
        match &self.data {
            OperatorData::Diagonal(d) => {
                if input.k_max() > d.len() {
                    return Err(invalid(format!(
                        "operator holds {} modes, input has {}",
                        d.len(),
                        input.k_max()
                    )));
                }
                let mut out = CircleModes::zeros(input.k_max());
                for k in 1..=input.k_max() {
                    out.set_cos(k, d[k - 1] * input.cos(k));
                    out.set_sin(k, d[k - 1] * input.sin(k));
                }
                Ok(out)
            }
            OperatorData::Dense(_) => Err(invalid(
                "dense control operator takes arc coefficients; use apply_control",
            )),
        }
    }

    /// Applies the dense control operator to interleaved arc-basis
    /// coefficients.
    pub fn apply_control(&self, arc_coeffs: &[f64]) -> Result<CircleModes> {
        let m = self
            .matrix()
            .ok_or_else(|| invalid("apply_control needs the dense control operator"))?;
        if arc_coeffs.len() != m.ncols() {
            return Err(invalid(format!(
                "control operator takes {} arc coefficients, got {}",
                m.ncols(),
                arc_coeffs.len()
            )));
        }
        let v = nalgebra::DVector::from_column_slice(arc_coeffs);
        let out = m * v;
        CircleModes::from_interleaved(out.data.into())
    }

    /// Transpose action of the dense control operator (interface modes back
    /// to arc coefficients); `pairing(apply_control(v), phi) ==
    /// dot(v, apply_control_transpose(phi)) * radius * pi` exactly.
    pub fn apply_control_transpose(&self, modes: &CircleModes) -> Result<Vec<f64>> {
        let m = self
            .matrix()
            .ok_or_else(|| invalid("apply_control_transpose needs the dense control operator"))?;
        if modes.coeffs().len() != m.nrows() {
            return Err(invalid(format!(
                "control operator produces {} mode coefficients, got {}",
                m.nrows(),
                modes.coeffs().len()
            )));
        }
        let v = nalgebra::DVector::from_column_slice(modes.coeffs());
        Ok((m.transpose() * v).data.into())
    }

    /// Singular values, descending. For diagonal operators these are the
    /// magnitudes of the entries, each doubled (cos and sin).
    pub fn singular_values(&self) -> Vec<f64> {
        match &self.data {
            OperatorData::Diagonal(d) => {
                let mut s: Vec<f64> = d.iter().flat_map(|x| [x.abs(), x.abs()]).collect();
                s.sort_by(|a, b| b.partial_cmp(a).unwrap());
                s
            }
            OperatorData::Dense(m) => {
                let svd = m.clone().svd(false, false);
                let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
                s.sort_by(|a, b| b.partial_cmp(a).unwrap());
                s
            }
        }
    }
}

fn check_k(k_max: usize) -> Result<()> {
    if k_max == 0 {
        return Err(invalid("operators need at least one mode"));
    }
    Ok(())
}

/// Annulus interface-flux to interface-trace map (zero flux on the outer
/// circle): diagonal `(rho/k)(1 + q^{2k})/(1 - q^{2k})`.
pub fn neumann_to_dirichlet(geometry: &DiskGeometry, k_max: usize) -> Result<SpectralOperator> {
    check_k(k_max)?;
    let q = geometry.q();
    let mut d = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let q2k = q.powi(2 * k as i32);
        d.push(geometry.rho / k as f64 * (1.0 + q2k) / (1.0 - q2k));
    }
    Ok(SpectralOperator {
        kind: OperatorKind::NeumannToDirichlet,
        k_max,
        data: OperatorData::Diagonal(d),
    })
}

/// Inner-disk trace to outward flux map: diagonal `k/rho`.
pub fn dirichlet_to_neumann(geometry: &DiskGeometry, k_max: usize) -> Result<SpectralOperator> {
    check_k(k_max)?;
    let d = (1..=k_max).map(|k| k as f64 / geometry.rho).collect();
    Ok(SpectralOperator {
        kind: OperatorKind::DirichletToNeumann,
        k_max,
        data: OperatorData::Diagonal(d),
    })
}

/// `I + (annulus map)(disk map)`: diagonal `1 + lambda1_k lambda2_k`, which
/// collapses to `2/(1 - q^{2k})` — strictly greater than 1, so the coupling
/// is trivially invertible here.
pub fn coupling(geometry: &DiskGeometry, k_max: usize) -> Result<SpectralOperator> {
    let nd = neumann_to_dirichlet(geometry, k_max)?;
    let dn = dirichlet_to_neumann(geometry, k_max)?;
    let (d1, d2) = (nd.diagonal().unwrap(), dn.diagonal().unwrap());
    let d = (0..k_max).map(|i| 1.0 + d1[i] * d2[i]).collect();
    Ok(SpectralOperator {
        kind: OperatorKind::Coupling,
        k_max,
        data: OperatorData::Diagonal(d),
    })
}

/// Solves the coupling system `(I + composition) x = rhs`; the diagonal
/// entries exceed 1, so this is unconditionally well posed.
pub fn coupling_solve(
    geometry: &DiskGeometry,
    k_max: usize,
    rhs: &CircleModes,
) -> Result<CircleModes> {
    if rhs.k_max() > k_max {
        return Err(invalid("rhs has more modes than the requested operator"));
    }
    let t = coupling(geometry, k_max)?;
    let d = t.diagonal().unwrap();
    let mut out = CircleModes::zeros(rhs.k_max());
    for k in 1..=rhs.k_max() {
        out.set_cos(k, rhs.cos(k) / d[k - 1]);
        out.set_sin(k, rhs.sin(k) / d[k - 1]);
    }
    Ok(out)
}

// ------------------------------------------------------ arc control basis

/// `sin(xL)/x`, continuously extended by `L` at `x = 0`.
fn ratio_sin(x: f64, l: f64) -> f64 {
    if x == 0.0 {
        l
    } else {
        (x * l).sin() / x
    }
}

/// `(1 - cos(xL))/x`, continuously extended by `0` at `x = 0`.
fn ratio_vers(x: f64, l: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        (1.0 - (x * l).cos()) / x
    }
}

/// Index of an arc-basis function: the control space on the arc is spanned
/// by `cos(2 pi m tau / L)` and `sin(2 pi m tau / L)` in the arc parameter
/// `tau`, `m = 1..=m_max` — a full trigonometric family minus the constant,
/// so every element is exactly mean-free and its zero-extension to the
/// circle is mean-free too.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcMode {
    Cos(usize),
    Sin(usize),
}

impl ArcMode {
    /// Position in the interleaved arc coefficient vector.
    pub fn index(self) -> usize {
        match self {
            ArcMode::Cos(m) => 2 * (m - 1),
            ArcMode::Sin(m) => 2 * (m - 1) + 1,
        }
    }
}

/// Full-circle trigonometric coefficients (up to mode `k_max`) of one
/// arc-basis function extended by zero off the arc. Closed-form integrals,
/// no quadrature.
pub fn arc_mode_circle_expansion(
    geometry: &DiskGeometry,
    mode: ArcMode,
    k_max: usize,
) -> Result<CircleModes> {
    check_k(k_max)?;
    let l = geometry.arc_length();
    let (theta_a, _) = geometry.arc();
    let (m, is_sin) = match mode {
        ArcMode::Cos(m) => (m, false),
        ArcMode::Sin(m) => (m, true),
    };
    if m == 0 {
        return Err(invalid("arc modes are indexed from 1"));
    }
    let omega = TAU * m as f64 / l;
    let mut out = CircleModes::zeros(k_max);
    for k in 1..=k_max {
        let kk = k as f64;
        // C = int_0^L (arc mode)(tau) cos(k tau) dtau, S likewise with sin.
        let (c, s) = if is_sin {
            (
                0.5 * (ratio_vers(omega + kk, l) + ratio_vers(omega - kk, l)),
                0.5 * (ratio_sin(omega - kk, l) - ratio_sin(omega + kk, l)),
            )
        } else {
            (
                0.5 * (ratio_sin(omega - kk, l) + ratio_sin(omega + kk, l)),
                0.5 * (ratio_vers(kk + omega, l) + ratio_vers(kk - omega, l)),
            )
        };
        let (sa, ca) = (kk * theta_a).sin_cos();
        out.set_cos(k, (ca * c - sa * s) / PI);
        out.set_sin(k, (sa * c + ca * s) / PI);
    }
    Ok(out)
}

/// Expands an arc-supported control (interleaved arc-basis coefficients)
/// into full-circle modes, summing in fixed index order.
pub fn expand_arc_control(
    geometry: &DiskGeometry,
    arc_coeffs: &[f64],
    k_max: usize,
) -> Result<CircleModes> {
    if arc_coeffs.is_empty() || arc_coeffs.len() % 2 != 0 {
        return Err(invalid("arc coefficients must come in cos/sin pairs"));
    }
    let mut out = CircleModes::zeros(k_max);
    for m in 1..=arc_coeffs.len() / 2 {
        for mode in [ArcMode::Cos(m), ArcMode::Sin(m)] {
            let c = arc_coeffs[mode.index()];
            if c == 0.0 {
                continue;
            }
            let basis = arc_mode_circle_expansion(geometry, mode, k_max)?;
            for i in 0..2 * k_max {
                out.coeffs[i] += c * basis.coeffs[i];
            }
        }
    }
    Ok(out)
}

/// Dense control-to-flux operator: arc-basis coefficients to the flux the
/// control drives through the interface (inward normal). Column `j` is the
/// circle expansion of arc-basis function `j` scaled mode-wise by
/// `-q^{k-1}`.
pub fn control_to_flux(
    geometry: &DiskGeometry,
    m_max: usize,
    k_max: usize,
) -> Result<SpectralOperator> {
    check_k(k_max)?;
    check_k(m_max)?;
    let q = geometry.q();
    let mut mat = DMatrix::zeros(2 * k_max, 2 * m_max);
    for m in 1..=m_max {
        for mode in [ArcMode::Cos(m), ArcMode::Sin(m)] {
            let col = mode.index();
            let expansion = arc_mode_circle_expansion(geometry, mode, k_max)?;
            for k in 1..=k_max {
                let decay = -q.powi(k as i32 - 1);
                mat[(2 * (k - 1), col)] = decay * expansion.cos(k);
                mat[(2 * (k - 1) + 1, col)] = decay * expansion.sin(k);
            }
        }
    }
    Ok(SpectralOperator {
        kind: OperatorKind::ControlToFlux,
        k_max,
        data: OperatorData::Dense(mat),
    })
}

// ------------------------------------------------------- harmonic fields

/// Harmonic field on a disk or annulus stored per trigonometric mode in the
/// overflow-free scaled basis `outer_k (r/r_outer)^k + inner_k (r_inner/r)^k`
/// (the `inner` part is absent on a disk), plus a constant term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicDiskField {
    r_inner: f64,
    r_outer: f64,
    pub mean: f64,
    /// Interleaved `[cos_1, sin_1, ...]` coefficients of the outer basis.
    outer: Vec<f64>,
    /// Interleaved coefficients of the inner basis; empty for a disk field.
    inner: Vec<f64>,
}

impl HarmonicDiskField {
    pub fn disk(r_outer: f64, mean: f64, outer: Vec<f64>) -> Result<Self> {
        if !(r_outer.is_finite() && r_outer > 0.0) {
            return Err(invalid("disk field needs a positive radius"));
        }
        if outer.is_empty() || outer.len() % 2 != 0 {
            return Err(invalid("mode coefficients must come in cos/sin pairs"));
        }
        Ok(Self {
            r_inner: 0.0,
            r_outer,
            mean,
            outer,
            inner: Vec::new(),
        })
    }

    pub fn annulus(
        r_inner: f64,
        r_outer: f64,
        mean: f64,
        outer: Vec<f64>,
        inner: Vec<f64>,
    ) -> Result<Self> {
        if !(r_inner > 0.0 && r_outer.is_finite() && r_inner < r_outer) {
            return Err(invalid("annulus field needs 0 < r_inner < r_outer"));
        }
        if outer.len() != inner.len() || outer.is_empty() || outer.len() % 2 != 0 {
            return Err(invalid("inner/outer coefficients must be matching cos/sin pairs"));
        }
        Ok(Self {
            r_inner,
            r_outer,
            mean,
            outer,
            inner,
        })
    }

    pub fn k_max(&self) -> usize {
        self.outer.len() / 2
    }

    pub fn radii(&self) -> (f64, f64) {
        (self.r_inner, self.r_outer)
    }

    /// Interleaved coefficients of the outer basis `(r/r_outer)^k`.
    pub fn outer_coeffs(&self) -> &[f64] {
        &self.outer
    }

    /// Interleaved coefficients of the inner basis `(r_inner/r)^k`; empty
    /// for a pure disk field.
    pub fn inner_coeffs(&self) -> &[f64] {
        &self.inner
    }

    fn in_region(&self, r: f64) -> bool {
        r >= self.r_inner && r <= self.r_outer
    }

    pub fn value(&self, r: f64, theta: f64) -> Result<f64> {
        if !self.in_region(r) {
            return Err(invalid(format!("radius {r} outside the field's region")));
        }
        let mut acc = self.mean;
        for k in 1..=self.k_max() {
            let kt = k as f64 * theta;
            let (s, c) = kt.sin_cos();
            let ro = (r / self.r_outer).powi(k as i32);
            acc += ro * (self.outer[2 * (k - 1)] * c + self.outer[2 * (k - 1) + 1] * s);
            if !self.inner.is_empty() {
                let ri = (self.r_inner / r).powi(k as i32);
                acc += ri * (self.inner[2 * (k - 1)] * c + self.inner[2 * (k - 1) + 1] * s);
            }
        }
        Ok(acc)
    }

    /// `d/dr` of the field.
    pub fn radial_derivative(&self, r: f64, theta: f64) -> Result<f64> {
        if !self.in_region(r) || r == 0.0 {
            return Err(invalid(format!("radius {r} outside the field's region")));
        }
        let mut acc = 0.0;
        for k in 1..=self.k_max() {
            let kk = k as f64;
            let kt = kk * theta;
            let (s, c) = kt.sin_cos();
            let ro = kk / r * (r / self.r_outer).powi(k as i32);
            acc += ro * (self.outer[2 * (k - 1)] * c + self.outer[2 * (k - 1) + 1] * s);
            if !self.inner.is_empty() {
                let ri = -kk / r * (self.r_inner / r).powi(k as i32);
                acc += ri * (self.inner[2 * (k - 1)] * c + self.inner[2 * (k - 1) + 1] * s);
            }
        }
        Ok(acc)
    }

    /// Trace on the circle of radius `r` as mode coefficients.
    pub fn trace_modes(&self, r: f64) -> Result<CircleModes> {
        if !self.in_region(r) {
            return Err(invalid(format!("radius {r} outside the field's region")));
        }
        let mut out = CircleModes::zeros(self.k_max());
        for k in 1..=self.k_max() {
            let ro = (r / self.r_outer).powi(k as i32);
            let ri = if self.inner.is_empty() {
                0.0
            } else {
                (self.r_inner / r).powi(k as i32)
            };
            let gi = |v: &[f64], off: usize| if v.is_empty() { 0.0 } else { v[off] };
            out.set_cos(k, ro * self.outer[2 * (k - 1)] + ri * gi(&self.inner, 2 * (k - 1)));
            out.set_sin(
                k,
                ro * self.outer[2 * (k - 1) + 1] + ri * gi(&self.inner, 2 * (k - 1) + 1),
            );
        }
        Ok(out)
    }

    /// `d/dr` on the circle of radius `r` as mode coefficients.
    pub fn radial_derivative_modes(&self, r: f64) -> Result<CircleModes> {
        if !self.in_region(r) || r == 0.0 {
            return Err(invalid(format!("radius {r} outside the field's region")));
        }
        let mut out = CircleModes::zeros(self.k_max());
        for k in 1..=self.k_max() {
            let kk = k as f64;
            let ro = kk / r * (r / self.r_outer).powi(k as i32);
            let ri = if self.inner.is_empty() {
                0.0
            } else {
                -kk / r * (self.r_inner / r).powi(k as i32)
            };
            let gi = |v: &[f64], off: usize| if v.is_empty() { 0.0 } else { v[off] };
            out.set_cos(k, ro * self.outer[2 * (k - 1)] + ri * gi(&self.inner, 2 * (k - 1)));
            out.set_sin(
                k,
                ro * self.outer[2 * (k - 1) + 1] + ri * gi(&self.inner, 2 * (k - 1) + 1),
            );
        }
        Ok(out)
    }
}

/// Annulus field with prescribed flux `psi` through the interface (inward
/// normal) and zero flux on the outer circle; the trace it leaves on the
/// interface realizes the diagonal of [`neumann_to_dirichlet`].
pub fn annulus_from_interface_flux(
    geometry: &DiskGeometry,
    psi: &CircleModes,
) -> Result<HarmonicDiskField> {
    let q = geometry.q();
    let k_max = psi.k_max();
    let mut outer = vec![0.0; 2 * k_max];
    let mut inner = vec![0.0; 2 * k_max];
    for k in 1..=k_max {
        let kk = k as f64;
        let qk = q.powi(k as i32);
        let q2k = qk * qk;
        // inner coefficient beta from (k/rho)(beta - q^k alpha) = psi_k with
        // alpha = q^k beta (zero outer flux)
        let gain = geometry.rho / (kk * (1.0 - q2k));
        for (off, coef) in [(2 * (k - 1), psi.cos(k)), (2 * (k - 1) + 1, psi.sin(k))] {
            let beta = gain * coef;
            inner[off] = beta;
            outer[off] = qk * beta;
        }
    }
    HarmonicDiskField::annulus(geometry.rho, geometry.outer, 0.0, outer, inner)
}

/// Whole-disk field with prescribed outward flux `v` on the outer circle
/// (mean-zero), normalized to zero mean: mode coefficients `v_k R / k` in
/// the scaled basis.
pub fn disk_from_boundary_flux(geometry: &DiskGeometry, v: &CircleModes) -> Result<HarmonicDiskField> {
    let k_max = v.k_max();
    let mut outer = vec![0.0; 2 * k_max];
    for k in 1..=k_max {
        let gain = geometry.outer / k as f64;
        outer[2 * (k - 1)] = gain * v.cos(k);
        outer[2 * (k - 1) + 1] = gain * v.sin(k);
    }
    HarmonicDiskField::disk(geometry.outer, 0.0, outer)
}

/// Inner-disk field with prescribed trace `phi` on the interface.
pub fn disk_from_interface_trace(
    geometry: &DiskGeometry,
    phi: &CircleModes,
) -> Result<HarmonicDiskField> {
    HarmonicDiskField::disk(geometry.rho, 0.0, phi.coeffs().to_vec())
}

// ---------------------------------------------------------------- duality

/// Residual `|<control-driven flux, coupled trace>_interface -
/// <control, annulus trace>_arc|` of the Green-identity duality between the
/// two routes. The left side goes through [`control_to_flux`] and
/// [`coupling`]; the right side solves the annulus with flux `-(disk map)phi`
/// and pairs its outer trace with the control — two independent code paths
/// that must agree to rounding at any truncation.
pub fn duality_identity_residual(
    geometry: &DiskGeometry,
    k_max: usize,
    arc_control: &[f64],
    phi: &CircleModes,
) -> Result<f64> {
    if phi.k_max() != k_max {
        return Err(invalid("phi must carry exactly k_max modes"));
    }
    // Left: <(control->flux) v, (I + composition) phi> on the interface.
    let m_max = arc_control.len() / 2;
    let gamma_flux = control_to_flux(geometry, m_max.max(1), k_max)?.apply_control(arc_control)?;
    let coupled = coupling(geometry, k_max)?.apply(phi)?;
    let lhs = gamma_flux.pairing(&coupled, geometry.rho);

    // Right: <v, trace on the outer circle of the annulus field driven by
    // -(disk map) phi through the interface>.
    let minus_dn_phi = {
        let dn = dirichlet_to_neumann(geometry, k_max)?.apply(phi)?;
        let neg: Vec<f64> = dn.coeffs().iter().map(|c| -c).collect();
        CircleModes::from_interleaved(neg)?
    };
    let xi = annulus_from_interface_flux(geometry, &minus_dn_phi)?;
    let xi_outer = xi.trace_modes(geometry.outer_radius())?;
    let v_expanded = expand_arc_control(geometry, arc_control, k_max)?;
    let rhs = v_expanded.pairing(&xi_outer, geometry.outer_radius());

    Ok((lhs - rhs).abs())
}

// -------------------------------------------------- approximate control

/// Result of the regularized control fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximateControl {
    /// Interleaved arc-basis coefficients of the control.
    pub control: Vec<f64>,
    /// `|| (control-driven flux) - target ||` in the `1/k`-weighted norm on
    /// the interface.
    pub weighted_residual: f64,
    /// Flux actually driven through the interface by the control.
    pub achieved: CircleModes,
    /// Singular values discarded by the pseudo-inverse fallback (`reg == 0`
    /// only; `0` when Tikhonov regularization is active).
    pub dropped_singular_values: usize,
}

/// Fits an arc-supported control whose interface flux approximates `target`,
/// minimizing the `1/k`-weighted misfit plus `reg` times the squared control
/// coefficient norm. With `reg == 0` a pseudo-inverse with drop tolerance
/// `1e-12 * sigma_max` is used; the image of the control map is dense, so
/// the residual is nonincreasing in `m_max` but reaches small values only
/// slowly — the geometric singular-value decay is the price of controlling
/// through the annulus.
pub fn approximate_control(
    geometry: &DiskGeometry,
    m_max: usize,
    k_max: usize,
    target: &CircleModes,
    reg: f64,
) -> Result<ApproximateControl> {
    if !(reg.is_finite() && reg >= 0.0) {
        return Err(invalid("regularization weight must be finite and nonnegative"));
    }
    if target.k_max() != k_max {
        return Err(invalid("target must carry exactly k_max modes"));
    }
    let op = control_to_flux(geometry, m_max, k_max)?;
    let m = op.matrix().unwrap();
    // Row weights sqrt(rho pi / k) make the 2-norm of the weighted misfit
    // exactly the 1/k-weighted interface norm.
    let mut weighted = m.clone();
    let mut wh = nalgebra::DVector::from_column_slice(target.coeffs());
    for k in 1..=k_max {
        let w = (geometry.rho * PI / k as f64).sqrt();
        for row in [2 * (k - 1), 2 * (k - 1) + 1] {
            for c in 0..weighted.ncols() {
                weighted[(row, c)] *= w;
            }
            wh[row] *= w;
        }
    }
    let svd = weighted.clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd computed with u");
    let vt = svd.v_t.as_ref().expect("svd computed with v_t");
    let sigma = &svd.singular_values;
    let uth = u.transpose() * &wh;
    let mut coeffs = nalgebra::DVector::zeros(sigma.len());
    let mut dropped = 0usize;
    if reg > 0.0 {
        for i in 0..sigma.len() {
            coeffs[i] = sigma[i] / (sigma[i] * sigma[i] + reg) * uth[i];
        }
    } else {
        let cutoff = 1e-12 * sigma.max();
        for i in 0..sigma.len() {
            if sigma[i] > cutoff {
                coeffs[i] = uth[i] / sigma[i];
            } else {
                dropped += 1;
            }
        }
    }
    let control_vec = vt.transpose() * coeffs;
    let control: Vec<f64> = control_vec.data.into();
    let achieved = op.apply_control(&control)?;
    let misfit: Vec<f64> = achieved
        .coeffs()
        .iter()
        .zip(target.coeffs())
        .map(|(a, t)| a - t)
        .collect();
    let weighted_residual = CircleModes::from_interleaved(misfit)?.weighted_flux_norm(geometry.rho);
    Ok(ApproximateControl {
        control,
        weighted_residual,
        achieved,
        dropped_singular_values: dropped,
    })
}

// ------------------------------------------------------ matrix-level audit

/// Report of the randomized `I + lambda A B` invertibility audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub trials: usize,
    pub failures: usize,
    /// Smallest `sigma_min / sigma_max` of `I + lambda A B` observed.
    pub min_conditioning: f64,
    /// Largest relative residual of the direct solves.
    pub max_solve_residual: f64,
}

/// Randomized audit that `I + lambda A B` stays invertible for symmetric
/// positive-semidefinite `A`, `B` and `lambda > 0`: draws Frobenius-normalized
/// random PSD pairs (rank-deficient in half the trials), and checks that the
/// smallest singular value stays above `1e-10` times the largest and that a
/// direct solve against a random right-hand side has relative residual below
/// `1e-8`.
pub fn invertibility_audit(
    n: usize,
    trials: usize,
    lambdas: &[f64],
    seed: u64,
) -> Result<AuditReport> {
    if n == 0 || n > 400 {
        return Err(invalid("audit dimension must lie in 1..=400"));
    }
    if trials == 0 || lambdas.is_empty() {
        return Err(invalid("audit needs at least one trial and one lambda"));
    }
    if lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(invalid("audit lambdas must be positive"));
    }
    fn psd(rng: &mut ChaCha8Rng, n: usize, deficient: bool) -> DMatrix<f64> {
        let cols = if deficient { n.div_ceil(2) } else { n };
        let g = DMatrix::from_fn(n, cols, |_, _| rng.gen_range(-1.0..1.0));
        let m = &g * g.transpose();
        let scale = m.norm();
        if scale > 0.0 {
            m / scale
        } else {
            m
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    let mut min_conditioning = f64::INFINITY;
    let mut max_solve_residual = 0.0f64;
    let mut count = 0usize;
    for trial in 0..trials {
        let deficient = trial % 2 == 1;
        let a = psd(&mut rng, n, deficient);
        let b = psd(&mut rng, n, deficient);
        let ab = &a * &b;
        for &lambda in lambdas {
            count += 1;
            let m = DMatrix::identity(n, n) + lambda * &ab;
            let svd = m.clone().svd(false, false);
            let smax = svd.singular_values.max();
            let smin = svd.singular_values.min();
            let cond = smin / smax;
            min_conditioning = min_conditioning.min(cond);
            let rhs = DMatrix::from_fn(n, 1, |_, _| rng.gen_range(-1.0..1.0));
            let solved = m.clone().lu().solve(&rhs);
            let rel = match solved {
                Some(x) => (&m * &x - &rhs).norm() / rhs.norm(),
                None => f64::INFINITY,
            };
            max_solve_residual = max_solve_residual.max(rel);
            if cond <= 1e-10 || rel > 1e-8 {
                failures += 1;
            }
        }
    }
    Ok(AuditReport {
        trials: count,
        failures,
        min_conditioning,
        max_solve_residual,
    })
}
