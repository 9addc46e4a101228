//! Series solvers on the rectangle: the well-posed mixed problem, the
//! ill-posed Cauchy problem, its compatibility diagnostics, and the design of
//! boundary data that realizes a prescribed flux through an interior line.
//!
//! Everything here works coefficientwise in the Steklov families of
//! [`crate::steklov`]. A harmonic field is stored as
//!
//! ```text
//! u = sum_k  cb[k] * psi_bottom_k  +  ct[k] * psi_top_k
//! ```
//!
//! For the mixed problem (Dirichlet trace `f` on the bottom, Neumann flux `g`
//! on the top) the coefficients are explicit and bounded. For the Cauchy
//! problem (both `f` and the flux `g` on the bottom) the top-family
//! coefficients are the incompatibility brackets `f_k - g_k/mu_k` amplified
//! by `sinh^2(theta_k)/cosh(theta_k)` — exponentially large in `k` unless the
//! data is compatible, which is exactly the ill-posedness of the problem. The
//! [`compatibility`] report quantifies that growth before a solve is
//! attempted, and [`design_control`] runs the amplification backwards to
//! produce Cauchy data whose interior-line flux matches a target.

use crate::error::{invalid, Result};
#[cfg(test)]
use crate::error::Error;
use crate::hyp;
use crate::steklov::{
    eigenvalue_from_basis, profile, profile_derivative, LateralCondition, LateralKind,
    RectangleDomain, Side, TransverseBasis,
};
use serde::{Deserialize, Serialize};

/// Where a coefficient vector lives: one of the horizontal boundary sides or
/// the marked interior line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Segment {
    Bottom,
    Top,
    InteriorLine,
}

/// Coefficients of a function on a horizontal segment, expanded in the
/// transverse eigenbasis of the given lateral condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    pub segment: Segment,
    pub lateral: LateralCondition,
    pub coeffs: Vec<f64>,
}

impl BoundaryData {
    pub fn new(segment: Segment, lateral: LateralCondition, coeffs: Vec<f64>) -> Self {
        Self {
            segment,
            lateral,
            coeffs,
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Evaluates the represented function at `x`.
    pub fn value(&self, domain: &RectangleDomain, x: f64) -> Result<f64> {
        let basis = TransverseBasis::build(domain.l1(), self.lateral, self.coeffs.len())?;
        Ok(self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * basis.value(k, x))
            .sum())
    }
}

/// A truncated harmonic series field on the rectangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesField {
    domain: RectangleDomain,
    basis: TransverseBasis,
    coeffs_bottom: Vec<f64>,
    coeffs_top: Vec<f64>,
}

impl SeriesField {
    /// Builds a field directly from coefficient vectors (used by the CLI file
    /// loader and by tests; the solvers below construct fields themselves).
    pub fn from_coefficients(
        domain: RectangleDomain,
        lateral: LateralCondition,
        coeffs_bottom: Vec<f64>,
        coeffs_top: Vec<f64>,
    ) -> Result<Self> {
        let n = coeffs_bottom.len().max(coeffs_top.len());
        if n == 0 {
            return Err(invalid("series field needs at least one coefficient"));
        }
        let basis = TransverseBasis::build(domain.l1(), lateral, n)?;
        Ok(Self {
            domain,
            basis,
            coeffs_bottom,
            coeffs_top,
        })
    }

    pub fn domain(&self) -> &RectangleDomain {
        &self.domain
    }

    pub fn lateral(&self) -> LateralCondition {
        self.basis.lateral()
    }

    pub fn truncation(&self) -> usize {
        self.coeffs_bottom.len().max(self.coeffs_top.len())
    }

    pub fn coeffs_bottom(&self) -> &[f64] {
        &self.coeffs_bottom
    }

    pub fn coeffs_top(&self) -> &[f64] {
        &self.coeffs_top
    }

    /// Largest top-family coefficient magnitude: the conditioning witness of
    /// an ill-posed reconstruction (O(1) for compatible data, exponentially
    /// large otherwise).
    pub fn conditioning_witness(&self) -> f64 {
        self.coeffs_top.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    pub fn value(&self, x: f64, y: f64) -> Result<f64> {
        if !self.domain.contains(x, y) {
            return Err(invalid(format!("point ({x}, {y}) outside the field's rectangle")));
        }
        Ok(self.value_unchecked(x, y))
    }

    pub fn gradient(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        if !self.domain.contains(x, y) {
            return Err(invalid(format!("point ({x}, {y}) outside the field's rectangle")));
        }
        Ok(self.gradient_unchecked(x, y))
    }

    /// Evaluation without the containment check; the transport module guards
    /// the domain itself and may probe Runge-Kutta stage points slightly
    /// outside, where the series still evaluates fine.
    pub(crate) fn value_unchecked(&self, x: f64, y: f64) -> f64 {
        let kind = self.basis.lateral().kind();
        let mut acc = 0.0;
        for k in 0..self.truncation() {
            let phi = self.basis.value(k, x);
            let freq = self.basis.frequency(k);
            if let Some(&c) = self.coeffs_bottom.get(k) {
                acc += c * phi * profile(&self.domain, kind, Side::Bottom, k, freq, y);
            }
            if let Some(&c) = self.coeffs_top.get(k) {
                acc += c * phi * profile(&self.domain, kind, Side::Top, k, freq, y);
            }
        }
        acc
    }

    pub(crate) fn gradient_unchecked(&self, x: f64, y: f64) -> (f64, f64) {
        let kind = self.basis.lateral().kind();
        let (mut gx, mut gy) = (0.0, 0.0);
        for k in 0..self.truncation() {
            let phi = self.basis.value(k, x);
            let dphi = self.basis.derivative(k, x);
            let freq = self.basis.frequency(k);
            if let Some(&c) = self.coeffs_bottom.get(k) {
                let p = profile(&self.domain, kind, Side::Bottom, k, freq, y);
                let dp = profile_derivative(&self.domain, kind, Side::Bottom, k, freq, y);
                gx += c * dphi * p;
                gy += c * phi * dp;
            }
            if let Some(&c) = self.coeffs_top.get(k) {
                let p = profile(&self.domain, kind, Side::Top, k, freq, y);
                let dp = profile_derivative(&self.domain, kind, Side::Top, k, freq, y);
                gx += c * dphi * p;
                gy += c * phi * dp;
            }
        }
        (gx, gy)
    }

    fn basis(&self) -> &TransverseBasis {
        &self.basis
    }
}

// ------------------------------------------------------------- projection

/// Projects sampled values `(x_i, v_i)` on a horizontal segment onto the
/// first `n` transverse modes by the trapezoid rule on the sample grid.
///
/// The samples must be strictly increasing in `x` and cover `[0, l1]`. On a
/// uniform grid the rule is exact for the Neumann/Dirichlet trig bases below
/// the aliasing threshold.
pub fn project_boundary(
    samples: &[(f64, f64)],
    segment: Segment,
    domain: &RectangleDomain,
    lateral: &LateralCondition,
    n: usize,
) -> Result<BoundaryData> {
    if n == 0 {
        return Err(invalid("projection needs at least one mode"));
    }
    if samples.len() < 2 {
        return Err(invalid("projection needs at least two samples"));
    }
    let l1 = domain.l1();
    let tol = 1e-9 * l1;
    if samples[0].0.abs() > tol || (samples[samples.len() - 1].0 - l1).abs() > tol {
        return Err(invalid("samples must cover [0, l1] end to end"));
    }
    for w in samples.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(invalid("sample abscissae must be strictly increasing"));
        }
    }
    let basis = TransverseBasis::build(l1, *lateral, n)?;
    let mut coeffs = vec![0.0; n];
    for k in 0..n {
        let mut acc = 0.0;
        for w in samples.windows(2) {
            let (x0, v0) = w[0];
            let (x1, v1) = w[1];
            acc += 0.5 * (v0 * basis.value(k, x0) + v1 * basis.value(k, x1)) * (x1 - x0);
        }
        coeffs[k] = acc;
    }
    Ok(BoundaryData::new(segment, *lateral, coeffs))
}

// ----------------------------------------------------------------- solvers

fn check_data(data: &BoundaryData, segment: Segment, what: &str) -> Result<()> {
    if data.segment != segment {
        return Err(invalid(format!(
            "{what} must live on {segment:?}, got {:?}",
            data.segment
        )));
    }
    Ok(())
}

/// Slope at `y = 0` of the top-family profile (positive for every variant);
/// `mu_bottom / this` is the growth factor of the ill-posed reconstruction.
fn top_profile_slope_at_bottom(domain: &RectangleDomain, basis: &TransverseBasis, k: usize) -> f64 {
    profile_derivative(
        domain,
        basis.lateral().kind(),
        Side::Top,
        k,
        basis.frequency(k),
        0.0,
    )
}

/// Solves the well-posed mixed problem: Dirichlet trace `f` on the bottom,
/// Neumann flux `g` on the top, zero lateral Neumann condition. Defined for
/// the Neumann lateral variant (the basis whose top family carries a
/// nontrivial Neumann trace).
pub fn solve_mixed(
    f: &BoundaryData,
    g: &BoundaryData,
    domain: &RectangleDomain,
    n: usize,
) -> Result<SeriesField> {
    check_data(f, Segment::Bottom, "mixed-problem trace data")?;
    check_data(g, Segment::Top, "mixed-problem flux data")?;
    if f.lateral.kind() != LateralKind::Neumann || g.lateral.kind() != LateralKind::Neumann {
        return Err(invalid("the mixed solver is defined for the Neumann lateral condition"));
    }
    if n == 0 {
        return Err(invalid("truncation must be positive"));
    }
    let basis = TransverseBasis::build(domain.l1(), LateralCondition::neumann(), n)?;
    let mut cb = vec![0.0; n];
    let mut ct = vec![0.0; n];
    for k in 0..n {
        cb[k] = f.coeffs.get(k).copied().unwrap_or(0.0);
        let gk = g.coeffs.get(k).copied().unwrap_or(0.0);
        // The top-family mode has unit trace and profile slope
        // `top_profile_slope_at_bottom`... at the top the slope is
        // omega*cotanh(theta) = mu_top, so dividing by mu_top makes the
        // Neumann trace match g exactly; the bottom family contributes no
        // flux through the top.
        let mu_top = eigenvalue_from_basis(domain, &basis, Side::Top, k);
        ct[k] = gk / mu_top;
    }
    Ok(SeriesField {
        domain: *domain,
        basis,
        coeffs_bottom: cb,
        coeffs_top: ct,
    })
}

/// Outward normal derivative of a series field on the bottom side, as
/// coefficients in the transverse basis. Exact at the truncation: the
/// bottom family contributes `mu_k f_k`, the top family `-slope_k ct_k`.
pub fn normal_derivative_bottom(field: &SeriesField) -> BoundaryData {
    let n = field.truncation();
    let basis = field.basis();
    let mut out = vec![0.0; n];
    for k in 0..n {
        let mut acc = 0.0;
        if let Some(&c) = field.coeffs_bottom.get(k) {
            acc += eigenvalue_from_basis(&field.domain, basis, Side::Bottom, k) * c;
        }
        if let Some(&c) = field.coeffs_top.get(k) {
            acc -= top_profile_slope_at_bottom(&field.domain, basis, k) * c;
        }
        out[k] = acc;
    }
    BoundaryData::new(Segment::Bottom, basis.lateral(), out)
}

/// Incompatibility bracket `f_k - g_k/mu_k`, floored to zero when it falls
/// below the rounding resolution of the subtraction itself. Without the
/// floor, data that is compatible *by construction* leaves a ~1-ulp residue
/// that the exponential amplification inflates into a spurious geometric
/// tail; differences below `4 eps (|f| + |g/mu|)` are not resolvable in f64
/// and are treated as exact compatibility.
fn floored_bracket(fk: f64, gk: f64, mu: f64) -> f64 {
    let quotient = gk / mu;
    let bracket = fk - quotient;
    if bracket.abs() <= 4.0 * f64::EPSILON * (fk.abs() + quotient.abs()) {
        0.0
    } else {
        bracket
    }
}

/// Growth factor `mu_bottom_k / slope_k` of the ill-posed reconstruction
/// (`sinh^2/cosh` for the Neumann variant, `cosh` for Robin/Dirichlet),
/// evaluated without intermediate overflow.
fn cauchy_growth(domain: &RectangleDomain, basis: &TransverseBasis, k: usize) -> f64 {
    let freq = basis.frequency(k);
    let theta = freq * domain.l2();
    match basis.lateral().kind() {
        LateralKind::Neumann => hyp::sinh_sq_over_cosh(theta),
        _ => theta.cosh(),
    }
}

/// Solves the Cauchy problem: both the Dirichlet trace `f` and the outward
/// flux `g` prescribed on the bottom side. Always defined at a truncation;
/// for incompatible data the coefficients grow like `e^{k*l2}` — inspect
/// [`SeriesField::conditioning_witness`] or run [`compatibility`] first.
pub fn solve_cauchy(
    f: &BoundaryData,
    g: &BoundaryData,
    domain: &RectangleDomain,
    lateral: &LateralCondition,
    n: usize,
) -> Result<SeriesField> {
    check_data(f, Segment::Bottom, "Cauchy trace data")?;
    check_data(g, Segment::Bottom, "Cauchy flux data")?;
    if n == 0 {
        return Err(invalid("truncation must be positive"));
    }
    let basis = TransverseBasis::build(domain.l1(), *lateral, n)?;
    let mut cb = vec![0.0; n];
    let mut ct = vec![0.0; n];
    for k in 0..n {
        let fk = f.coeffs.get(k).copied().unwrap_or(0.0);
        let gk = g.coeffs.get(k).copied().unwrap_or(0.0);
        cb[k] = fk;
        if basis.lateral().kind() == LateralKind::Neumann && k == 0 {
            // Constant mode: the flux is carried entirely by the linear
            // top-family mode with slope 1/l2.
            ct[0] = -domain.l2() * gk;
            continue;
        }
        let mu = eigenvalue_from_basis(domain, &basis, Side::Bottom, k);
        let bracket = floored_bracket(fk, gk, mu);
        ct[k] = if bracket == 0.0 {
            0.0
        } else {
            cauchy_growth(domain, &basis, k) * bracket
        };
    }
    Ok(SeriesField {
        domain: *domain,
        basis,
        coeffs_bottom: cb,
        coeffs_top: ct,
    })
}

// ------------------------------------------------------------ diagnostics

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The truncated compatibility series shows no geometric growth.
    ConvergentAtTruncation,
    /// Tail summands grow geometrically: the full series diverges and the
    /// Cauchy data does not belong to a harmonic field's trace pair.
    DivergenceIndicated,
}

/// Report on the compatibility series of a Cauchy data pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityReport {
    /// Weighted squared incompatibility per mode.
    pub summands: Vec<f64>,
    /// Running sums of `summands` (nondecreasing).
    pub partial_sums: Vec<f64>,
    /// Truncated squared data norm: the compatibility sum plus the weighted
    /// squares of the trace coefficients (and the two constant-mode squares
    /// in the Neumann variant).
    pub star_norm_sq: f64,
    pub verdict: Verdict,
    /// Estimated per-index exponential growth rate of the summand
    /// *amplitudes* over the tail (about `l2` for generic incompatible data,
    /// meaningless if the verdict is convergent).
    pub growth_exponent: f64,
}

/// Evaluates the truncated compatibility series for a Cauchy pair.
///
/// For the Neumann variant the k-th summand is
/// `k * (sinh(theta_k) * (f_k - g_k/mu_k))^2`; for Robin/Dirichlet the
/// profile turns the weight into `s_k * (cosh(theta_k) * (...))^2`. Summands
/// are assembled in log space so no intermediate overflows before the final
/// exponential.
pub fn compatibility(
    f: &BoundaryData,
    g: &BoundaryData,
    domain: &RectangleDomain,
    lateral: &LateralCondition,
    n: usize,
) -> Result<CompatibilityReport> {
    check_data(f, Segment::Bottom, "Cauchy trace data")?;
    check_data(g, Segment::Bottom, "Cauchy flux data")?;
    if n == 0 {
        return Err(invalid("truncation must be positive"));
    }
    let basis = TransverseBasis::build(domain.l1(), *lateral, n)?;
    let neumann = basis.lateral().kind() == LateralKind::Neumann;
    let mut summands = vec![0.0; n];
    let mut star = 0.0;
    for k in 0..n {
        let fk = f.coeffs.get(k).copied().unwrap_or(0.0);
        let gk = g.coeffs.get(k).copied().unwrap_or(0.0);
        let freq = basis.frequency(k);
        let theta = freq * domain.l2();
        if neumann && k == 0 {
            star += fk * fk + gk * gk;
            continue;
        }
        let mu = eigenvalue_from_basis(domain, &basis, Side::Bottom, k);
        let bracket = floored_bracket(fk, gk, mu);
        let weight = if neumann { k as f64 } else { freq };
        let summand = if bracket == 0.0 {
            0.0
        } else {
            let ln_amp = if neumann {
                hyp::ln_sinh(theta)
            } else {
                hyp::ln_cosh(theta)
            };
            weight * (2.0 * (ln_amp + bracket.abs().ln())).exp()
        };
        summands[k] = summand;
        star += weight * fk * fk + summand;
    }
    let mut partial_sums = Vec::with_capacity(n);
    let mut acc = 0.0;
    for &s in &summands {
        acc += s;
        partial_sums.push(acc);
    }
    let (verdict, growth_exponent) = tail_growth(&summands);
    Ok(CompatibilityReport {
        summands,
        partial_sums,
        star_norm_sq: star,
        verdict,
        growth_exponent,
    })
}

/// Geometric ratio test over the last quartile of summands: divergence is
/// declared when the mean successive ratio exceeds 1.5.
fn tail_growth(summands: &[f64]) -> (Verdict, f64) {
    let n = summands.len();
    let start = (3 * n) / 4;
    let tail: Vec<f64> = summands[start..]
        .iter()
        .copied()
        .filter(|s| *s > 0.0 && s.is_finite())
        .collect();
    let infinite_tail = summands[start..].iter().any(|s| s.is_infinite());
    if infinite_tail {
        // Summands overflowed: growth is beyond what f64 represents.
        return (Verdict::DivergenceIndicated, f64::INFINITY);
    }
    if tail.len() < 2 {
        return (Verdict::ConvergentAtTruncation, 0.0);
    }
    let mean_log_ratio = tail
        .windows(2)
        .map(|w| (w[1] / w[0]).ln())
        .sum::<f64>()
        / (tail.len() - 1) as f64;
    let verdict = if mean_log_ratio.exp() > 1.5 {
        Verdict::DivergenceIndicated
    } else {
        Verdict::ConvergentAtTruncation
    };
    // Summands are squared amplitudes, so the amplitude rate is half.
    (verdict, 0.5 * mean_log_ratio)
}

// --------------------------------------------------- interior-line control

/// `d/dy` of a series field on the horizontal line `y = level`
/// (`0 < level <= l2`), as transverse-basis coefficients. At `level = l2`
/// this recovers the top Neumann data of a mixed solve exactly.
pub fn normal_derivative_at_level(field: &SeriesField, level: f64) -> Result<BoundaryData> {
    let domain = &field.domain;
    if !(level > 0.0 && level <= domain.l2()) {
        return Err(invalid(format!(
            "interior level must satisfy 0 < level <= {}, got {level}",
            domain.l2()
        )));
    }
    let basis = field.basis();
    let kind = basis.lateral().kind();
    let n = field.truncation();
    let mut out = vec![0.0; n];
    for k in 0..n {
        let freq = basis.frequency(k);
        let mut acc = 0.0;
        if let Some(&c) = field.coeffs_bottom.get(k) {
            acc += c * profile_derivative(domain, kind, Side::Bottom, k, freq, level);
        }
        if let Some(&c) = field.coeffs_top.get(k) {
            acc += c * profile_derivative(domain, kind, Side::Top, k, freq, level);
        }
        out[k] = acc;
    }
    Ok(BoundaryData::new(Segment::InteriorLine, basis.lateral(), out))
}

/// Exact data-to-control gain of mode `k` for the marked interior line:
/// `sinh(theta_k)/sinh(omega_k (l2 - level))`, which grows like
/// `e^{omega_k * level}`. Mode 0 has gain 1.
pub fn amplification_factor(domain: &RectangleDomain, k: usize) -> Result<f64> {
    let level = domain
        .interior_level()
        .ok_or_else(|| invalid("amplification factor needs a marked interior level"))?;
    if k == 0 {
        return Ok(1.0);
    }
    let omega = k as f64 * std::f64::consts::PI / domain.l1();
    Ok(hyp::sinh_ratio(omega * domain.l2(), omega * (domain.l2() - level)))
}

/// Cauchy data on the bottom side designed so the solved field's `d/dy`
/// on the interior line matches `target`, together with the diagnostics of
/// the designed data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignedControl {
    /// Dirichlet trace on the bottom side.
    pub trace: BoundaryData,
    /// Outward flux on the bottom side.
    pub flux: BoundaryData,
    pub report: CompatibilityReport,
    /// Mode indices whose designed coefficients would overflow f64 and were
    /// zeroed instead.
    pub dropped: Vec<usize>,
    /// Per-mode data-to-control gains (`amplification_factor`).
    pub gains: Vec<f64>,
}

/// Designs bottom Cauchy data whose interior-line flux is `target`.
///
/// The choice `g_k = mu_k f_k` zeroes the top-family coefficient, so the
/// whole target is carried by the bottom family:
/// `f_k = -a_k cosh(theta_k) / (omega_k sinh(omega_k (l2 - level)))` and the
/// constant mode `g_0 = -a_0`. Neumann lateral variant.
pub fn design_control(
    target: &BoundaryData,
    domain: &RectangleDomain,
    n: usize,
) -> Result<DesignedControl> {
    check_data(target, Segment::InteriorLine, "design target")?;
    if target.lateral.kind() != LateralKind::Neumann {
        return Err(invalid("interior-line design is defined for the Neumann lateral condition"));
    }
    let level = domain
        .interior_level()
        .ok_or_else(|| invalid("interior-line design needs a marked interior level"))?;
    if n == 0 {
        return Err(invalid("truncation must be positive"));
    }
    let basis = TransverseBasis::build(domain.l1(), LateralCondition::neumann(), n)?;
    let mut f = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut dropped = Vec::new();
    let mut gains = Vec::with_capacity(n);
    gains.push(1.0);
    if let Some(&a0) = target.coeffs.first() {
        g[0] = -a0;
    }
    const LN_MAX: f64 = 709.0; // ln(f64::MAX) is ~709.78
    for k in 1..n {
        let ak = target.coeffs.get(k).copied().unwrap_or(0.0);
        let omega = basis.frequency(k);
        let theta = omega * domain.l2();
        let gap = omega * (domain.l2() - level);
        gains.push(hyp::sinh_ratio(theta, gap));
        if ak == 0.0 {
            continue;
        }
        let mu = eigenvalue_from_basis(domain, &basis, Side::Bottom, k);
        let ln_f = ak.abs().ln() + hyp::ln_cosh(theta) - omega.ln() - hyp::ln_sinh(gap);
        if ln_f > LN_MAX || ln_f + mu.ln() > LN_MAX {
            dropped.push(k);
            continue;
        }
        f[k] = -ak * hyp::cosh_sinh_ratio(theta, gap) / omega;
        // g = mu*f exactly (same eigenvalue the solver divides by), so the
        // solver's bracket cancels to rounding and the design is carried by
        // the bottom family alone.
        g[k] = mu * f[k];
    }
    let trace = BoundaryData::new(Segment::Bottom, LateralCondition::neumann(), f);
    let flux = BoundaryData::new(Segment::Bottom, LateralCondition::neumann(), g);
    let report = compatibility(&trace, &flux, domain, &LateralCondition::neumann(), n)?;
    Ok(DesignedControl {
        trace,
        flux,
        report,
        dropped,
        gains,
    })
}
