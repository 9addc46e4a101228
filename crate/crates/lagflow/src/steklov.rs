//! Steklov eigenpairs on a rectangle `(0, l1) x (0, l2)`.
//!
//! The spectral solvers in this crate expand harmonic fields in two families
//! of separated Steklov modes, one whose spectral boundary is the bottom side
//! `y = 0` and one whose spectral boundary is the top side `y = l2`. Each mode
//! is a product `phi_k(x) * P_k(y)` of a transverse eigenfunction on `(0, l1)`
//! and a hyperbolic vertical profile normalized to 1 on the trace side.
//!
//! Three lateral conditions on the vertical sides are supported:
//!
//! * **Neumann** (`alpha = 1`): transverse cosines, frequency `k*pi/l1`,
//!   including the constant mode `k = 0`. The bottom family satisfies a zero
//!   Neumann condition on top; the top family vanishes on the bottom
//!   (eigenvalues `omega*tanh(omega*l2)` and `omega*cotanh(omega*l2)`, with
//!   the `k = 0` specials `0` and `1/l2`).
//! * **Dirichlet** (`alpha = 0`): transverse sines, frequency `(k+1)*pi/l1`
//!   (0-based), both families vanish on the opposite horizontal side,
//!   eigenvalue `s*cotanh(s*l2)`.
//! * **Robin** (`0 < alpha < 1`): `alpha*du/dn + (1-alpha)*u = 0` laterally.
//!   The transverse frequencies are the positive roots of the secular
//!   equation `(beta^2 - s^2)sin(s*l1) + 2*beta*s*cos(s*l1) = 0` with
//!   `beta = (1-alpha)/alpha`; exactly one root lies in each interval
//!   `(k*pi/l1, (k+1)*pi/l1)`, which interpolates between the Neumann
//!   (`beta -> 0`) and Dirichlet (`beta -> inf`) frequencies.
//!
//! A fourth family variant ([`eigenvalue_flux_anchored_top`]) replaces the
//! top family's zero-trace bottom condition with a zero-flux one; it is the
//! right basis when both horizontal sides carry Dirichlet data.
//!
//! All vertical profiles are evaluated through the overflow-free quotients in
//! [`crate::hyp`], so modes of any order stay finite.

use crate::error::{invalid, Error, Result};
use crate::hyp;
use serde::{Deserialize, Serialize};

/// The rectangle `(0, l1) x (0, l2)`, optionally with a marked interior
/// horizontal line `y = interior_level` where a designed flux is targeted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectangleDomain {
    l1: f64,
    l2: f64,
    interior_level: Option<f64>,
}

impl RectangleDomain {
    pub fn new(l1: f64, l2: f64) -> Result<Self> {
        if !(l1.is_finite() && l2.is_finite() && l1 > 0.0 && l2 > 0.0) {
            return Err(invalid(format!(
                "rectangle sides must be positive and finite, got {l1} x {l2}"
            )));
        }
        Ok(Self {
            l1,
            l2,
            interior_level: None,
        })
    }

    /// Marks the interior line `y = level`; `0 < level < l2` strictly.
    pub fn with_interior_level(mut self, level: f64) -> Result<Self> {
        if !(level.is_finite() && level > 0.0 && level < self.l2) {
            return Err(invalid(format!(
                "interior level must satisfy 0 < level < {}, got {level}",
                self.l2
            )));
        }
        self.interior_level = Some(level);
        Ok(self)
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    pub fn interior_level(&self) -> Option<f64> {
        self.interior_level
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (0.0..=self.l1).contains(&x) && (0.0..=self.l2).contains(&y)
    }
}

/// Which horizontal side a mode family takes its trace on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// `y = 0`
    Bottom,
    /// `y = l2`
    Top,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::Bottom => 0,
            Side::Top => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LateralKind {
    Neumann,
    Dirichlet,
    Robin,
}

/// Lateral boundary condition `alpha*du/dn + (1-alpha)*u = 0` on the two
/// vertical sides. The endpoints `alpha = 1` and `alpha = 0` are the Neumann
/// and Dirichlet conditions; they are kept as their own variants so the
/// closed-form spectra are used instead of the root finder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LateralCondition {
    kind: LateralKind,
    alpha: f64,
}

impl LateralCondition {
    pub fn neumann() -> Self {
        Self {
            kind: LateralKind::Neumann,
            alpha: 1.0,
        }
    }

    pub fn dirichlet() -> Self {
        Self {
            kind: LateralKind::Dirichlet,
            alpha: 0.0,
        }
    }

    /// Proper Robin condition, `0 < alpha < 1` strictly.
    pub fn robin(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!(
                "Robin parameter must lie strictly inside (0, 1), got {alpha}"
            )));
        }
        Ok(Self {
            kind: LateralKind::Robin,
            alpha,
        })
    }

    /// Maps `alpha` in `[0, 1]` to the matching variant (endpoints included).
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if alpha == 1.0 {
            Ok(Self::neumann())
        } else if alpha == 0.0 {
            Ok(Self::dirichlet())
        } else {
            Self::robin(alpha)
        }
    }

    pub fn kind(&self) -> LateralKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `beta = (1 - alpha)/alpha`, the Robin secular-equation parameter.
    fn beta(&self) -> f64 {
        (1.0 - self.alpha) / self.alpha
    }
}

/// One Steklov eigenpair: the trace side, the 0-based mode index, the
/// eigenvalue, and the transverse frequency of its `phi_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteklovMode {
    pub side: Side,
    pub index: usize,
    pub eigenvalue: f64,
    pub frequency: f64,
}

// ---------------------------------------------------------------- transverse

/// The lateral eigenbasis on `(0, l1)`: L2-orthonormal functions
/// `phi_k(x) = c*cos(s*x) + d*sin(s*x)`.
///
/// Building one of these up front (rather than recomputing Robin roots per
/// evaluation) is what makes series evaluation cheap; the struct is plain
/// data and serializes with the fields that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransverseBasis {
    l1: f64,
    lateral: LateralCondition,
    modes: Vec<TransverseMode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct TransverseMode {
    /// Frequency `s_k`; 0 for the Neumann constant mode.
    freq: f64,
    /// Amplitude of `cos(s*x)` (for the constant mode, the constant itself).
    c: f64,
    /// Amplitude of `sin(s*x)`.
    d: f64,
}

impl TransverseBasis {
    /// Builds the first `count` transverse modes.
    pub fn build(l1: f64, lateral: LateralCondition, count: usize) -> Result<Self> {
        if !(l1.is_finite() && l1 > 0.0) {
            return Err(invalid(format!("transverse interval length must be positive, got {l1}")));
        }
        let modes = match lateral.kind {
            LateralKind::Neumann => (0..count)
                .map(|k| {
                    if k == 0 {
                        TransverseMode {
                            freq: 0.0,
                            c: 1.0 / l1.sqrt(),
                            d: 0.0,
                        }
                    } else {
                        TransverseMode {
                            freq: k as f64 * std::f64::consts::PI / l1,
                            c: (2.0 / l1).sqrt(),
                            d: 0.0,
                        }
                    }
                })
                .collect(),
            LateralKind::Dirichlet => (0..count)
                .map(|k| TransverseMode {
                    freq: (k + 1) as f64 * std::f64::consts::PI / l1,
                    c: 0.0,
                    d: (2.0 / l1).sqrt(),
                })
                .collect(),
            LateralKind::Robin => robin_modes(l1, lateral.beta(), count)?,
        };
        Ok(Self { l1, lateral, modes })
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn lateral(&self) -> LateralCondition {
        self.lateral
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn frequency(&self, k: usize) -> f64 {
        self.modes[k].freq
    }

    /// `phi_k(x)`.
    pub fn value(&self, k: usize, x: f64) -> f64 {
        let m = &self.modes[k];
        if m.freq == 0.0 {
            m.c
        } else {
            let (sn, cs) = (m.freq * x).sin_cos();
            m.c * cs + m.d * sn
        }
    }

    /// `phi_k'(x)`.
    pub fn derivative(&self, k: usize, x: f64) -> f64 {
        let m = &self.modes[k];
        if m.freq == 0.0 {
            0.0
        } else {
            let (sn, cs) = (m.freq * x).sin_cos();
            m.freq * (-m.c * sn + m.d * cs)
        }
    }
}

/// Transverse Sturm-Liouville spectrum for the Robin lateral condition,
/// exposed as frequencies `s_k` (eigenvalues are `s_k^2`) together with the
/// L2-normalized eigenfunction amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct RobinSpectrum {
    pub l1: f64,
    pub alpha: f64,
    pub frequencies: Vec<f64>,
    /// `(c, d)` with `phi_k(x) = c*cos(s_k x) + d*sin(s_k x)`, unit L2 norm.
    pub amplitudes: Vec<(f64, f64)>,
}

impl RobinSpectrum {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.frequencies.iter().map(|s| s * s).collect()
    }

    /// Normalized residual of the secular equation at the k-th root.
    pub fn secular_residual(&self, k: usize) -> f64 {
        secular((1.0 - self.alpha) / self.alpha, self.l1, self.frequencies[k]).abs()
    }
}

/// Computes the first `count` Robin transverse eigenpairs.
///
/// Each root is isolated by a sign scan with step `pi/(4*l1)` (fine enough:
/// consecutive roots are separated by at least `pi/l1`) and polished by
/// bisection; the normalized secular residual of every returned root is
/// checked against 1e-12.
pub fn robin_spectrum(l1: f64, alpha: f64, count: usize) -> Result<RobinSpectrum> {
    let lateral = LateralCondition::robin(alpha)?;
    let modes = robin_modes(l1, lateral.beta(), count)?;
    Ok(RobinSpectrum {
        l1,
        alpha,
        frequencies: modes.iter().map(|m| m.freq).collect(),
        amplitudes: modes.iter().map(|m| (m.c, m.d)).collect(),
    })
}

/// Secular function of the Robin transverse problem, normalized by
/// `beta^2 + s^2` so its scale is O(1) for every beta.
fn secular(beta: f64, l1: f64, s: f64) -> f64 {
    let (sn, cs) = (s * l1).sin_cos();
    ((beta * beta - s * s) * sn + 2.0 * beta * s * cs) / (beta * beta + s * s)
}

fn robin_modes(l1: f64, beta: f64, count: usize) -> Result<Vec<TransverseMode>> {
    if !(l1.is_finite() && l1 > 0.0) {
        return Err(invalid(format!("transverse interval length must be positive, got {l1}")));
    }
    let f = |s: f64| secular(beta, l1, s);
    let step = std::f64::consts::PI / (4.0 * l1);
    let mut roots = Vec::with_capacity(count);
    // s = 0 is a root of the secular function but not an eigenvalue, so the
    // scan starts just above it. The first true root can be arbitrarily small
    // (s_0 ~ sqrt(2*beta/l1) as beta -> 0), which the bisection still pins
    // down because f > 0 on (0, s_0).
    let mut lo = 1e-12 * step;
    let mut flo = f(lo);
    while roots.len() < count {
        let hi = lo + step;
        let fhi = f(hi);
        if fhi == 0.0 {
            roots.push(hi);
        } else if flo.signum() != fhi.signum() {
            roots.push(bisect(&f, lo, hi));
        }
        lo = hi;
        flo = fhi;
        if lo > (count as f64 + 2.0) * std::f64::consts::PI / l1 * 2.0 {
            return Err(Error::NoConvergence(format!(
                "found only {} of {count} Robin roots within the scan range",
                roots.len()
            )));
        }
    }
    for (k, &s) in roots.iter().enumerate() {
        if f(s).abs() > 1e-12 {
            return Err(Error::NoConvergence(format!(
                "Robin root {k} has secular residual {:.3e}",
                f(s).abs()
            )));
        }
    }
    Ok(roots
        .into_iter()
        .map(|s| {
            // Raw eigenfunction cos(sx) + (beta/s) sin(sx); normalize in L2.
            let b = beta / s;
            let (s2l, c2l) = (2.0 * s * l1).sin_cos();
            let int_cos2 = l1 / 2.0 + s2l / (4.0 * s);
            let int_sin2 = l1 / 2.0 - s2l / (4.0 * s);
            let int_cross = (1.0 - c2l) / (4.0 * s);
            let norm = (int_cos2 + b * b * int_sin2 + 2.0 * b * int_cross).sqrt();
            TransverseMode {
                freq: s,
                c: 1.0 / norm,
                d: b / norm,
            }
        })
        .collect())
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval collapsed to adjacent floats
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return mid;
        }
        if flo.signum() == fmid.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

// -------------------------------------------------------------- eigenvalues

/// Steklov eigenvalue of mode `k` in the family traced on `side`.
///
/// Neumann-lateral specials: `(Bottom, 0)` has eigenvalue 0 (the constant)
/// and `(Top, 0)` has eigenvalue `1/l2` (the linear mode `y/(l2*sqrt(l1))`).
pub fn eigenvalue(domain: &RectangleDomain, lateral: &LateralCondition, side: Side, k: usize) -> Result<f64> {
    let basis = TransverseBasis::build(domain.l1, *lateral, k + 1)?;
    Ok(eigenvalue_from_basis(domain, &basis, side, k))
}

pub(crate) fn eigenvalue_from_basis(
    domain: &RectangleDomain,
    basis: &TransverseBasis,
    side: Side,
    k: usize,
) -> f64 {
    let s = basis.frequency(k);
    let theta = s * domain.l2;
    match (basis.lateral().kind(), side) {
        (LateralKind::Neumann, Side::Bottom) => {
            if k == 0 {
                0.0
            } else {
                s * theta.tanh()
            }
        }
        (LateralKind::Neumann, Side::Top) => {
            if k == 0 {
                1.0 / domain.l2
            } else {
                s / theta.tanh()
            }
        }
        // Both remaining families vanish on the opposite side.
        _ => s / theta.tanh(),
    }
}

/// Eigenvalue of the alternative top-trace family that is anchored by a
/// zero-flux (Neumann) condition at the bottom instead of a zero trace:
/// `0` for `k = 0` (the constant) and `omega_k * tanh(omega_k * l2)` above.
/// Defined for the Neumann lateral condition.
pub fn eigenvalue_flux_anchored_top(domain: &RectangleDomain, k: usize) -> Result<f64> {
    if k == 0 {
        return Ok(0.0);
    }
    let omega = k as f64 * std::f64::consts::PI / domain.l1;
    Ok(omega * (omega * domain.l2).tanh())
}

/// Bundles `eigenvalue` with the transverse frequency into a [`SteklovMode`].
pub fn mode(domain: &RectangleDomain, lateral: &LateralCondition, side: Side, k: usize) -> Result<SteklovMode> {
    let basis = TransverseBasis::build(domain.l1, *lateral, k + 1)?;
    Ok(SteklovMode {
        side,
        index: k,
        eigenvalue: eigenvalue_from_basis(domain, &basis, side, k),
        frequency: basis.frequency(k),
    })
}

// -------------------------------------------------------------- evaluation

/// Vertical profile `P(y)` of a mode (unit value on its trace side) and its
/// derivative. Factored out so the series solvers and the mode evaluator
/// agree bit for bit.
pub(crate) fn profile(
    domain: &RectangleDomain,
    kind: LateralKind,
    side: Side,
    k: usize,
    freq: f64,
    y: f64,
) -> f64 {
    let l2 = domain.l2;
    match (kind, side) {
        (LateralKind::Neumann, Side::Bottom) => {
            if k == 0 {
                1.0
            } else {
                hyp::cosh_ratio(freq * (l2 - y), freq * l2)
            }
        }
        (LateralKind::Neumann, Side::Top) => {
            if k == 0 {
                y / l2
            } else {
                hyp::sinh_ratio(freq * y, freq * l2)
            }
        }
        (_, Side::Bottom) => hyp::sinh_ratio(freq * (l2 - y), freq * l2),
        (_, Side::Top) => hyp::sinh_ratio(freq * y, freq * l2),
    }
}

/// d/dy of [`profile`].
pub(crate) fn profile_derivative(
    domain: &RectangleDomain,
    kind: LateralKind,
    side: Side,
    k: usize,
    freq: f64,
    y: f64,
) -> f64 {
    let l2 = domain.l2;
    match (kind, side) {
        (LateralKind::Neumann, Side::Bottom) => {
            if k == 0 {
                0.0
            } else {
                -freq * hyp::sinh_cosh_ratio(freq * (l2 - y), freq * l2)
            }
        }
        (LateralKind::Neumann, Side::Top) => {
            if k == 0 {
                1.0 / l2
            } else {
                freq * hyp::cosh_sinh_ratio(freq * y, freq * l2)
            }
        }
        (_, Side::Bottom) => -freq * hyp::cosh_sinh_ratio(freq * (l2 - y), freq * l2),
        (_, Side::Top) => freq * hyp::cosh_sinh_ratio(freq * y, freq * l2),
    }
}

/// Evaluates the Steklov mode `psi_{side,k}` at an interior or boundary
/// point of the closed rectangle.
pub fn mode_value(
    domain: &RectangleDomain,
    lateral: &LateralCondition,
    side: Side,
    k: usize,
    x: f64,
    y: f64,
) -> Result<f64> {
    check_point(domain, x, y)?;
    let basis = TransverseBasis::build(domain.l1, *lateral, k + 1)?;
    Ok(basis.value(k, x) * profile(domain, lateral.kind(), side, k, basis.frequency(k), y))
}

/// Gradient `(d/dx, d/dy)` of the Steklov mode at a point of the closed
/// rectangle.
pub fn mode_gradient(
    domain: &RectangleDomain,
    lateral: &LateralCondition,
    side: Side,
    k: usize,
    x: f64,
    y: f64,
) -> Result<(f64, f64)> {
    check_point(domain, x, y)?;
    let basis = TransverseBasis::build(domain.l1, *lateral, k + 1)?;
    let freq = basis.frequency(k);
    let kind = lateral.kind();
    Ok((
        basis.derivative(k, x) * profile(domain, kind, side, k, freq, y),
        basis.value(k, x) * profile_derivative(domain, kind, side, k, freq, y),
    ))
}

/// Value of the flux-anchored top-family mode (see
/// [`eigenvalue_flux_anchored_top`]).
pub fn mode_value_flux_anchored_top(domain: &RectangleDomain, k: usize, x: f64, y: f64) -> Result<f64> {
    check_point(domain, x, y)?;
    let basis = TransverseBasis::build(domain.l1, LateralCondition::neumann(), k + 1)?;
    if k == 0 {
        return Ok(basis.value(0, x));
    }
    let freq = basis.frequency(k);
    Ok(basis.value(k, x) * hyp::cosh_ratio(freq * y, freq * domain.l2))
}

fn check_point(domain: &RectangleDomain, x: f64, y: f64) -> Result<()> {
    if !domain.contains(x, y) {
        return Err(invalid(format!(
            "point ({x}, {y}) outside the closed rectangle [0, {}] x [0, {}]",
            domain.l1, domain.l2
        )));
    }
    Ok(())
}

// ------------------------------------------------------------------- gram

/// Gram matrix of the first `kmax` transverse traces under the composite
/// trapezoid rule with `points` nodes (half weights at the ends).
///
/// That rule integrates products of integer-frequency trig functions exactly
/// (below the aliasing threshold `points - 1 > kmax`), so for the Neumann and
/// Dirichlet variants the result is the identity to rounding already at
/// `points = 4*kmax`. For Robin traces the frequencies are irrational and
/// the rule is O(h^2); use a denser grid there.
pub fn trace_gram(
    domain: &RectangleDomain,
    lateral: &LateralCondition,
    kmax: usize,
    points: usize,
) -> Result<nalgebra::DMatrix<f64>> {
    if kmax == 0 {
        return Err(invalid("gram needs at least one mode"));
    }
    if points < 2 {
        return Err(invalid("gram quadrature needs at least two points"));
    }
    let basis = TransverseBasis::build(domain.l1, *lateral, kmax)?;
    let h = domain.l1 / (points - 1) as f64;
    let mut values = nalgebra::DMatrix::zeros(points, kmax);
    for i in 0..points {
        let x = i as f64 * h;
        for k in 0..kmax {
            values[(i, k)] = basis.value(k, x);
        }
    }
    let mut gram = nalgebra::DMatrix::zeros(kmax, kmax);
    for a in 0..kmax {
        for b in a..kmax {
            let mut acc = 0.0;
            for i in 0..points {
                let w = if i == 0 || i == points - 1 { 0.5 } else { 1.0 };
                acc += w * values[(i, a)] * values[(i, b)];
            }
            gram[(a, b)] = acc * h;
            gram[(b, a)] = gram[(a, b)];
        }
    }
    Ok(gram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pi_domain() -> RectangleDomain {
        RectangleDomain::new(std::f64::consts::PI, 1.0).unwrap()
    }

    #[test]
    fn neumann_eigenvalues_match_closed_forms() {
        let d = pi_domain();
        let nl = LateralCondition::neumann();
        // tanh(1), cotanh(1), 2*tanh(2), 5*tanh(5): frozen to 16 digits.
        assert_abs_diff_eq!(eigenvalue(&d, &nl, Side::Bottom, 0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            eigenvalue(&d, &nl, Side::Bottom, 1).unwrap(),
            0.7615941559557649,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(eigenvalue(&d, &nl, Side::Top, 0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            eigenvalue(&d, &nl, Side::Top, 1).unwrap(),
            1.3130352854993313,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            eigenvalue(&d, &nl, Side::Bottom, 2).unwrap(),
            1.9280551601516338,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            eigenvalue(&d, &nl, Side::Bottom, 5).unwrap(),
            4.999546021312976,
            epsilon = 1e-14
        );
    }

    #[test]
    fn general_rectangle_uses_scaled_frequency() {
        // l1 = 2: omega_1 = pi/2, eigenvalue (pi/2)tanh(pi/2).
        let d = RectangleDomain::new(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(
            eigenvalue(&d, &LateralCondition::neumann(), Side::Bottom, 1).unwrap(),
            1.4406595199775146,
            epsilon = 1e-14
        );
    }

    #[test]
    fn mode_values_match_closed_forms() {
        let d = pi_domain();
        let nl = LateralCondition::neumann();
        // psi_{0,3}(0, 1) = sqrt(2/pi)/cosh(3).
        assert_abs_diff_eq!(
            mode_value(&d, &nl, Side::Bottom, 3, 0.0, 1.0).unwrap(),
            0.07925221974451335,
            epsilon = 1e-15
        );
        // Unit trace on the spectral side.
        assert_abs_diff_eq!(
            mode_value(&d, &nl, Side::Bottom, 3, 0.0, 0.0).unwrap(),
            0.7978845608028654,
            epsilon = 1e-15
        );
        // Linear mode y/(l2*sqrt(l1)).
        assert_abs_diff_eq!(
            mode_value(&d, &nl, Side::Top, 0, 1.0, 0.25).unwrap(),
            0.25 / std::f64::consts::PI.sqrt(),
            epsilon = 1e-15
        );
        // Top family vanishes at the bottom.
        assert_eq!(mode_value(&d, &nl, Side::Top, 4, 0.7, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn flux_anchored_top_family() {
        let d = pi_domain();
        assert_eq!(eigenvalue_flux_anchored_top(&d, 0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            eigenvalue_flux_anchored_top(&d, 1).unwrap(),
            0.7615941559557649,
            epsilon = 1e-15
        );
        // Constant mode 1/sqrt(pi); cosh profile equals 1/cosh(3) at y=0 for k=3.
        assert_abs_diff_eq!(
            mode_value_flux_anchored_top(&d, 0, 1.0, 0.3).unwrap(),
            0.5641895835477563,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            mode_value_flux_anchored_top(&d, 3, 0.0, 0.0).unwrap(),
            0.07925221974451335,
            epsilon = 1e-15
        );
    }

    #[test]
    fn zero_eigenvalue_only_for_the_neumann_constant() {
        let d = pi_domain();
        for k in 0..10 {
            for side in [Side::Bottom, Side::Top] {
                let nl = eigenvalue(&d, &LateralCondition::neumann(), side, k).unwrap();
                if side == Side::Bottom && k == 0 {
                    assert_eq!(nl, 0.0);
                } else {
                    assert!(nl > 0.0);
                }
                assert!(eigenvalue(&d, &LateralCondition::dirichlet(), side, k).unwrap() > 0.0);
                assert!(eigenvalue(&d, &LateralCondition::robin(0.5).unwrap(), side, k).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn robin_spectrum_frozen_values() {
        // l1 = pi, alpha = 0.5 (beta = 1); roots from an independent
        // high-precision scan.
        let spec = robin_spectrum(std::f64::consts::PI, 0.5, 2).unwrap();
        assert_abs_diff_eq!(spec.frequencies[0], 0.6383222623342946, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.frequencies[1], 1.3957738437964170, epsilon = 1e-12);
        assert!(spec.secular_residual(0) <= 1e-12);
        assert!(spec.secular_residual(1) <= 1e-12);
        let d = pi_domain();
        let rl = LateralCondition::robin(0.5).unwrap();
        assert_abs_diff_eq!(
            eigenvalue(&d, &rl, Side::Bottom, 0).unwrap(),
            1.1322666699476286,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            eigenvalue(&d, &rl, Side::Bottom, 1).unwrap(),
            1.5781535915548240,
            epsilon = 1e-12
        );
    }

    #[test]
    fn robin_limits_recover_neumann_and_dirichlet_frequencies() {
        let l1 = std::f64::consts::PI;
        // alpha -> 1: s_k -> k*pi/l1 = k, and lambda_0 ~ 2*beta/l1.
        let near_neumann = robin_spectrum(l1, 1.0 - 1e-6, 4).unwrap();
        let beta = 1e-6 / (1.0 - 1e-6);
        let lambda0 = near_neumann.frequencies[0].powi(2);
        assert!((lambda0 / (2.0 * beta / l1) - 1.0).abs() < 1e-4);
        for k in 1..4 {
            assert!((near_neumann.frequencies[k] / k as f64 - 1.0).abs() < 1e-4);
        }
        // alpha -> 0: s_k -> (k+1)*pi/l1 (Dirichlet spectrum, shifted index).
        let near_dirichlet = robin_spectrum(l1, 1e-6, 4).unwrap();
        for k in 0..4 {
            assert!((near_dirichlet.frequencies[k] / (k + 1) as f64 - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn robin_orthonormality_against_closed_form_integrals() {
        // Exact integrals of trig products as the independent oracle.
        let l1 = std::f64::consts::PI;
        let spec = robin_spectrum(l1, 0.3, 6).unwrap();
        let pair_integral = |sa: f64, (ca, da): (f64, f64), sb: f64, (cb, db): (f64, f64)| {
            let cc = 0.5 * (sinc_int((sa - sb) * l1) + sinc_int((sa + sb) * l1)) * l1;
            let ss = 0.5 * (sinc_int((sa - sb) * l1) - sinc_int((sa + sb) * l1)) * l1;
            let cs = 0.5 * (cosc_int((sb - sa) * l1) + cosc_int((sb + sa) * l1)) * l1;
            let sc = 0.5 * (cosc_int((sa - sb) * l1) + cosc_int((sa + sb) * l1)) * l1;
            ca * cb * cc + da * db * ss + ca * db * cs + da * cb * sc
        };
        for a in 0..6 {
            for b in 0..6 {
                let v = pair_integral(
                    spec.frequencies[a],
                    spec.amplitudes[a],
                    spec.frequencies[b],
                    spec.amplitudes[b],
                );
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!(
                    (v - expected).abs() < 1e-12,
                    "gram[{a},{b}] = {v}, expected {expected}"
                );
            }
        }
        // int_0^L cos(w x) dx / L = sinc_int(w L)
        fn sinc_int(t: f64) -> f64 {
            if t.abs() < 1e-9 {
                1.0 - t * t / 6.0
            } else {
                t.sin() / t
            }
        }
        // int_0^L sin(w x) dx / L = cosc_int(w L)
        fn cosc_int(t: f64) -> f64 {
            if t.abs() < 1e-9 {
                t / 2.0
            } else {
                (1.0 - t.cos()) / t
            }
        }
    }

    #[test]
    fn trace_gram_is_identity_for_trig_variants() {
        let d = pi_domain();
        for lateral in [LateralCondition::neumann(), LateralCondition::dirichlet()] {
            for kmax in [8usize, 32] {
                let g = trace_gram(&d, &lateral, kmax, 4 * kmax).unwrap();
                for a in 0..kmax {
                    for b in 0..kmax {
                        let expected = if a == b { 1.0 } else { 0.0 };
                        assert!(
                            (g[(a, b)] - expected).abs() < 1e-10,
                            "{:?} gram[{a},{b}] = {}",
                            lateral.kind(),
                            g[(a, b)]
                        );
                    }
                }
            }
        }
        // Robin: trapezoid is only O(h^2); dense grid reaches 1e-8.
        let g = trace_gram(&d, &LateralCondition::robin(0.5).unwrap(), 6, 200_000).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((g[(a, b)] - expected).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn modes_are_discretely_harmonic_with_second_order() {
        // 5-point Laplacian residual should shrink ~4x per mesh refinement.
        let d = pi_domain();
        let nl = LateralCondition::neumann();
        let residual = |n: usize| -> f64 {
            let hx = d.l1() / n as f64;
            let hy = d.l2() / n as f64;
            let mut worst: f64 = 0.0;
            for i in 1..n {
                for j in 1..n {
                    let x = i as f64 * hx;
                    let y = j as f64 * hy;
                    let c = mode_value(&d, &nl, Side::Bottom, 2, x, y).unwrap();
                    let e = mode_value(&d, &nl, Side::Bottom, 2, x + hx, y).unwrap();
                    let w = mode_value(&d, &nl, Side::Bottom, 2, x - hx, y).unwrap();
                    let nn = mode_value(&d, &nl, Side::Bottom, 2, x, y + hy).unwrap();
                    let s = mode_value(&d, &nl, Side::Bottom, 2, x, y - hy).unwrap();
                    let lap = (e - 2.0 * c + w) / (hx * hx) + (nn - 2.0 * c + s) / (hy * hy);
                    worst = worst.max(lap.abs());
                }
            }
            worst
        };
        let r1 = residual(16);
        let r2 = residual(32);
        let order = (r1 / r2).log2();
        assert!(order >= 1.9, "observed order {order}");
    }

    #[test]
    fn steklov_boundary_relation_via_one_sided_differences() {
        let d = pi_domain();
        let h = 1e-4;
        for (lateral, side, k) in [
            (LateralCondition::neumann(), Side::Bottom, 1),
            (LateralCondition::neumann(), Side::Bottom, 3),
            (LateralCondition::neumann(), Side::Top, 2),
            (LateralCondition::robin(0.5).unwrap(), Side::Bottom, 1),
            (LateralCondition::dirichlet(), Side::Bottom, 2),
        ] {
            let mu = eigenvalue(&d, &lateral, side, k).unwrap();
            for i in 1..8 {
                let x = i as f64 * d.l1() / 8.0;
                // v1 sits one step h inside the domain, so in both cases the
                // outward normal derivative is (v0 - v1)/h to first order.
                let (trace_y, inner_y) = match side {
                    Side::Bottom => (0.0, h),
                    Side::Top => (d.l2(), d.l2() - h),
                };
                let v0 = mode_value(&d, &lateral, side, k, x, trace_y).unwrap();
                let v1 = mode_value(&d, &lateral, side, k, x, inner_y).unwrap();
                let normal_derivative = (v0 - v1) / h;
                assert!(
                    (normal_derivative - mu * v0).abs() < 5e-3 * (1.0 + mu * mu),
                    "side {side:?} k {k}"
                );
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(RectangleDomain::new(-1.0, 1.0).is_err());
        assert!(RectangleDomain::new(1.0, f64::NAN).is_err());
        assert!(RectangleDomain::new(1.0, 1.0).unwrap().with_interior_level(1.5).is_err());
        assert!(LateralCondition::robin(0.0).is_err());
        assert!(LateralCondition::robin(1.0).is_err());
        assert!(LateralCondition::from_alpha(0.0).is_ok());
        let d = pi_domain();
        assert!(mode_value(&d, &LateralCondition::neumann(), Side::Bottom, 1, -0.1, 0.5).is_err());
    }
}
