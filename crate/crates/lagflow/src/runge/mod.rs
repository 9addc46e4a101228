//! Constructive holomorphic approximation: rational fits with prescribed
//! poles, polynomial indicator cutoffs, smooth partitions of unity, and the
//! time-varying blend that welds per-node fits into one smoothly
//! time-dependent approximant.
//!
//! The classical existence theorems are made constructive the same way
//! throughout: fit by linear least squares in an explicit basis on a dense
//! sample of the compact set, validate the sup error on a finer held-out
//! sample, and escalate the degree until the target is met or a budget is
//! exhausted. The maximum principle justifies sampling only boundaries:
//! every error function involved is holomorphic inside the sampled region.
//!
//! Holomorphic functions double as velocity fields through
//! [`cauchy_riemann_velocity`]: `f = f1 + i f2` yields `V_f = (f1, -f2)`,
//! which the Cauchy–Riemann equations make simultaneously divergence- and
//! curl-free.

pub mod assemble;
pub mod blend;
pub mod partition;

use crate::error::{invalid, Error, Result};
use nalgebra::{Complex, DMatrix, DVector};
use std::f64::consts::TAU;

/// Shorthand for the complex scalars used by the approximation machinery.
pub type C64 = Complex<f64>;

// ---------------------------------------------------------------- regions

/// Closed disk in the complex plane — the compact sets all fits sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    center: C64,
    radius: f64,
}

impl Region {
    pub fn disk(center: C64, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0)
            || !center.re.is_finite()
            || !center.im.is_finite()
        {
            return Err(invalid("region needs a finite center and positive radius"));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> C64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, z: C64, margin: f64) -> bool {
        (z - self.center).norm() <= self.radius + margin
    }

    /// `n` equispaced boundary points, rotated by `phase` (in units of one
    /// sample spacing) so fit and validation grids never coincide.
    pub fn boundary_samples(&self, n: usize, phase: f64) -> Vec<C64> {
        (0..n)
            .map(|j| {
                let t = TAU * (j as f64 + phase) / n as f64;
                self.center + self.radius * C64::new(t.cos(), t.sin())
            })
            .collect()
    }

    /// Polar grid over the closed disk (center included) for set-valued
    /// sampling (indicator fits, escape checks).
    pub fn interior_samples(&self, rings: usize, per_ring: usize) -> Vec<C64> {
        let mut out = vec![self.center];
        for i in 1..=rings {
            let r = self.radius * i as f64 / rings as f64;
            for j in 0..per_ring {
                let t = TAU * j as f64 / per_ring as f64;
                out.push(self.center + r * C64::new(t.cos(), t.sin()));
            }
        }
        out
    }
}

// ----------------------------------------------------- rational functions

/// One pole with its stack of coefficients: `coefficients[m-1]` multiplies
/// `(z - location)^{-m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleTerm {
    pub location: C64,
    pub coefficients: Vec<C64>,
}

/// Rational function `P(z) + sum over poles of sum_m c_m (z - s)^{-m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    poly: Vec<C64>,
    poles: Vec<PoleTerm>,
}

impl RationalFunction {
    pub fn new(poly: Vec<C64>, poles: Vec<PoleTerm>) -> Result<Self> {
        if poly.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(invalid("polynomial coefficients must be finite"));
        }
        for p in &poles {
            if !p.location.re.is_finite() || !p.location.im.is_finite() {
                return Err(invalid("pole locations must be finite"));
            }
            if p.coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(invalid("pole coefficients must be finite"));
            }
        }
        Ok(Self { poly, poles })
    }

    pub fn constant(value: C64) -> Self {
        Self {
            poly: vec![value],
            poles: Vec::new(),
        }
    }

    pub fn poly(&self) -> &[C64] {
        &self.poly
    }

    pub fn poles(&self) -> &[PoleTerm] {
        &self.poles
    }

    /// Total evaluation; returns non-finite values at the poles themselves,
    /// which downstream domain guards treat as escapes.
    pub fn evaluate(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for c in self.poly.iter().rev() {
            acc = acc * z + c;
        }
        for pole in &self.poles {
            let w = C64::new(1.0, 0.0) / (z - pole.location);
            let mut tail = C64::new(0.0, 0.0);
            for c in pole.coefficients.iter().rev() {
                tail = (tail + c) * w;
            }
            acc += tail;
        }
        acc
    }
}

/// Velocity field attached to a holomorphic value `f = f1 + i f2`:
/// `(f1, -f2)`. Divergence and curl both vanish wherever `f` is holomorphic.
pub fn cauchy_riemann_velocity(value: C64) -> (f64, f64) {
    (value.re, -value.im)
}

// --------------------------------------------------------- least squares

/// Column layout of the fitting basis: `z^0..z^d`, then for each pole
/// `(z-s)^{-1}..(z-s)^{-d}`.
fn basis_columns(degree: usize, n_poles: usize) -> usize {
    degree + 1 + n_poles * degree
}

fn basis_matrix(samples: &[C64], poles: &[C64], degree: usize) -> DMatrix<C64> {
    let cols = basis_columns(degree, poles.len());
    let mut a = DMatrix::from_element(samples.len(), cols, C64::new(0.0, 0.0));
    for (row, &z) in samples.iter().enumerate() {
        let mut p = C64::new(1.0, 0.0);
        for j in 0..=degree {
            a[(row, j)] = p;
            p *= z;
        }
        for (i, &s) in poles.iter().enumerate() {
            let w = C64::new(1.0, 0.0) / (z - s);
            let mut pw = w;
            for m in 0..degree {
                a[(row, degree + 1 + i * degree + m)] = pw;
                pw *= w;
            }
        }
    }
    a
}

/// Least squares with column equilibration; returns the coefficient vector
/// in the unscaled basis.
fn equilibrated_ls(a: &DMatrix<C64>, rhs: &DVector<C64>) -> Result<DVector<C64>> {
    let mut scaled = a.clone();
    let mut scales = vec![1.0f64; a.ncols()];
    for j in 0..a.ncols() {
        let norm = scaled.column(j).norm();
        if norm > 0.0 {
            scales[j] = norm;
            for i in 0..a.nrows() {
                scaled[(i, j)] /= C64::new(norm, 0.0);
            }
        }
    }
    let svd = scaled.svd(true, true);
    let cutoff = 1e-14 * svd.singular_values.max();
    let mut x = svd
        .solve(rhs, cutoff)
        .map_err(|e| Error::LinearSolve(format!("rational least squares failed: {e}")))?;
    for j in 0..x.nrows() {
        x[j] /= C64::new(scales[j], 0.0);
    }
    Ok(x)
}

fn rational_from_coefficients(poles: &[C64], degree: usize, coeffs: &DVector<C64>) -> RationalFunction {
    let poly: Vec<C64> = (0..=degree).map(|j| coeffs[j]).collect();
    let pole_terms = poles
        .iter()
        .enumerate()
        .map(|(i, &s)| PoleTerm {
            location: s,
            coefficients: (0..degree)
                .map(|m| coeffs[degree + 1 + i * degree + m])
                .collect(),
        })
        .collect();
    RationalFunction { poly, poles: pole_terms }
}

fn max_abs_error(f: &dyn Fn(C64) -> C64, r: &RationalFunction, samples: &[C64]) -> f64 {
    samples
        .iter()
        .map(|&z| (r.evaluate(z) - f(z)).norm())
        .fold(0.0, f64::max)
}

// ------------------------------------------------------------- Runge fit

/// A validated rational fit.
#[derive(Debug, Clone)]
pub struct RungeFit {
    pub rational: RationalFunction,
    pub degree: usize,
    /// Max error on the fit samples.
    pub fit_error: f64,
    /// Max error on the held-out validation samples.
    pub validated_error: f64,
}

fn check_samples_avoid_poles(samples: &[C64], poles: &[C64]) -> Result<()> {
    for &z in samples {
        for &s in poles {
            if (z - s).norm() < 1e-9 {
                return Err(invalid(format!(
                    "sample point {z} collides with prescribed pole {s}"
                )));
            }
        }
    }
    Ok(())
}

/// Fits a rational function with the prescribed poles to `f` by least
/// squares on `fit_samples`, validating the sup error on
/// `validation_samples` and raising the degree until `eps_target` is met.
///
/// On budget exhaustion returns the approximation-failure error carrying the
/// best validated error achieved; the fit error is nonincreasing in the
/// degree (nested bases), the validated error nearly so.
pub fn runge_approximate(
    f: &dyn Fn(C64) -> C64,
    fit_samples: &[C64],
    validation_samples: &[C64],
    poles: &[C64],
    degree_budget: usize,
    eps_target: f64,
) -> Result<RungeFit> {
    if fit_samples.len() < 2 || validation_samples.is_empty() {
        return Err(invalid("rational fit needs fit and validation samples"));
    }
    if !(eps_target.is_finite() && eps_target > 0.0) {
        return Err(invalid("rational fit target must be positive"));
    }
    check_samples_avoid_poles(fit_samples, poles)?;
    check_samples_avoid_poles(validation_samples, poles)?;
    let rhs = DVector::from_iterator(fit_samples.len(), fit_samples.iter().map(|&z| f(z)));
    let mut best: Option<RungeFit> = None;
    for degree in 0..=degree_budget {
        if basis_columns(degree, poles.len()) > fit_samples.len() {
            break;
        }
        let a = basis_matrix(fit_samples, poles, degree);
        let coeffs = equilibrated_ls(&a, &rhs)?;
        let rational = rational_from_coefficients(poles, degree, &coeffs);
        let fit_error = max_abs_error(f, &rational, fit_samples);
        let validated_error = max_abs_error(f, &rational, validation_samples);
        let candidate = RungeFit {
            rational,
            degree,
            fit_error,
            validated_error,
        };
        if best
            .as_ref()
            .map(|b| candidate.validated_error < b.validated_error)
            .unwrap_or(true)
        {
            best = Some(candidate);
        }
        let b = best.as_ref().unwrap();
        if b.validated_error <= eps_target {
            return Ok(best.unwrap());
        }
    }
    Err(Error::ApproximationFailure {
        achieved: best.map(|b| b.validated_error).unwrap_or(f64::INFINITY),
        target: eps_target,
    })
}

// ------------------------------------------------------ indicator cutoff

/// A validated polynomial indicator fit: close to 1 on one compact set and
/// close to 0 on another.
#[derive(Debug, Clone)]
pub struct CutoffFit {
    /// Polynomial coefficients, ascending powers.
    pub polynomial: Vec<C64>,
    pub degree: usize,
    /// Validated max of `|P - 1|` over the "ones" set.
    pub error_on_ones: f64,
    /// Validated max of `|P|` over the "zeros" set.
    pub error_on_zeros: f64,
}

fn split_half(samples: &[C64]) -> (Vec<C64>, Vec<C64>) {
    if samples.len() < 2 {
        return (samples.to_vec(), samples.to_vec());
    }
    let fit = samples.iter().step_by(2).copied().collect();
    let val = samples.iter().skip(1).step_by(2).copied().collect();
    (fit, val)
}

/// Fits a polynomial that is `1` on `ones_samples` and `0` on
/// `zeros_samples` within `eps / norm_bound` on both, escalating the degree
/// up to `degree_budget`. Multiplying a rational `R` bounded by `norm_bound`
/// with the result switches it off on the zeros set while perturbing it by
/// at most `eps` on the ones set.
pub fn mergelyan_cutoff(
    ones_samples: &[C64],
    zeros_samples: &[C64],
    norm_bound: f64,
    eps: f64,
    degree_budget: usize,
) -> Result<CutoffFit> {
    if !(norm_bound.is_finite() && norm_bound > 0.0 && eps.is_finite() && eps > 0.0) {
        return Err(invalid("cutoff needs positive norm bound and target"));
    }
    let target = eps / norm_bound;
    if zeros_samples.is_empty() {
        return Ok(CutoffFit {
            polynomial: vec![C64::new(1.0, 0.0)],
            degree: 0,
            error_on_ones: 0.0,
            error_on_zeros: 0.0,
        });
    }
    if ones_samples.is_empty() {
        return Ok(CutoffFit {
            polynomial: vec![C64::new(0.0, 0.0)],
            degree: 0,
            error_on_ones: 0.0,
            error_on_zeros: 0.0,
        });
    }
    for &u in ones_samples {
        for &v in zeros_samples {
            if (u - v).norm() < 1e-12 {
                return Err(invalid("indicator sets must be disjoint"));
            }
        }
    }
    let (fit_u, val_u) = split_half(ones_samples);
    let (fit_v, val_v) = split_half(zeros_samples);
    let mut fit_samples = fit_u.clone();
    fit_samples.extend_from_slice(&fit_v);
    let rhs = DVector::from_iterator(
        fit_samples.len(),
        fit_u
            .iter()
            .map(|_| C64::new(1.0, 0.0))
            .chain(fit_v.iter().map(|_| C64::new(0.0, 0.0))),
    );
    let mut best: Option<CutoffFit> = None;
    for degree in 0..=degree_budget {
        if degree + 1 > fit_samples.len() {
            break;
        }
        let a = basis_matrix(&fit_samples, &[], degree);
        let coeffs = equilibrated_ls(&a, &rhs)?;
        let poly = rational_from_coefficients(&[], degree, &coeffs);
        let err_u = val_u
            .iter()
            .map(|&z| (poly.evaluate(z) - C64::new(1.0, 0.0)).norm())
            .fold(0.0, f64::max);
        let err_v = val_v
            .iter()
            .map(|&z| poly.evaluate(z).norm())
            .fold(0.0, f64::max);
        let candidate = CutoffFit {
            polynomial: poly.poly.clone(),
            degree,
            error_on_ones: err_u,
            error_on_zeros: err_v,
        };
        let score = err_u.max(err_v);
        if best
            .as_ref()
            .map(|b| score < b.error_on_ones.max(b.error_on_zeros))
            .unwrap_or(true)
        {
            best = Some(candidate);
        }
        let b = best.as_ref().unwrap();
        if b.error_on_ones <= target && b.error_on_zeros <= target {
            return Ok(best.unwrap());
        }
    }
    Err(Error::ApproximationFailure {
        achieved: best
            .map(|b| b.error_on_ones.max(b.error_on_zeros))
            .unwrap_or(f64::INFINITY),
        target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_disk() -> Region {
        Region::disk(C64::new(0.0, 0.0), 1.0).unwrap()
    }

    #[test]
    fn in_basis_rational_is_recovered_exactly() {
        let region = unit_disk();
        let s = C64::new(3.0, 0.5);
        let f = move |z: C64| C64::new(1.0, 0.0) / (z - s);
        let fit = region.boundary_samples(64, 0.0);
        let val = region.boundary_samples(97, 0.37);
        let result = runge_approximate(&f, &fit, &val, &[s], 4, 1e-13).unwrap();
        assert!(result.validated_error <= 1e-13, "{}", result.validated_error);
        // The recovered coefficient of (z-s)^{-1} is 1.
        let c = result.rational.poles()[0].coefficients[0];
        assert!((c - C64::new(1.0, 0.0)).norm() <= 1e-10);
    }

    #[test]
    fn exponential_meets_the_polynomial_degree_twelve_budget() {
        let region = unit_disk();
        let f = |z: C64| z.exp();
        let fit = region.boundary_samples(128, 0.0);
        let val = region.boundary_samples(193, 0.5);
        let result = runge_approximate(&f, &fit, &val, &[], 12, 1e-8).unwrap();
        assert!(result.degree <= 12);
        assert!(result.validated_error <= 1e-8, "{}", result.validated_error);
        // Interior spot checks stay within the boundary-validated error
        // (maximum principle).
        for z in region.interior_samples(3, 8) {
            let err = (result.rational.evaluate(z) - f(z)).norm();
            assert!(err <= 2.0 * result.validated_error + 1e-14);
        }
    }

    #[test]
    fn fit_error_decreases_monotonically_with_degree() {
        let region = unit_disk();
        let s = C64::new(2.0, 0.0);
        let f = move |z: C64| C64::new(1.0, 0.0) / (z - s);
        let fit = region.boundary_samples(96, 0.0);
        let val = region.boundary_samples(133, 0.5);
        let pole = C64::new(3.0, 0.0);
        // Nested bases make the least-squares residual norm nonincreasing.
        let rhs = DVector::from_iterator(fit.len(), fit.iter().map(|&z| f(z)));
        let mut previous = f64::INFINITY;
        for degree in 0..=8 {
            let a = basis_matrix(&fit, &[pole], degree);
            let coeffs = equilibrated_ls(&a, &rhs).unwrap();
            let resid = (&a * &coeffs - &rhs).norm();
            assert!(
                resid <= previous * (1.0 + 1e-6) + 1e-13,
                "degree {degree}: {resid} after {previous}"
            );
            previous = resid;
        }
        assert!(previous <= 1e-6, "degree-8 residual {previous}");
        // Validation does not blow up relative to fit error (anti-overfit).
        let result = runge_approximate(&f, &fit, &val, &[pole], 8, 1e-6).unwrap();
        assert!(result.validated_error <= 2.0 * result.fit_error.max(1e-15));
    }

    #[test]
    fn budget_exhaustion_reports_the_achieved_error() {
        let region = unit_disk();
        let f = |z: C64| z.exp();
        let fit = region.boundary_samples(64, 0.0);
        let val = region.boundary_samples(97, 0.5);
        let err = runge_approximate(&f, &fit, &val, &[], 1, 1e-12).unwrap_err();
        match err {
            Error::ApproximationFailure { achieved, target } => {
                assert!(achieved > target);
                assert!(achieved < 1.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn cutoff_separates_two_distant_disks() {
        let ones = Region::disk(C64::new(0.0, 0.0), 0.3)
            .unwrap()
            .interior_samples(4, 24);
        let zeros = Region::disk(C64::new(2.5, 0.0), 0.3)
            .unwrap()
            .interior_samples(4, 24);
        let cut = mergelyan_cutoff(&ones, &zeros, 1.0, 1e-2, 40).unwrap();
        assert!(cut.degree <= 40);
        assert!(cut.error_on_ones <= 1e-2);
        assert!(cut.error_on_zeros <= 1e-2);
        // Product estimate: multiplying a bounded rational by the cutoff
        // perturbs it by at most eps on the ones set and shrinks it below
        // eps on the zeros set.
        let s = C64::new(1.25, 0.0);
        let r = RationalFunction::new(
            vec![],
            vec![PoleTerm {
                location: s,
                coefficients: vec![C64::new(0.5, 0.0)],
            }],
        )
        .unwrap();
        let norm_r = ones
            .iter()
            .chain(zeros.iter())
            .map(|&z| r.evaluate(z).norm())
            .fold(0.0, f64::max);
        let cut2 = mergelyan_cutoff(&ones, &zeros, norm_r, 1e-2, 40).unwrap();
        let p = RationalFunction::new(cut2.polynomial.clone(), vec![]).unwrap();
        for &z in &ones {
            let diff = (p.evaluate(z) * r.evaluate(z) - r.evaluate(z)).norm();
            assert!(diff <= 2.0 * 1e-2, "ones-set perturbation {diff}");
        }
        for &z in &zeros {
            let v = (p.evaluate(z) * r.evaluate(z)).norm();
            assert!(v <= 2.0 * 1e-2, "zeros-set leak {v}");
        }
    }

    #[test]
    fn cutoff_trivial_cases() {
        let ones = unit_disk().interior_samples(2, 8);
        let empty: Vec<C64> = Vec::new();
        let cut = mergelyan_cutoff(&ones, &empty, 1.0, 1e-3, 10).unwrap();
        assert_eq!(cut.polynomial, vec![C64::new(1.0, 0.0)]);
        let cut0 = mergelyan_cutoff(&empty, &ones, 1.0, 1e-3, 10).unwrap();
        assert_eq!(cut0.polynomial, vec![C64::new(0.0, 0.0)]);
    }

    #[test]
    fn cauchy_riemann_fields_are_divergence_and_curl_free() {
        // Closed forms first.
        let f_id = |z: C64| z;
        let v = cauchy_riemann_velocity(f_id(C64::new(0.3, -0.7)));
        assert_eq!(v, (0.3, 0.7));
        let f_one = |_z: C64| C64::new(1.0, 0.0);
        assert_eq!(cauchy_riemann_velocity(f_one(C64::new(5.0, 5.0))), (1.0, 0.0));
        // Finite-difference divergence and curl of the exp field.
        let f = |z: C64| z.exp();
        let h = 1e-5;
        for (x, y) in [(0.0, 0.0), (0.3, -0.2), (-0.5, 0.4)] {
            let vel = |x: f64, y: f64| cauchy_riemann_velocity(f(C64::new(x, y)));
            let (vxp, _) = vel(x + h, y);
            let (vxm, _) = vel(x - h, y);
            let (_, vyp) = vel(x, y + h);
            let (_, vym) = vel(x, y - h);
            let div = (vxp - vxm) / (2.0 * h) + (vyp - vym) / (2.0 * h);
            let (_, wxp) = vel(x + h, y);
            let (_, wxm) = vel(x - h, y);
            let (uyp, _) = vel(x, y + h);
            let (uym, _) = vel(x, y - h);
            let curl = (wxp - wxm) / (2.0 * h) - (uyp - uym) / (2.0 * h);
            assert!(div.abs() <= 1e-6, "div {div}");
            assert!(curl.abs() <= 1e-6, "curl {curl}");
        }
    }

    #[test]
    fn sample_pole_collisions_are_rejected() {
        let region = unit_disk();
        let fit = region.boundary_samples(16, 0.0);
        let val = region.boundary_samples(17, 0.5);
        let pole_on_boundary = fit[3];
        let f = |z: C64| z;
        assert!(runge_approximate(&f, &fit, &val, &[pole_on_boundary], 3, 1e-6).is_err());
    }
}
