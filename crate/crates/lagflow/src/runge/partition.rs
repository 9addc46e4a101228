//! Smooth partitions of unity on `[0, 1]` built from the classical
//! infinitely flat bump `psi(x) = exp(-1/x)`.
//!
//! The raw bump on `(0, 1)` is `Psi(x) Psi(1-x)` with
//! `Psi(x) = integral_0^x psi`, which vanishes to infinite order at both
//! endpoints; a [`Partition`] rescales one such bump to each node interval
//! and normalizes by the pointwise sum, so the weights are smooth, live in
//! `[0, 1]`, vanish *exactly* off their intervals, and sum to 1.

use crate::error::{invalid, Result};

/// `exp(-1/x)` for `x > 0`, zero otherwise — smooth and identically zero on
/// the closed negative axis.
pub fn flat_bump(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature with Richardson correction.
fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `Psi(x) = integral_0^x exp(-1/t) dt`, evaluated by adaptive quadrature to
/// absolute tolerance `1e-12`; zero for `x <= 0`.
pub fn flat_bump_integral(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    integrate(&flat_bump, 0.0, x, 1e-13)
}

/// The normalized building-block bump: `Psi(x) Psi(1-x)`, strictly positive
/// exactly on `(0, 1)` and identically zero elsewhere.
pub fn unit_bump(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        flat_bump_integral(x) * flat_bump_integral(1.0 - x)
    }
}

/// Smooth monotone step: exactly `0` for `x <= 0`, exactly `1` for `x >= 1`,
/// `psi(x)/(psi(x) + psi(1-x))` in between (infinitely flat at both ends).
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = flat_bump(x);
        let b = flat_bump(1.0 - x);
        a / (a + b)
    }
}

/// Smooth partition of unity on `[0, 1]` subordinate to the open intervals
/// `(t_j - kappa, t_j + kappa)`.
#[derive(Debug, Clone)]
pub struct Partition {
    nodes: Vec<f64>,
    kappa: f64,
}

impl Partition {
    /// Nodes must be strictly increasing and the open intervals
    /// `(t_j - kappa, t_j + kappa)` must cover `[0, 1]` with positive slack
    /// (adjacent gaps `< 2 kappa`, endpoints strictly inside the first/last
    /// interval), otherwise the normalizing sum would vanish somewhere.
    pub fn new(nodes: Vec<f64>, kappa: f64) -> Result<Self> {
        if nodes.is_empty() {
            return Err(invalid("partition needs at least one node"));
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(invalid("partition half-width must be positive"));
        }
        if nodes.iter().any(|t| !t.is_finite()) {
            return Err(invalid("partition nodes must be finite"));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("partition nodes must be strictly increasing"));
        }
        if nodes[0] - kappa >= 0.0 {
            return Err(invalid("first interval must reach below 0"));
        }
        if nodes[nodes.len() - 1] + kappa <= 1.0 {
            return Err(invalid("last interval must reach above 1"));
        }
        if nodes.windows(2).any(|w| w[1] - w[0] >= 2.0 * kappa) {
            return Err(invalid(
                "adjacent node intervals must overlap (gap < 2*kappa)",
            ));
        }
        Ok(Self { nodes, kappa })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn raw(&self, j: usize, t: f64) -> f64 {
        unit_bump((t - (self.nodes[j] - self.kappa)) / (2.0 * self.kappa))
    }

    /// All weights `phi_j(t)`; requires `t` in `[0, 1]` (the covered range).
    pub fn weights(&self, t: f64) -> Result<Vec<f64>> {
        if !(0.0..=1.0).contains(&t) {
            return Err(invalid(format!("partition weights requested outside [0,1]: t = {t}")));
        }
        let raw: Vec<f64> = (0..self.nodes.len()).map(|j| self.raw(j, t)).collect();
        let sum: f64 = raw.iter().sum();
        if !(sum > 0.0) {
            return Err(invalid(format!("partition intervals fail to cover t = {t}")));
        }
        Ok(raw.into_iter().map(|r| r / sum).collect())
    }

    /// Single weight `phi_j(t)` — exactly zero outside
    /// `(t_j - kappa, t_j + kappa)`.
    pub fn weight(&self, j: usize, t: f64) -> Result<f64> {
        if self.raw(j, t) == 0.0 {
            return Ok(0.0);
        }
        Ok(self.weights(t)?[j])
    }

    /// Indices whose weight can be nonzero at `t`.
    pub fn active(&self, t: f64) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&j| (t - self.nodes[j]).abs() < self.kappa)
            .collect()
    }

    /// Equispaced midpoint nodes `t_j = (2j+1)/(2n)` with half-width `1/n` —
    /// the canonical refinement family used by the time-varying blend.
    pub fn equispaced(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("equispaced partition needs n >= 1"));
        }
        let nodes = (0..n).map(|j| (2 * j + 1) as f64 / (2 * n) as f64).collect();
        Self::new(nodes, 1.0 / n as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_integral_matches_the_frozen_reference_value() {
        // Independently computed with 50-digit arithmetic.
        let reference = 0.14849550677592205;
        assert!(
            (flat_bump_integral(1.0) - reference).abs() <= 1e-12,
            "Psi(1) = {}",
            flat_bump_integral(1.0)
        );
        assert_eq!(flat_bump_integral(-0.5), 0.0);
        assert_eq!(flat_bump_integral(0.0), 0.0);
    }

    #[test]
    fn single_wide_node_gives_the_constant_weight_one() {
        let p = Partition::new(vec![0.5], 0.6).unwrap();
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            let w = p.weights(t).unwrap();
            assert_eq!(w.len(), 1);
            assert_eq!(w[0], 1.0);
        }
    }

    #[test]
    fn weights_sum_to_one_and_stay_in_range() {
        let p = Partition::equispaced(7).unwrap();
        for i in 0..=1001 {
            let t = i as f64 / 1001.0;
            let w = p.weights(t).unwrap();
            let sum: f64 = w.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12, "sum {} at t = {}", sum, t);
            assert!(w.iter().all(|x| (0.0..=1.0).contains(x)));
        }
    }

    #[test]
    fn supports_are_respected_exactly() {
        let p = Partition::equispaced(5).unwrap();
        for (j, &tj) in p.nodes().iter().enumerate() {
            for dt in [-1.5, -1.0, 1.0, 1.5] {
                let t = tj + dt * p.kappa();
                if (0.0..=1.0).contains(&t) {
                    assert_eq!(p.weight(j, t).unwrap(), 0.0, "phi_{j} at offset {dt}");
                }
            }
            let inside = p.weight(j, tj).unwrap();
            assert!(inside > 0.0);
        }
    }

    #[test]
    fn smooth_step_has_exact_plateaus() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert_eq!(smooth_step(2.0), 1.0);
        let mid = smooth_step(0.5);
        assert!((mid - 0.5).abs() < 1e-15);
        // Monotone on a scan.
        let mut prev = 0.0;
        for i in 0..=100 {
            let v = smooth_step(i as f64 / 100.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn bad_partitions_are_rejected() {
        assert!(Partition::new(vec![], 0.5).is_err());
        assert!(Partition::new(vec![0.5], 0.0).is_err());
        assert!(Partition::new(vec![0.5], 0.4).is_err()); // 0 not covered
        assert!(Partition::new(vec![0.2, 0.2], 0.5).is_err()); // not increasing
        assert!(Partition::new(vec![0.1, 0.9], 0.15).is_err()); // interior gap
    }
}
