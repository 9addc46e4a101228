//! Smooth-in-time rational approximants `R(t, z) = sum_j phi_j(t) R_j(z)`:
//! per-node static fits welded by a smooth partition of unity in time.
//!
//! The node count is chosen by the compactness argument made quantitative:
//! refine the equispaced node family until the time modulus of continuity of
//! the target — `sup |f(t, .) - f(t_j, .)|` over each node interval,
//! measured on a compact hull of all the regions — drops below half the
//! error budget, then fit each node to the other half. The triangle
//! inequality then bounds the blended error by the budget everywhere, which
//! a final product-grid validation confirms.

use super::partition::Partition;
use super::{runge_approximate, C64, Region};
use crate::error::{invalid, Error, Result};

/// Time-dependent rational function: a smooth blend of static pieces.
#[derive(Debug, Clone)]
pub struct TimeVaryingRational {
    partition: Partition,
    pieces: Vec<super::RationalFunction>,
}

impl TimeVaryingRational {
    pub fn new(partition: Partition, pieces: Vec<super::RationalFunction>) -> Result<Self> {
        if pieces.len() != partition.len() {
            return Err(invalid("one rational piece per partition node required"));
        }
        Ok(Self { partition, pieces })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn pieces(&self) -> &[super::RationalFunction] {
        &self.pieces
    }

    /// `sum_j phi_j(t) R_j(z)`; only the nodes whose support contains `t`
    /// contribute.
    pub fn value(&self, t: f64, z: C64) -> Result<C64> {
        let weights = self.partition.weights(t)?;
        let mut acc = C64::new(0.0, 0.0);
        for j in self.partition.active(t) {
            if weights[j] != 0.0 {
                acc += C64::new(weights[j], 0.0) * self.pieces[j].evaluate(z);
            }
        }
        Ok(acc)
    }
}

/// Successful time-varying fit with its certificates.
#[derive(Debug, Clone)]
pub struct BlendFit {
    pub blend: TimeVaryingRational,
    /// Nodes used by the accepted partition.
    pub nodes: usize,
    /// Time modulus of continuity achieved on the accepted partition
    /// (must be at most half the budget).
    pub time_modulus: f64,
    /// Validated sup of `|f - R|` on the (t, z) product grid.
    pub validated_sup: f64,
}

/// Compact hull: one disk containing every region the family produces on a
/// fine time grid.
fn hull_region(region_of_t: &dyn Fn(f64) -> Region, grid: usize) -> Result<Region> {
    let mut centers = Vec::with_capacity(grid + 1);
    for i in 0..=grid {
        centers.push(region_of_t(i as f64 / grid as f64));
    }
    let n = centers.len() as f64;
    let mean = centers
        .iter()
        .fold(C64::new(0.0, 0.0), |a, r| a + r.center())
        / C64::new(n, 0.0);
    let radius = centers
        .iter()
        .map(|r| (r.center() - mean).norm() + r.radius())
        .fold(0.0, f64::max);
    Region::disk(mean, radius)
}

/// Fits `f(t, .)` over the moving family of regions to uniform accuracy
/// `eps`: doubles the node count until the time modulus is below `eps / 2`
/// (up to `max_nodes`), fits every node to `eps / 2` with the degree budget,
/// and validates the blended sup on a product grid. Fails with the achieved
/// value when refinement or validation misses the target.
pub fn fit_time_varying(
    f: &dyn Fn(f64, C64) -> C64,
    region_of_t: &dyn Fn(f64) -> Region,
    poles: &[C64],
    eps: f64,
    degree_budget: usize,
    max_nodes: usize,
) -> Result<BlendFit> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(invalid("blend target must be positive"));
    }
    if max_nodes == 0 {
        return Err(invalid("node budget must be at least 1"));
    }
    let hull = hull_region(region_of_t, 48)?;
    let modulus_z: Vec<C64> = hull.boundary_samples(48, 0.0);

    // Refine the node family until the time modulus is small enough.
    let mut n = 1usize;
    let (partition, time_modulus) = loop {
        let partition = Partition::equispaced(n)?;
        let kappa = partition.kappa();
        let mut modulus = 0.0f64;
        for &tj in partition.nodes() {
            for step in 0..=4 {
                let t = (tj - kappa + step as f64 * kappa / 2.0).clamp(0.0, 1.0);
                for &z in &modulus_z {
                    modulus = modulus.max((f(t, z) - f(tj, z)).norm());
                }
            }
        }
        if modulus <= 0.5 * eps {
            break (partition, modulus);
        }
        if n >= max_nodes {
            return Err(Error::ApproximationFailure {
                achieved: modulus,
                target: 0.5 * eps,
            });
        }
        n = (2 * n).min(max_nodes);
    };

    // Static fit per node, each to half the budget.
    let fit_samples = hull.boundary_samples(160, 0.0);
    let val_samples = hull.boundary_samples(221, 0.5);
    let mut pieces = Vec::with_capacity(partition.len());
    for &tj in partition.nodes() {
        let fj = |z: C64| f(tj, z);
        let fit = runge_approximate(&fj, &fit_samples, &val_samples, poles, degree_budget, 0.5 * eps)?;
        pieces.push(fit.rational);
    }
    let blend = TimeVaryingRational::new(partition, pieces)?;

    // Product-grid validation on the moving regions themselves.
    let mut validated_sup = 0.0f64;
    for i in 0..=40 {
        let t = i as f64 / 40.0;
        for z in region_of_t(t).boundary_samples(64, 0.25) {
            let err = (blend.value(t, z)? - f(t, z)).norm();
            validated_sup = validated_sup.max(err);
        }
    }
    if validated_sup > eps {
        return Err(Error::ApproximationFailure {
            achieved: validated_sup,
            target: eps,
        });
    }
    Ok(BlendFit {
        nodes: blend.partition().len(),
        blend,
        time_modulus,
        validated_sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_target_needs_a_single_node() {
        let f = |_t: f64, z: C64| z.exp();
        let region = Region::disk(C64::new(0.0, 0.0), 1.0).unwrap();
        let fit = fit_time_varying(&f, &|_t| region, &[], 1e-6, 12, 8).unwrap();
        assert_eq!(fit.nodes, 1);
        assert_eq!(fit.time_modulus, 0.0);
        assert!(fit.validated_sup <= 1e-6);
        // The blend of one piece is that piece.
        let z = C64::new(0.3, 0.4);
        let blended = fit.blend.value(0.77, z).unwrap();
        let piece = fit.blend.pieces()[0].evaluate(z);
        assert_eq!(blended, piece);
    }

    #[test]
    fn rotating_family_meets_the_uniform_budget() {
        let f = |t: f64, z: C64| (z + C64::new(0.1 * t, 0.0)).exp();
        let region_of_t = |t: f64| {
            let angle = std::f64::consts::TAU * t;
            Region::disk(C64::new(0.3 * angle.cos(), 0.3 * angle.sin()), 0.45).unwrap()
        };
        let fit = fit_time_varying(&f, &region_of_t, &[], 1e-3, 14, 1024).unwrap();
        assert!(fit.validated_sup <= 1e-3, "sup {}", fit.validated_sup);
        assert!(fit.time_modulus <= 5e-4);
        assert!(fit.nodes >= 2);
    }

    #[test]
    fn blend_stays_in_the_convex_hull_of_its_pieces() {
        let f = |t: f64, z: C64| z * C64::new(1.0 + t, 0.0);
        let region = Region::disk(C64::new(0.0, 0.0), 1.0).unwrap();
        let fit = fit_time_varying(&f, &|_t| region, &[], 0.5, 6, 64).unwrap();
        let z = C64::new(0.5, -0.2);
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            let v = fit.blend.value(t, z).unwrap();
            let active = fit.blend.partition().active(t);
            let res: Vec<f64> = active
                .iter()
                .map(|&j| fit.blend.pieces()[j].evaluate(z).re)
                .collect();
            let lo = res.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = res.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(
                v.re >= lo - 1e-12 && v.re <= hi + 1e-12,
                "t = {t}: {} outside [{lo}, {hi}]",
                v.re
            );
        }
    }

    #[test]
    fn refinement_budget_exhaustion_is_reported() {
        // Fast time variation with a tiny node budget cannot meet the
        // modulus condition.
        let f = |t: f64, z: C64| z + C64::new((40.0 * t).sin(), 0.0);
        let region = Region::disk(C64::new(0.0, 0.0), 1.0).unwrap();
        let err = fit_time_varying(&f, &|_t| region, &[], 1e-3, 6, 2).unwrap_err();
        match err {
            Error::ApproximationFailure { achieved, target } => {
                assert!(achieved > target);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
