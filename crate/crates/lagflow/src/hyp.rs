//! Overflow-free ratios of hyperbolic functions.
//!
//! The separated solutions on a rectangle involve quotients like
//! `cosh(k(l2 - y)) / cosh(k*l2)` whose numerator and denominator overflow
//! individually near k*l2 ~ 700 even though the quotient is O(1). Every
//! ratio here is rewritten with negative exponentials only, e.g.
//!
//! ```text
//! cosh(a)/cosh(b) = exp(a-b) * (1 + exp(-2a)) / (1 + exp(-2b))
//! ```
//!
//! which stays finite whenever `a <= b` (the in-domain case) and degrades
//! gracefully to `inf` instead of NaN when a genuinely astronomical value is
//! requested.

/// cosh(a)/cosh(b) for a >= 0, b >= 0.
pub fn cosh_ratio(a: f64, b: f64) -> f64 {
    debug_assert!(a >= 0.0 && b >= 0.0);
    (a - b).exp() * (1.0 + (-2.0 * a).exp()) / (1.0 + (-2.0 * b).exp())
}

/// sinh(a)/sinh(b) for a >= 0, b > 0.
pub fn sinh_ratio(a: f64, b: f64) -> f64 {
    debug_assert!(a >= 0.0 && b > 0.0);
    // -exp_m1(-2a) = 1 - exp(-2a), full precision even for tiny a.
    (a - b).exp() * -(-2.0 * a).exp_m1() / (1.0 - (-2.0 * b).exp())
}

/// sinh(a)/cosh(b) for a >= 0, b >= 0.
pub fn sinh_cosh_ratio(a: f64, b: f64) -> f64 {
    debug_assert!(a >= 0.0 && b >= 0.0);
    (a - b).exp() * (1.0 - (-2.0 * a).exp()) / (1.0 + (-2.0 * b).exp())
}

/// cosh(a)/sinh(b) for a >= 0, b > 0.
pub fn cosh_sinh_ratio(a: f64, b: f64) -> f64 {
    debug_assert!(a >= 0.0 && b > 0.0);
    (a - b).exp() * (1.0 + (-2.0 * a).exp()) / (1.0 - (-2.0 * b).exp())
}

/// sinh(a)^2/cosh(a) for a > 0: the growth factor of the ill-posed
/// reconstruction. Overflows honestly (to `inf`) past a ~ 709.
pub fn sinh_sq_over_cosh(a: f64) -> f64 {
    debug_assert!(a > 0.0);
    let e = (-2.0 * a).exp();
    a.exp() * (1.0 - e) * (1.0 - e) / (2.0 * (1.0 + e))
}

/// ln cosh(a) for a >= 0, without overflow.
pub fn ln_cosh(a: f64) -> f64 {
    debug_assert!(a >= 0.0);
    a + ((1.0 + (-2.0 * a).exp()) / 2.0).ln()
}

/// ln sinh(a) for a > 0, without overflow.
pub fn ln_sinh(a: f64) -> f64 {
    debug_assert!(a > 0.0);
    a + ((1.0 - (-2.0 * a).exp()) / 2.0).ln()
}
