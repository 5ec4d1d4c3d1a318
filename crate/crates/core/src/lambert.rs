//! Real branches of the Lambert W function.
//!
//! `W(z)` solves `w * exp(w) = z`. On `[-1/e, 0)` there are two real
//! solutions: the principal branch `W0 >= -1` and the lower branch
//! `W-1 <= -1`. Both meet at the branch point `W(-1/e) = -1`.
//!
//! [`solve_u`] evaluates `-W-1(-exp(-y))` without forming `exp(-y)`, which
//! underflows once `y` passes ~745.

use std::f64::consts::E;

use crate::error::{Error, Result};

/// `-1/e` rounded to the nearest double.
pub const BRANCH_POINT: f64 = -0.367_879_441_171_442_33;

/// Inputs at most this many ulps below [`BRANCH_POINT`] are clamped onto it.
const BRANCH_CLAMP_ULPS: u64 = 4;

/// Below this value of `1 + e*z` the branch-point series seeds Halley.
const SERIES_REGION: f64 = 0.25;

const MAX_ITER: usize = 64;

/// Real branch selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `W0`, defined on `[-1/e, inf)`, values `>= -1`.
    Principal,
    /// `W-1`, defined on `[-1/e, 0)`, values `<= -1`.
    MinusOne,
}

/// Evaluate `W` on the requested branch.
pub fn lambert_w(branch: Branch, z: f64) -> Result<f64> {
    match branch {
        Branch::Principal => lambert_w0(z),
        Branch::MinusOne => lambert_wm1(z),
    }
}

/// Returns `Some(z')` with `z'` clamped to the branch point if `z` is in
/// range, `None` if it lies too far below `-1/e`.
fn clamp_branch_point(z: f64) -> Option<f64> {
    if z >= BRANCH_POINT {
        return Some(z);
    }
    // Both negative: larger magnitude means larger bit pattern.
    let ulps = z.to_bits().saturating_sub(BRANCH_POINT.to_bits());
    (ulps <= BRANCH_CLAMP_ULPS).then_some(BRANCH_POINT)
}

/// Series of `W` about the branch point in `p = ±sqrt(2(1 + e z))`.
fn branch_point_series(p: f64) -> f64 {
    // Coefficients of W = -1 + p - p^2/3 + 11/72 p^3 - ...
    const C: [f64; 8] = [
        -1.0,
        1.0,
        -1.0 / 3.0,
        11.0 / 72.0,
        -43.0 / 540.0,
        769.0 / 17_280.0,
        -221.0 / 8_505.0,
        680_863.0 / 43_545_600.0,
    ];
    C.iter().rev().fold(0.0, |acc, &c| acc * p + c)
}

fn branch_p(z: f64) -> f64 {
    (2.0 * (1.0 + E * z)).max(0.0).sqrt()
}

/// Principal branch `W0(z)` for `z >= -1/e`.
pub fn lambert_w0(z: f64) -> Result<f64> {
    if z.is_nan() {
        return Err(Error::domain("lambert_w0", "argument is NaN"));
    }
    let z = clamp_branch_point(z).ok_or_else(|| {
        Error::domain("lambert_w0", format!("z = {z:e} lies below -1/e"))
    })?;
    if z == BRANCH_POINT {
        return Ok(-1.0);
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == f64::INFINITY {
        return Ok(f64::INFINITY);
    }

    let mut w = if 1.0 + E * z < SERIES_REGION {
        branch_point_series(branch_p(z))
    } else {
        // Winitzki's approximation, good to a few percent everywhere.
        let l = z.ln_1p();
        l * (1.0 - l.ln_1p() / (2.0 + l))
    };

    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let dw = f / denom;
        if !dw.is_finite() {
            break;
        }
        w -= dw;
        if dw.abs() <= 4.0 * f64::EPSILON * w.abs().max(1e-300) {
            break;
        }
    }
    Ok(w.max(-1.0))
}

/// Lower branch `W-1(z)` for `-1/e <= z < 0`.
pub fn lambert_wm1(z: f64) -> Result<f64> {
    if z.is_nan() || z >= 0.0 {
        return Err(Error::domain(
            "lambert_wm1",
            format!("z = {z:e} outside [-1/e, 0)"),
        ));
    }
    let z = clamp_branch_point(z).ok_or_else(|| {
        Error::domain("lambert_wm1", format!("z = {z:e} lies below -1/e"))
    })?;
    if z == BRANCH_POINT {
        return Ok(-1.0);
    }

    let mut w = if 1.0 + E * z < SERIES_REGION {
        branch_point_series(-branch_p(z))
    } else {
        let l1 = (-z).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };

    // Halley on the log form g(w) = w + ln(-w) - ln(-z), which stays
    // representable when exp(w) would underflow.
    let target = (-z).ln();
    for _ in 0..MAX_ITER {
        let g = w + (-w).ln() - target;
        let g1 = 1.0 + 1.0 / w;
        let g2 = -1.0 / (w * w);
        let dw = g / (g1 - 0.5 * g * g2 / g1);
        if !dw.is_finite() {
            break;
        }
        w -= dw;
        if w > -1.0 {
            w = -1.0;
        }
        if dw.abs() <= 4.0 * f64::EPSILON * w.abs() {
            break;
        }
    }
    Ok(w)
}

/// Derivative `W-1'(z) = W / (z (1 + W))`, which diverges at `-1/e`.
pub fn lambert_wm1_deriv(z: f64) -> Result<f64> {
    if !(z > BRANCH_POINT && z < 0.0) {
        return Err(Error::domain(
            "lambert_wm1_deriv",
            format!("z = {z:e} outside the open interval (-1/e, 0)"),
        ));
    }
    let w = lambert_wm1(z)?;
    if w == -1.0 {
        return Err(Error::domain(
            "lambert_wm1_deriv",
            format!("z = {z:e} is numerically at the branch point"),
        ));
    }
    Ok(w / (z * (1.0 + w)))
}

/// `exp(h) - 1 - h` without cancellation near `h = 0`.
pub fn exp_excess(h: f64) -> f64 {
    if h.abs() < 0.5 {
        // sum_{k>=2} h^k / k!
        let mut term = 0.5 * h * h;
        let mut sum = term;
        let mut k = 2.0;
        while term.abs() > 1e-18 * sum.abs() {
            k += 1.0;
            term *= h / k;
            sum += term;
        }
        sum
    } else {
        h.exp_m1() - h
    }
}

/// The unique `h >= 0` with `exp(h) - h - 1 = x`, for `x >= 0`.
///
/// Equivalently `h = u - 1 - x` where `u = -W-1(-exp(-1 - x))`. The result
/// keeps full relative precision both as `x -> 0` (where `h ~ sqrt(2x)`)
/// and for huge `x` (where `h ~ ln x`).
pub fn excess_root(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain("excess_root", format!("x = {x:e} < 0")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if !x.is_finite() {
        return Err(Error::overflow("excess_root", "x is not finite"));
    }

    if x <= 1.0 {
        // psi(h) = exp_excess(h) - x is convex and increasing and
        // psi(sqrt(2x)) >= 0, so Newton descends monotonically.
        let mut h = (2.0 * x).sqrt();
        for _ in 0..MAX_ITER {
            let step = (exp_excess(h) - x) / h.exp_m1();
            if !step.is_finite() {
                break;
            }
            h -= step;
            if step.abs() <= 2.0 * f64::EPSILON * h {
                break;
            }
        }
        Ok(h)
    } else {
        // Log form: h = ln(1 + x + h).
        let mut h = x.ln_1p();
        for _ in 0..MAX_ITER {
            let s = 1.0 + x + h;
            let f = h - s.ln();
            let step = f * s / (x + h);
            h -= step;
            if step.abs() <= 2.0 * f64::EPSILON * h {
                break;
            }
        }
        Ok(h)
    }
}

/// Solve `u - ln(u) = y` for `u >= 1`, i.e. `u = -W-1(-exp(-y))`.
pub fn solve_u(y: f64) -> Result<f64> {
    if y.is_nan() || y < 1.0 - 4.0 * f64::EPSILON {
        return Err(Error::domain("solve_u", format!("y = {y:e} < 1")));
    }
    if y <= 1.0 {
        return Ok(1.0);
    }
    let x = y - 1.0;
    let h = excess_root(x)?;
    Ok(1.0 + x + h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn w0_examples() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(E).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(lambert_w0(-(-1.0f64).exp()).unwrap(), -1.0);
        assert_eq!(lambert_w0(BRANCH_POINT).unwrap(), -1.0);
    }

    #[test]
    fn wm1_examples() {
        assert_eq!(lambert_wm1(BRANCH_POINT).unwrap(), -1.0);
        let w = lambert_wm1(-2.0 * (-2.0f64).exp()).unwrap();
        assert!((w + 2.0).abs() < 1e-14, "{w}");
        // 40-digit reference value.
        let w = lambert_wm1(-1e-6).unwrap();
        assert!(rel(w, -16.626_508_901_372_473) < 1e-14, "{w}");
        // Leading asymptotic terms only bracket it.
        let asym = (1e-6f64).ln() - (-(1e-6f64).ln()).ln();
        assert!((w - asym).abs() < 0.5);
    }

    #[test]
    fn branch_point_clamp() {
        let below = f64::from_bits(BRANCH_POINT.to_bits() + 4);
        assert_eq!(lambert_w0(below).unwrap(), -1.0);
        assert_eq!(lambert_wm1(below).unwrap(), -1.0);
        let too_far = f64::from_bits(BRANCH_POINT.to_bits() + 5);
        assert!(lambert_w0(too_far).is_err());
        assert!(lambert_wm1(too_far).is_err());
        assert!(lambert_w0(-0.5).is_err());
    }

    #[test]
    fn wm1_domain_errors() {
        assert!(lambert_wm1(0.0).is_err());
        assert!(lambert_wm1(0.1).is_err());
        assert!(lambert_wm1(f64::NAN).is_err());
        assert!(lambert_w(Branch::MinusOne, 1.0).is_err());
        assert!(lambert_w(Branch::Principal, 1.0).is_ok());
    }

    #[test]
    fn deriv_examples() {
        let d = lambert_wm1_deriv(-2.0 * (-2.0f64).exp()).unwrap();
        assert!(rel(d, -E * E) < 1e-12, "{d}");
        // mpmath numerical derivative at 60 digits.
        let d = lambert_wm1_deriv(-0.1).unwrap();
        assert!(rel(d, -13.880_252_213_229_78) < 1e-12, "{d}");
        // Diverges approaching the branch point.
        let near = lambert_wm1_deriv(BRANCH_POINT + 1e-12).unwrap().abs();
        let far = lambert_wm1_deriv(BRANCH_POINT + 1e-6).unwrap().abs();
        assert!(near > 100.0 * far);
        assert!(lambert_wm1_deriv(BRANCH_POINT).is_err());
        assert!(lambert_wm1_deriv(0.0).is_err());
    }

    #[test]
    fn solve_u_examples() {
        assert_eq!(solve_u(1.0).unwrap(), 1.0);
        let u = solve_u(1.5).unwrap();
        assert!(rel(u, 2.357_676_673_945_899) < 1e-14, "{u}");
        let u = solve_u(1e6).unwrap();
        assert!(rel(u, 1_000_013.815_524_373_4) < 1e-15, "{u}");
        assert!((u - u.ln() - 1e6).abs() <= 1e-12 * 1e6);
        assert!(solve_u(0.5).is_err());
        assert!(solve_u(f64::NAN).is_err());
    }

    #[test]
    fn solve_u_bisection_oracle() {
        // Plain bisection on u - ln u = 1.5 over [1, 10].
        let (mut lo, mut hi) = (1.0f64, 10.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid - mid.ln() < 1.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((solve_u(1.5).unwrap() - lo).abs() < 1e-14);
    }

    #[test]
    fn solve_u_survives_underflow_region() {
        for y in [745.0, 800.0, 1e4, 1e12, 1e300] {
            let u = solve_u(y).unwrap();
            assert!(u.is_finite() && u >= y);
            assert!((u - u.ln() - y).abs() <= 1e-12 * y);
        }
        // Direct form is unusable there.
        assert_eq!(-(-800.0f64).exp(), -0.0);
    }

    #[test]
    fn exp_excess_small_and_large() {
        assert_eq!(exp_excess(0.0), 0.0);
        // h^2/2 + h^3/6 dominates for tiny h.
        let h = 1e-8;
        assert!(rel(exp_excess(h), 0.5 * h * h * (1.0 + h / 3.0)) < 1e-15);
        assert!(rel(exp_excess(1.0), E - 2.0) < 1e-15);
        assert!(rel(exp_excess(-1.0), 1.0 / E) < 1e-15);
    }

    #[test]
    fn excess_root_tiny_x() {
        // h ~ sqrt(2x) - 2x/3 for small x.
        let x = 5e-46;
        let h = excess_root(x).unwrap();
        let approx = (2.0 * x).sqrt() - 2.0 * x / 3.0;
        assert!(rel(h, approx) < 1e-15);
        assert!(excess_root(-1e-3).is_err());
        assert!(excess_root(f64::INFINITY).is_err());
    }
}
