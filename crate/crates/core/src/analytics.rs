//! Closed-form performance of the continuous-time CuSum detector.
//!
//! For an observation `dZ = mu 1{s >= t} ds + dW`, CuSum with threshold `h`
//! has mean time to false alarm `(2/mu^2)(e^h - h - 1)` and worst-case mean
//! detection delay `(2/mu^2)(e^-h + h - 1)`. Designing for a false-alarm
//! budget `gamma` fixes `h` through `e^h - h - 1 = x` with `x = gamma mu^2 / 2`,
//! and the delay becomes `(2/mu^2) G(x)`.

use crate::adversary::Regime;
use crate::error::{Error, Result};
use crate::lambert::{excess_root, exp_excess, solve_u};

/// Largest `h` for which `e^h` is finite.
const MAX_THRESHOLD: f64 = 709.782_712_893_384;

/// A fully resolved CuSum operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorDesign {
    /// False-alarm budget: lower bound on the mean time to false alarm.
    pub gamma: f64,
    /// Post-change drift.
    pub mu: f64,
    /// `gamma * mu^2 / 2`.
    pub x: f64,
    /// CuSum threshold.
    pub h: f64,
    /// Mean time to false alarm at `h`; equals `gamma` up to rounding.
    pub at2fa: f64,
    /// Worst-case mean detection delay at `h`.
    pub add: f64,
}

fn check_mu_h(op: &'static str, mu: f64, h: f64) -> Result<()> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::domain(op, format!("mu = {mu:e} must be positive")));
    }
    if !(h >= 0.0) {
        return Err(Error::domain(op, format!("h = {h:e} must be nonnegative")));
    }
    Ok(())
}

fn check_gamma_mu(op: &'static str, gamma: f64, mu: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::domain(op, format!("gamma = {gamma:e} must be positive")));
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::domain(op, format!("mu = {mu:e} must be positive")));
    }
    Ok(())
}

/// Mean time to false alarm `E_inf[T_h] = (2/mu^2)(e^h - h - 1)`.
pub fn at2fa(mu: f64, h: f64) -> Result<f64> {
    check_mu_h("at2fa", mu, h)?;
    if h > MAX_THRESHOLD {
        return Err(Error::overflow("at2fa", format!("e^h overflows for h = {h}")));
    }
    let v = 2.0 / (mu * mu) * exp_excess(h);
    if !v.is_finite() {
        return Err(Error::overflow("at2fa", format!("mu = {mu:e}, h = {h}")));
    }
    Ok(v)
}

/// Mean detection delay for a change at time zero,
/// `E_0[T_h] = (2/mu^2)(e^-h + h - 1)`.
pub fn add(mu: f64, h: f64) -> Result<f64> {
    check_mu_h("add", mu, h)?;
    let v = 2.0 / (mu * mu) * exp_excess(-h);
    if !v.is_finite() {
        return Err(Error::overflow("add", format!("mu = {mu:e}, h = {h}")));
    }
    Ok(v)
}

/// Threshold meeting the false-alarm budget with equality.
///
/// The threshold is evaluated in the log domain, so designs whose
/// `gamma * mu^2` would underflow `exp(-1 - x)` are still resolved.
pub fn solve_threshold(gamma: f64, mu: f64) -> Result<DetectorDesign> {
    check_gamma_mu("solve_threshold", gamma, mu)?;
    let x = 0.5 * gamma * mu * mu;
    if x == 0.0 {
        return Err(Error::domain(
            "solve_threshold",
            format!("gamma * mu^2 underflows for gamma = {gamma:e}, mu = {mu:e}"),
        ));
    }
    let h = excess_root(x)?;
    Ok(DetectorDesign {
        gamma,
        mu,
        x,
        h,
        at2fa: at2fa(mu, h)?,
        add: add(mu, h)?,
    })
}

/// `G(x) = e^{1+x+W} - W - x - 2` with `W = W-1(-e^{-1-x})`.
///
/// Using `u = -W` and `e^{1+x-u} = 1/u` this is `(u-1)^2/u - x`, which is
/// evaluated with `u - 1 = x + h` carried separately so neither end of the
/// range cancels.
pub fn g_of_x(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain("g_of_x", format!("x = {x:e} < 0")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let h = excess_root(x)?;
    let t = x + h;
    let u = 1.0 + t;
    Ok(if x <= 1.0 {
        t * t / u - x
    } else {
        // Same quantity, rearranged as h - 1 + 1/u.
        h - t / u
    })
}

/// `G'(x) = -1/W-1(-e^{-1-x}) = 1/u`.
pub fn g_deriv(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("g_deriv", format!("x = {x:e} must be positive")));
    }
    Ok(1.0 / solve_u(1.0 + x)?)
}

/// Exact worst-case delay `n(gamma) = (2/mu^2) G(gamma mu^2 / 2)`.
pub fn n_exact(gamma: f64, mu: f64) -> Result<f64> {
    check_gamma_mu("n_exact", gamma, mu)?;
    let v = 2.0 / (mu * mu) * g_of_x(0.5 * gamma * mu * mu)?;
    if !v.is_finite() {
        return Err(Error::overflow("n_exact", format!("mu = {mu:e}")));
    }
    Ok(v)
}

/// Leading-order large-`gamma` delay for the given regime.
///
/// This is an asymptotic equivalence, not a finite-`gamma` value.
pub fn asymptotic_n(gamma: f64, regime: Regime, mu_at_gamma: f64) -> Result<f64> {
    check_gamma_mu("asymptotic_n", gamma, mu_at_gamma)?;
    match regime {
        Regime::Infinite => {
            let mu2 = mu_at_gamma * mu_at_gamma;
            let arg = gamma * mu2;
            if arg <= 1.0 {
                return Err(Error::domain(
                    "asymptotic_n",
                    format!("log(gamma mu^2) <= 0 at gamma mu^2 = {arg:e}"),
                ));
            }
            Ok(2.0 / mu2 * arg.ln())
        }
        Regime::Finite(theta) => Ok(2.0 / theta * g_of_x(0.5 * theta)? * gamma),
        Regime::Zero => Ok(gamma),
    }
}

/// `lim h(gamma)` as `gamma -> inf` for a regime.
///
/// In the zero regime the threshold tends to `0`, since `W-1(-1/e) = -1`.
pub fn threshold_limit(regime: Regime) -> f64 {
    match regime {
        Regime::Infinite => f64::INFINITY,
        Regime::Finite(theta) => excess_root(0.5 * theta).unwrap_or(f64::NAN),
        Regime::Zero => 0.0,
    }
}
