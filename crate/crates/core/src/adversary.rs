//! Drift schedules `mu(gamma)` chosen by an adversary, their covertness
//! regime, and the damage they inflict before detection.

use std::fmt;

use crate::analytics::n_exact;
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Post-change drift as a function of the false-alarm budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriftSchedule {
    /// `mu(gamma) = c * gamma^-delta`.
    PowerLaw { c: f64, delta: f64 },
    /// `mu(gamma) = mu0`.
    Constant { mu0: f64 },
}

/// Limit of `gamma * mu(gamma)^2` as `gamma -> inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    Infinite,
    /// Finite positive limit `theta`.
    Finite(f64),
    Zero,
}

impl Regime {
    /// The limit itself: `inf`, `theta` or `0`.
    pub fn theta(self) -> f64 {
        match self {
            Regime::Infinite => f64::INFINITY,
            Regime::Finite(theta) => theta,
            Regime::Zero => 0.0,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Infinite => write!(f, "infinite"),
            Regime::Finite(theta) => write!(f, "finite(theta={theta})"),
            Regime::Zero => write!(f, "zero"),
        }
    }
}

impl DriftSchedule {
    pub fn power_law(c: f64, delta: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::domain("power_law", format!("c = {c:e} must be positive")));
        }
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::domain(
                "power_law",
                format!("delta = {delta:e} must be nonnegative"),
            ));
        }
        Ok(DriftSchedule::PowerLaw { c, delta })
    }

    pub fn constant(mu0: f64) -> Result<Self> {
        if !(mu0 > 0.0) || !mu0.is_finite() {
            return Err(Error::domain("constant", format!("mu0 = {mu0:e} must be positive")));
        }
        Ok(DriftSchedule::Constant { mu0 })
    }

    /// `mu(gamma)`.
    pub fn mu_at(&self, gamma: f64) -> Result<f64> {
        if !(gamma > 0.0) {
            return Err(Error::domain("mu_at", format!("gamma = {gamma:e} must be positive")));
        }
        Ok(match *self {
            DriftSchedule::PowerLaw { c, delta } => c * gamma.powf(-delta),
            DriftSchedule::Constant { mu0 } => mu0,
        })
    }

    /// Exact regime of the parametric family.
    pub fn classify(&self) -> Regime {
        match *self {
            DriftSchedule::PowerLaw { c, delta } => {
                if delta < 0.5 {
                    Regime::Infinite
                } else if delta == 0.5 {
                    Regime::Finite(c * c)
                } else {
                    Regime::Zero
                }
            }
            DriftSchedule::Constant { .. } => Regime::Infinite,
        }
    }

    /// Delay of the same order as the false-alarm budget.
    pub fn is_covert(&self) -> bool {
        !matches!(self.classify(), Regime::Infinite)
    }
}

/// `M(gamma) = 100 |n(gamma) - gamma| / n(gamma)`, in percent.
pub fn gap_metric(gamma: f64, schedule: &DriftSchedule) -> Result<f64> {
    let n = n_exact(gamma, schedule.mu_at(gamma)?)?;
    Ok(100.0 * (n - gamma).abs() / n)
}

/// Damage `D(gamma) = mu(gamma) n(gamma)` from the exact delay.
pub fn damage(gamma: f64, schedule: &DriftSchedule) -> Result<f64> {
    let mu = schedule.mu_at(gamma)?;
    Ok(mu * n_exact(gamma, mu)?)
}

/// The `delta` on the grid maximizing `damage(gamma, c=1, delta)`; ties go
/// to the smaller `delta`.
pub fn damage_argmax(gamma: f64, delta_grid: &[f64]) -> Result<f64> {
    damage_argmax_with(gamma, delta_grid, Execution::default())
}

pub fn damage_argmax_with(gamma: f64, delta_grid: &[f64], exec: Execution) -> Result<f64> {
    if delta_grid.is_empty() {
        return Err(Error::domain("damage_argmax", "empty delta grid"));
    }
    let values = exec.map_slice(delta_grid, |&delta| {
        DriftSchedule::power_law(1.0, delta).and_then(|s| damage(gamma, &s))
    });
    let mut best: Option<(f64, f64)> = None;
    for (&delta, d) in delta_grid.iter().zip(values) {
        let d = d?;
        best = match best {
            Some((bd, bv)) if bv > d || (bv == d && bd <= delta) => Some((bd, bv)),
            _ => Some((delta, d)),
        };
    }
    Ok(best.map(|(delta, _)| delta).unwrap_or(f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::g_of_x;

    fn pl(delta: f64) -> DriftSchedule {
        DriftSchedule::power_law(1.0, delta).unwrap()
    }

    #[test]
    fn mu_at_examples() {
        assert_eq!(pl(5.0).mu_at(2.0).unwrap(), 1.0 / 32.0);
        assert!((pl(0.5).mu_at(1e4).unwrap() - 0.01).abs() < 1e-17);
        let c = DriftSchedule::constant(0.3).unwrap();
        assert_eq!(c.mu_at(1e9).unwrap(), 0.3);
        assert!(c.mu_at(0.0).is_err());
        assert!(DriftSchedule::power_law(0.0, 1.0).is_err());
        assert!(DriftSchedule::power_law(1.0, -0.1).is_err());
        assert!(DriftSchedule::constant(-1.0).is_err());
    }

    #[test]
    fn classification() {
        assert_eq!(pl(0.75).classify(), Regime::Zero);
        assert_eq!(pl(0.5).classify(), Regime::Finite(1.0));
        assert_eq!(pl(0.3).classify(), Regime::Infinite);
        assert_eq!(pl(0.0).classify(), Regime::Infinite);
        let s = DriftSchedule::power_law(3.0, 0.5).unwrap();
        assert_eq!(s.classify(), Regime::Finite(9.0));
        assert_eq!(
            DriftSchedule::constant(1.0).unwrap().classify(),
            Regime::Infinite
        );
    }

    #[test]
    fn covertness() {
        assert!(pl(0.5).is_covert());
        assert!(pl(0.9).is_covert());
        assert!(!pl(0.2).is_covert());
        assert!(!DriftSchedule::constant(1.0).unwrap().is_covert());
    }

    #[test]
    fn gap_metric_examples() {
        assert!((gap_metric(2.0, &pl(5.0)).unwrap() - 2.97).abs() < 0.005);
        assert!((gap_metric(10.0, &pl(2.0)).unwrap() - 2.12).abs() < 0.005);
        assert!(gap_metric(0.0, &pl(2.0)).is_err());
    }

    #[test]
    fn damage_examples() {
        let d = damage(1.0, &pl(0.5)).unwrap();
        assert!((d - 2.0 * g_of_x(0.5).unwrap()).abs() < 1e-15);
        let two_g = 2.0 * g_of_x(0.5).unwrap();
        for gamma in [1e4, 1e8, 1e12] {
            let r = damage(gamma, &pl(0.5)).unwrap() / (two_g * gamma.sqrt());
            assert!((r - 1.0).abs() < 1e-12);
        }
        let r6 = damage(1e6, &pl(0.75)).unwrap() / 1e6f64.powf(0.25);
        let r12 = damage(1e12, &pl(0.75)).unwrap() / 1e12f64.powf(0.25);
        assert!(r6 < r12 && r12 < 1.0 && r12 > 0.999);
    }

    #[test]
    fn argmax_examples() {
        assert_eq!(damage_argmax(1e6, &[0.3]).unwrap(), 0.3);
        assert!(damage_argmax(1e6, &[]).is_err());
        // Identical deltas tie; the first (smallest) wins either way.
        assert_eq!(damage_argmax(1e6, &[0.4, 0.4]).unwrap(), 0.4);
        let grid: Vec<f64> = (0..=200).map(|i| i as f64 * 0.005).collect();
        let hi = damage_argmax(1e12, &grid).unwrap();
        let lo = damage_argmax(1e6, &grid).unwrap();
        assert!((hi - 0.455).abs() < 1e-12, "{hi}");
        assert!((lo - 0.415).abs() < 1e-12, "{lo}");
        let seq = damage_argmax_with(1e12, &grid, Execution::Sequential).unwrap();
        assert_eq!(seq, hi);
    }
}
