//! Monte Carlo estimates of the CuSum stopping time under Brownian dynamics.
//!
//! The log-likelihood process `U_s = mu Z_s - mu^2 s / 2` has exactly
//! Gaussian increments, so the only discretization error is in monitoring
//! the barriers between grid points. The CuSum statistic `Y = U - min U` is
//! simulated through the reflected recursion `Y' = max(0, Y + dU)`, and an
//! optional Brownian-bridge test catches upper-barrier crossings that occur
//! between grid points.
//!
//! Every path draws only from its own ChaCha stream `(seed, path_index)`,
//! and per-path results are reduced in index order, so estimates are
//! bit-identical for any degree of parallelism.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::analytics::{self, DetectorDesign};
use crate::error::{Error, Result};
use crate::exec::{compensated_sum, Execution};

/// Bridge crossing probabilities below `exp(-BRIDGE_CUTOFF)` are skipped.
const BRIDGE_CUTOFF: f64 = 40.0;

/// Which expectation the simulation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// No change ever occurs: estimates `E_inf[T_h]`.
    PreChange,
    /// Change at time zero: estimates `E_0[T_h]`.
    PostChange,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::PreChange => "pre",
            Mode::PostChange => "post",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub mu: f64,
    pub h: f64,
    /// Time step of the grid.
    pub step: f64,
    pub paths: u64,
    pub seed: u64,
    /// Paths still running at this time are reported as truncated.
    pub horizon: f64,
    pub bridge_correction: bool,
    pub mode: Mode,
}

impl SimConfig {
    /// Config with the default grid and horizon for `(mu, h)`.
    ///
    /// The step is `1e-3 min(1, h^2) / mu^2`: the statistic diffuses with
    /// volatility `mu`, so `h^2 / mu^2` is the hitting time scale when `h`
    /// is small. The horizon is 50 times the larger analytic mean.
    pub fn new(mode: Mode, mu: f64, h: f64) -> Result<Self> {
        if !(mu > 0.0) || !(h > 0.0) {
            return Err(Error::domain(
                "SimConfig",
                format!("mu = {mu:e} and h = {h:e} must be positive"),
            ));
        }
        let expected = analytics::at2fa(mu, h)?.max(analytics::add(mu, h)?);
        Ok(SimConfig {
            mu,
            h,
            step: 1e-3 * h.min(1.0).powi(2) / (mu * mu),
            paths: 10_000,
            seed: 0,
            horizon: 50.0 * expected,
            bridge_correction: true,
            mode,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.mu > 0.0
            && self.mu.is_finite()
            && self.h > 0.0
            && self.h.is_finite()
            && self.step > 0.0
            && self.horizon.is_finite()
            && self.step <= self.horizon
            && self.paths >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::domain("SimConfig", format!("invalid configuration {self:?}")))
        }
    }

    fn max_steps(&self) -> u64 {
        (self.horizon / self.step).ceil() as u64
    }
}

/// State of one path while it is running.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PathState {
    /// Reflected CuSum statistic, in `[0, h)`.
    pub y: f64,
    /// Elapsed time.
    pub t: f64,
}

/// Result of a single path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathOutcome {
    Stopped(f64),
    Truncated,
}

impl PathOutcome {
    pub fn time(self) -> Option<f64> {
        match self {
            PathOutcome::Stopped(t) => Some(t),
            PathOutcome::Truncated => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    /// Mean stopping time; `None` if any path was truncated.
    pub mean: Option<f64>,
    /// Standard error of the mean; `None` if any path was truncated.
    pub stderr: Option<f64>,
    pub paths_used: u64,
    pub truncated: u64,
    /// Mean over the paths that did stop, truncated or not.
    pub completed_mean: f64,
}

impl SimEstimate {
    /// Fails if any path reached the horizon.
    pub fn strict(self) -> Result<Self> {
        if self.truncated > 0 {
            Err(Error::Truncated {
                truncated: self.truncated,
                paths: self.paths_used,
            })
        } else {
            Ok(self)
        }
    }

    /// `(mean - target) / stderr`.
    pub fn z_score(&self, target: f64) -> Option<f64> {
        match (self.mean, self.stderr) {
            (Some(m), Some(s)) if s > 0.0 => Some((m - target) / s),
            _ => None,
        }
    }
}

/// Increment of `U` over one step given a standard normal draw.
pub fn step_increment(mode: Mode, mu: f64, step: f64, gaussian: f64) -> f64 {
    let drift = 0.5 * mu * mu * step;
    let noise = mu * step.sqrt() * gaussian;
    match mode {
        Mode::PreChange => -drift + noise,
        Mode::PostChange => drift + noise,
    }
}

/// Random stream of path `path_index`.
pub fn path_rng(seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_index);
    rng
}

/// Simulate one path until `Y >= h` or the horizon.
pub fn run_path(config: &SimConfig, path_index: u64) -> PathOutcome {
    let mut rng = path_rng(config.seed, path_index);
    let SimConfig {
        mu, h, step, mode, ..
    } = *config;
    let bridge_scale = 2.0 / (mu * mu * step);
    let max_steps = config.max_steps();

    let mut state = PathState::default();
    for k in 0..max_steps {
        let z: f64 = rng.sample(StandardNormal);
        let next = (state.y + step_increment(mode, mu, step, z)).max(0.0);
        let t_next = (k + 1) as f64 * step;
        if next >= h {
            return PathOutcome::Stopped(t_next);
        }
        if config.bridge_correction {
            let exponent = bridge_scale * (h - state.y) * (h - next);
            if exponent < BRIDGE_CUTOFF {
                let u: f64 = rng.random();
                if u < (-exponent).exp() {
                    return PathOutcome::Stopped((k as f64 + 0.5) * step);
                }
            }
        }
        state = PathState {
            y: next,
            t: t_next,
        };
    }
    PathOutcome::Truncated
}

/// Aggregate per-path outcomes in index order.
pub fn summarize(outcomes: &[PathOutcome]) -> SimEstimate {
    let times: Vec<f64> = outcomes.iter().filter_map(|o| o.time()).collect();
    let paths_used = outcomes.len() as u64;
    let truncated = paths_used - times.len() as u64;
    let n = times.len() as f64;
    let completed_mean = if times.is_empty() {
        f64::NAN
    } else {
        compensated_sum(times.iter().copied()) / n
    };
    let stderr = if times.len() > 1 {
        let ss = compensated_sum(times.iter().map(|t| (t - completed_mean).powi(2)));
        (ss / (n - 1.0)).sqrt() / n.sqrt()
    } else {
        0.0
    };
    let complete = truncated == 0 && !times.is_empty();
    SimEstimate {
        mean: complete.then_some(completed_mean),
        stderr: complete.then_some(stderr),
        paths_used,
        truncated,
        completed_mean,
    }
}

/// Estimate the mean stopping time with the default execution policy.
pub fn estimate(config: &SimConfig) -> Result<SimEstimate> {
    estimate_with(config, Execution::default())
}

pub fn estimate_with(config: &SimConfig, exec: Execution) -> Result<SimEstimate> {
    config.validate()?;
    let outcomes = exec.map_indices(config.paths, |i| run_path(config, i));
    Ok(summarize(&outcomes))
}

/// Overrides for [`validate_design`]; `None` keeps the default.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimOverrides {
    pub step: Option<f64>,
    pub paths: Option<u64>,
    pub seed: Option<u64>,
    pub horizon: Option<f64>,
    pub bridge_correction: Option<bool>,
    /// Upper bound on `paths * expected steps per path`, default `4e9`.
    pub max_total_steps: Option<f64>,
    pub execution: Option<Execution>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignValidation {
    pub design: DetectorDesign,
    pub pre: SimEstimate,
    pub post: SimEstimate,
    /// z-score of the simulated AT2FA against the closed form.
    pub z_at2fa: Option<f64>,
    /// z-score of the simulated ADD against the closed form.
    pub z_add: Option<f64>,
}

/// Design the threshold for `(gamma, mu)` and check both closed forms by
/// simulation.
pub fn validate_design(gamma: f64, mu: f64, overrides: SimOverrides) -> Result<DesignValidation> {
    let design = analytics::solve_threshold(gamma, mu)?;
    let exec = overrides.execution.unwrap_or_default();
    let run = |mode: Mode| -> Result<SimEstimate> {
        let mut cfg = SimConfig::new(mode, mu, design.h)?;
        if let Some(step) = overrides.step {
            cfg.step = step;
        }
        if let Some(paths) = overrides.paths {
            cfg.paths = paths;
        }
        if let Some(seed) = overrides.seed {
            cfg.seed = seed;
        }
        if let Some(horizon) = overrides.horizon {
            cfg.horizon = horizon;
        }
        if let Some(bridge) = overrides.bridge_correction {
            cfg.bridge_correction = bridge;
        }
        let expected = match mode {
            Mode::PreChange => design.at2fa,
            Mode::PostChange => design.add,
        };
        if expected >= cfg.horizon {
            return Err(Error::Budget(format!(
                "expected stopping time {expected:e} exceeds the horizon {:e}",
                cfg.horizon
            )));
        }
        let budget = overrides.max_total_steps.unwrap_or(4e9);
        let work = cfg.paths as f64 * expected / cfg.step;
        if work > budget {
            return Err(Error::Budget(format!(
                "about {work:.3e} steps needed, budget is {budget:.3e}"
            )));
        }
        estimate_with(&cfg, exec)
    };
    let pre = run(Mode::PreChange)?;
    let post = run(Mode::PostChange)?;
    Ok(DesignValidation {
        design,
        z_at2fa: pre.z_score(design.at2fa),
        z_add: post.z_score(design.add),
        pre,
        post,
    })
}
