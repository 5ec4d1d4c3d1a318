//! Continuous-time CuSum quickest change detection against a covert drift.
//!
//! - [`lambert`]: real branches of Lambert W and a log-domain solver.
//! - [`analytics`]: closed-form false-alarm time, detection delay, optimal
//!   threshold and their large-budget asymptotics.
//! - [`adversary`]: drift schedules, covertness regimes and damage.
//! - [`simulator`]: Monte Carlo of the reflected CuSum statistic.
//! - [`report`]: CSV tables behind the figures, SVG rendering, CLI commands.

pub mod adversary;
pub mod analytics;
pub mod error;
pub mod exec;
pub mod lambert;
pub mod report;
pub mod simulator;

pub use adversary::{DriftSchedule, Regime};
pub use analytics::DetectorDesign;
pub use error::{Error, Result};
pub use exec::Execution;
pub use simulator::{Mode, SimConfig, SimEstimate};
