//! Table producers behind the CLI subcommands.
//!
//! Every table records the canonical argument string that regenerates it
//! under the `args` metadata key.

use crate::adversary::{self, DriftSchedule};
use crate::analytics;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::simulator::{self, Mode, SimConfig};

use super::table::{Column, CurveTable};

/// Budgets of the published relative-gap table.
pub const TABLE1_GAMMAS: [f64; 7] = [2.0, 5.0, 10.0, 1e2, 1e3, 1e4, 1e5];
/// Drift exponents of the published relative-gap table and the `fig1` default.
pub const TABLE1_DELTAS: [f64; 3] = [0.75, 2.0, 5.0];
pub const PHASE_GAMMAS: [f64; 4] = [1e3, 1e5, 1e8, 1e12];
pub const DAMAGE_GAMMAS: [f64; 4] = [1e6, 1e8, 1e10, 1e12];
pub const DEFAULT_DELTA_STEP: f64 = 0.005;

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Short column tag for a budget, e.g. `1e12`.
fn tag(v: f64) -> String {
    format!("{v:e}")
}

/// Evenly spaced values from `start` to `end` inclusive. When `1/step` is
/// an integer the points are `start + i/k`, so `0.455` prints as `0.455`.
pub fn linear_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(end >= start) {
        return Err(Error::domain("linear_grid", "need step > 0 and end >= start"));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize;
    let per_unit = 1.0 / step;
    let exact = (per_unit - per_unit.round()).abs() < 1e-9;
    let mut grid: Vec<f64> = (0..=n)
        .map(|i| {
            if exact {
                start + i as f64 / per_unit.round()
            } else {
                start + i as f64 * step
            }
        })
        .collect();
    if let Some(last) = grid.last_mut() {
        if (*last - end).abs() < 1e-9 * step {
            *last = end;
        }
    }
    Ok(grid)
}

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) || !(hi > lo) || points < 2 {
        return Err(Error::domain("log_grid", "need 0 < lo < hi and points >= 2"));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| match i {
            0 => lo,
            i if i == points - 1 => hi,
            i => (a + (b - a) * i as f64 / last).exp(),
        })
        .collect())
}

/// Delta grid on `[0, 1]`.
pub fn default_delta_grid(step: f64) -> Result<Vec<f64>> {
    linear_grid(0.0, 1.0, step)
}

fn check_deltas(deltas: &[f64]) -> Result<()> {
    if deltas.is_empty() || deltas.iter().any(|d| !(0.0..=1.0).contains(d)) {
        return Err(Error::domain("delta grid", "values must lie in [0, 1]"));
    }
    if deltas.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::domain("delta grid", "values must be ascending"));
    }
    Ok(())
}

/// What `analyze` designs against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyzeTarget {
    Mu(f64),
    Schedule(DriftSchedule),
}

/// One operating point. Regime, covertness and the gap metric are `NaN`
/// when only a fixed drift is given.
pub fn analyze(gamma: f64, target: AnalyzeTarget) -> Result<CurveTable> {
    let (mu, schedule) = match target {
        AnalyzeTarget::Mu(mu) => (mu, None),
        AnalyzeTarget::Schedule(s) => (s.mu_at(gamma)?, Some(s)),
    };
    let design = analytics::solve_threshold(gamma, mu)?;
    let mut t = CurveTable::new(vec![
        Column::new("gamma", "time"),
        Column::new("mu", "1/sqrt(time)"),
        Column::new("x", ""),
        Column::new("h", ""),
        Column::new("at2fa", "time"),
        Column::new("add", "time"),
        Column::new("add_over_gamma", ""),
        Column::new("regime_theta", ""),
        Column::new("covert", "bool"),
        Column::new("damage", "sqrt(time)"),
        Column::new("gap_metric", "percent"),
    ]);
    let (args, regime_theta, covert, gap) = match schedule {
        None => (format!("analyze --gamma {gamma} --mu {mu}"), f64::NAN, f64::NAN, f64::NAN),
        Some(s) => {
            let args = match s {
                DriftSchedule::PowerLaw { c, delta } => {
                    format!("analyze --gamma {gamma} --delta {delta} --c {c}")
                }
                DriftSchedule::Constant { mu0 } => format!("analyze --gamma {gamma} --constant {mu0}"),
            };
            let covert = if s.is_covert() { 1.0 } else { 0.0 };
            t.meta("regime", s.classify().to_string());
            (args, s.classify().theta(), covert, adversary::gap_metric(gamma, &s)?)
        }
    };
    t.meta("command", "analyze");
    t.meta("args", args);
    t.push_row(vec![
        gamma,
        mu,
        design.x,
        design.h,
        design.at2fa,
        design.add,
        design.add / gamma,
        regime_theta,
        covert,
        mu * design.add,
        gap,
    ])?;
    Ok(t)
}

/// Round to 3 significant figures with at most 2 decimals, the display
/// convention of the published table.
pub fn display_round(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (2 - magnitude).min(2);
    let scale = 10f64.powi(decimals);
    (v * scale).round() / scale
}

/// Relative gap `M(gamma)` for `delta` in {0.75, 2, 5} and the seven
/// published budgets. Each `M_g*` column is followed by its display-rounded
/// `M_g*_display` twin.
pub fn table1() -> Result<CurveTable> {
    let mut columns = vec![Column::new("delta", "")];
    for g in TABLE1_GAMMAS {
        columns.push(Column::new(format!("M_g{}", tag(g)), "percent"));
        columns.push(Column::new(format!("M_g{}_display", tag(g)), "percent"));
    }
    let mut t = CurveTable::new(columns);
    t.meta("command", "table1");
    t.meta("args", "table1");
    for delta in TABLE1_DELTAS {
        let s = DriftSchedule::power_law(1.0, delta)?;
        let mut row = vec![delta];
        for g in TABLE1_GAMMAS {
            let m = adversary::gap_metric(g, &s)?;
            row.push(m);
            row.push(display_round(m));
        }
        t.push_row(row)?;
    }
    Ok(t)
}

/// `gamma -> n(gamma)` for power-law drifts, on a log grid.
pub fn fig1(deltas: &[f64], gamma_min: f64, gamma_max: f64, points: usize) -> Result<CurveTable> {
    if deltas.is_empty() {
        return Err(Error::domain("fig1", "no delta values"));
    }
    let gammas = log_grid(gamma_min, gamma_max, points)?;
    let schedules = deltas
        .iter()
        .map(|&d| DriftSchedule::power_law(1.0, d))
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec![Column::new("gamma", "time"), Column::new("identity", "time")];
    columns.extend(deltas.iter().map(|d| Column::new(format!("n_delta{d}"), "time")));
    let mut t = CurveTable::new(columns);
    t.meta("command", "fig1");
    t.meta(
        "args",
        format!(
            "fig1 --deltas {} --gamma-min {gamma_min} --gamma-max {gamma_max} --points {points}",
            join(deltas)
        ),
    );
    t.meta("x_scale", "log");
    t.meta("y_scale", "log");
    let rows = Execution::default().map_slice(&gammas, |&g| -> Result<Vec<f64>> {
        let mut row = vec![g, g];
        for s in &schedules {
            row.push(analytics::n_exact(g, s.mu_at(g)?)?);
        }
        Ok(row)
    });
    for row in rows {
        t.push_row(row?)?;
    }
    Ok(t)
}

/// Threshold `h` and delay ratio `n/gamma` across `delta` for several budgets.
pub fn phase(gammas: &[f64], deltas: &[f64]) -> Result<CurveTable> {
    check_deltas(deltas)?;
    if gammas.is_empty() {
        return Err(Error::domain("phase", "no gamma values"));
    }
    let mut columns = vec![Column::new("delta", "")];
    for &g in gammas {
        columns.push(Column::new(format!("h_g{}", tag(g)), ""));
    }
    for &g in gammas {
        columns.push(Column::new(format!("ratio_g{}", tag(g)), ""));
    }
    let mut t = CurveTable::new(columns);
    t.meta("command", "phase");
    t.meta("args", format!("phase --gammas {} --deltas {}", join(gammas), join(deltas)));
    t.meta("panels", "h,ratio");
    let rows = Execution::default().map_slice(deltas, |&delta| -> Result<Vec<f64>> {
        let s = DriftSchedule::power_law(1.0, delta)?;
        let designs = gammas
            .iter()
            .map(|&g| analytics::solve_threshold(g, s.mu_at(g)?))
            .collect::<Result<Vec<_>>>()?;
        let mut row = vec![delta];
        row.extend(designs.iter().map(|d| d.h));
        row.extend(designs.iter().map(|d| d.add / d.gamma));
        Ok(row)
    });
    for row in rows {
        t.push_row(row?)?;
    }
    Ok(t)
}

/// Natural log of the damage across `delta`, with the grid maximizer per
/// budget recorded as `argmax_delta_g*` metadata.
pub fn damage(gammas: &[f64], deltas: &[f64]) -> Result<CurveTable> {
    check_deltas(deltas)?;
    if gammas.is_empty() {
        return Err(Error::domain("damage", "no gamma values"));
    }
    let mut columns = vec![Column::new("delta", "")];
    columns.extend(gammas.iter().map(|&g| Column::new(format!("logD_g{}", tag(g)), "")));
    let mut t = CurveTable::new(columns);
    t.meta("command", "damage");
    t.meta("args", format!("damage --gammas {} --deltas {}", join(gammas), join(deltas)));
    for &g in gammas {
        let best = adversary::damage_argmax(g, deltas)?;
        t.meta(format!("argmax_delta_g{}", tag(g)), best.to_string());
    }
    let rows = Execution::default().map_slice(deltas, |&delta| -> Result<Vec<f64>> {
        let s = DriftSchedule::power_law(1.0, delta)?;
        let mut row = vec![delta];
        for &g in gammas {
            row.push(adversary::damage(g, &s)?.ln());
        }
        Ok(row)
    });
    for row in rows {
        t.push_row(row?)?;
    }
    Ok(t)
}

/// Threshold source for `simulate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdSpec {
    H(f64),
    /// Design `h` for this false-alarm budget.
    Gamma(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulateArgs {
    pub mode: Mode,
    pub mu: f64,
    pub threshold: ThresholdSpec,
    pub step: Option<f64>,
    pub paths: u64,
    pub seed: u64,
    pub bridge: bool,
    pub horizon: Option<f64>,
    pub strict: bool,
}

/// Monte Carlo estimate of the stopping time against its closed form.
pub fn simulate(args: &SimulateArgs, exec: Execution) -> Result<CurveTable> {
    let h = match args.threshold {
        ThresholdSpec::H(h) => h,
        ThresholdSpec::Gamma(g) => analytics::solve_threshold(g, args.mu)?.h,
    };
    let mut cfg = SimConfig::new(args.mode, args.mu, h)?;
    cfg.paths = args.paths;
    cfg.seed = args.seed;
    cfg.bridge_correction = args.bridge;
    if let Some(step) = args.step {
        cfg.step = step;
    }
    if let Some(horizon) = args.horizon {
        cfg.horizon = horizon;
    }
    let mut est = simulator::estimate_with(&cfg, exec)?;
    if args.strict {
        est = est.strict()?;
    }
    let analytic = match args.mode {
        Mode::PreChange => analytics::at2fa(args.mu, h)?,
        Mode::PostChange => analytics::add(args.mu, h)?,
    };

    let mut t = CurveTable::new(vec![
        Column::new("mu", "1/sqrt(time)"),
        Column::new("h", ""),
        Column::new("step", "time"),
        Column::new("horizon", "time"),
        Column::new("paths", "count"),
        Column::new("mean", "time"),
        Column::new("stderr", "time"),
        Column::new("truncated", "count"),
        Column::new("completed_mean", "time"),
        Column::new("analytic", "time"),
        Column::new("z", ""),
    ]);
    t.meta("command", "simulate");
    let threshold = match args.threshold {
        ThresholdSpec::H(h) => format!("--h {h}"),
        ThresholdSpec::Gamma(g) => format!("--gamma {g}"),
    };
    t.meta(
        "args",
        format!(
            "simulate --mode {} --mu {} {threshold} --step {} --horizon {} --paths {} --seed {}{}{}",
            args.mode.as_str(),
            args.mu,
            cfg.step,
            cfg.horizon,
            cfg.paths,
            cfg.seed,
            if cfg.bridge_correction { "" } else { " --no-bridge" },
            if args.strict { " --strict" } else { "" },
        ),
    );
    t.meta("mode", args.mode.as_str());
    t.meta("seed", cfg.seed.to_string());
    t.meta("bridge_correction", cfg.bridge_correction.to_string());
    t.push_row(vec![
        cfg.mu,
        cfg.h,
        cfg.step,
        cfg.horizon,
        cfg.paths as f64,
        est.mean.unwrap_or(f64::NAN),
        est.stderr.unwrap_or(f64::NAN),
        est.truncated as f64,
        est.completed_mean,
        analytic,
        est.z_score(analytic).unwrap_or(f64::NAN),
    ])?;
    Ok(t)
}
