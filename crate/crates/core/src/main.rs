use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use covert_cusum::report::commands::{
    self, AnalyzeTarget, SimulateArgs, ThresholdSpec, DAMAGE_GAMMAS, DEFAULT_DELTA_STEP,
    PHASE_GAMMAS, TABLE1_DELTAS,
};
use covert_cusum::report::{svg, CurveTable};
use covert_cusum::{DriftSchedule, Error, Execution, Mode};

#[derive(Parser)]
#[command(name = "covert-cusum", version, about = "CuSum design and covert-drift analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DeltaGrid {
    /// Explicit ascending delta values in [0, 1]; overrides --delta-step.
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    /// Spacing of the delta grid on [0, 1].
    #[arg(long, default_value_t = DEFAULT_DELTA_STEP)]
    delta_step: f64,
}

impl DeltaGrid {
    fn resolve(&self) -> covert_cusum::Result<Vec<f64>> {
        match &self.deltas {
            Some(d) => Ok(d.clone()),
            None => commands::default_delta_grid(self.delta_step),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Pre,
    Post,
}

#[derive(Subcommand)]
enum Command {
    /// Resolve one operating point.
    #[command(group = clap::ArgGroup::new("drift").required(true))]
    Analyze {
        #[arg(long)]
        gamma: f64,
        /// Fixed post-change drift.
        #[arg(long, group = "drift")]
        mu: Option<f64>,
        /// Power-law exponent: mu(gamma) = c gamma^-delta.
        #[arg(long, group = "drift")]
        delta: Option<f64>,
        /// Power-law scale.
        #[arg(long, default_value_t = 1.0, requires = "delta")]
        c: f64,
        /// Constant schedule mu(gamma) = mu0.
        #[arg(long, group = "drift")]
        constant: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Relative gap M(gamma) for delta in {0.75, 2, 5}.
    Table1 {
        #[command(flatten)]
        out: Output,
    },
    /// n(gamma) against the identity on a log grid.
    Fig1 {
        #[arg(long, value_delimiter = ',', default_values_t = TABLE1_DELTAS)]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        gamma_min: f64,
        #[arg(long, default_value_t = 1e5)]
        gamma_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Threshold and n/gamma across delta.
    Phase {
        #[arg(long, value_delimiter = ',', default_values_t = PHASE_GAMMAS)]
        gammas: Vec<f64>,
        #[command(flatten)]
        grid: DeltaGrid,
        #[command(flatten)]
        out: Output,
    },
    /// Log damage across delta, with the maximizer per gamma.
    Damage {
        #[arg(long, value_delimiter = ',', default_values_t = DAMAGE_GAMMAS)]
        gammas: Vec<f64>,
        #[command(flatten)]
        grid: DeltaGrid,
        #[command(flatten)]
        out: Output,
    },
    /// Monte Carlo estimate of the mean stopping time.
    #[command(group = clap::ArgGroup::new("threshold").required(true))]
    Simulate {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        mu: f64,
        #[arg(long, group = "threshold")]
        h: Option<f64>,
        /// Design h for this false-alarm budget instead of passing --h.
        #[arg(long, group = "threshold")]
        gamma: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        paths: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        horizon: Option<f64>,
        /// Disable the Brownian-bridge crossing correction.
        #[arg(long)]
        no_bridge: bool,
        /// Fail if any path reaches the horizon.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Render a CSV produced by this tool as SVG.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn emit(out: &Output, text: &str) -> covert_cusum::Result<()> {
    match &out.out {
        Some(path) => fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn threads_override() -> Option<usize> {
    std::env::var("THREADS").ok()?.trim().parse().ok()
}

fn run(cli: Cli) -> covert_cusum::Result<()> {
    match cli.command {
        Command::Analyze {
            gamma,
            mu,
            delta,
            c,
            constant,
            out,
        } => {
            let target = match (mu, delta, constant) {
                (Some(mu), _, _) => AnalyzeTarget::Mu(mu),
                (_, Some(delta), _) => AnalyzeTarget::Schedule(DriftSchedule::power_law(c, delta)?),
                (_, _, Some(mu0)) => AnalyzeTarget::Schedule(DriftSchedule::constant(mu0)?),
                _ => unreachable!("clap enforces the drift group"),
            };
            emit(&out, &commands::analyze(gamma, target)?.to_csv()?)
        }
        Command::Table1 { out } => emit(&out, &commands::table1()?.to_csv()?),
        Command::Fig1 {
            deltas,
            gamma_min,
            gamma_max,
            points,
            out,
        } => emit(
            &out,
            &commands::fig1(&deltas, gamma_min, gamma_max, points)?.to_csv()?,
        ),
        Command::Phase { gammas, grid, out } => {
            emit(&out, &commands::phase(&gammas, &grid.resolve()?)?.to_csv()?)
        }
        Command::Damage { gammas, grid, out } => {
            emit(&out, &commands::damage(&gammas, &grid.resolve()?)?.to_csv()?)
        }
        Command::Simulate {
            mode,
            mu,
            h,
            gamma,
            step,
            paths,
            seed,
            horizon,
            no_bridge,
            strict,
            out,
        } => {
            let threshold = match (h, gamma) {
                (Some(h), _) => ThresholdSpec::H(h),
                (_, Some(g)) => ThresholdSpec::Gamma(g),
                _ => unreachable!("clap enforces the threshold group"),
            };
            let args = SimulateArgs {
                mode: match mode {
                    ModeArg::Pre => Mode::PreChange,
                    ModeArg::Post => Mode::PostChange,
                },
                mu,
                threshold,
                step,
                paths,
                seed,
                bridge: !no_bridge,
                horizon,
                strict,
            };
            let table = commands::simulate(&args, Execution::from_threads(threads_override()))?;
            let truncated = table.column("truncated").map(|c| c[0]).unwrap_or(0.0);
            if truncated > 0.0 {
                eprintln!("warning: {truncated} paths reached the horizon; mean not reported");
            }
            emit(&out, &table.to_csv()?)
        }
        Command::Plot { input, out } => {
            let text = fs::read_to_string(&input)?;
            let table = CurveTable::from_csv(&text)?;
            fs::write(out, svg::render(&table)?)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
