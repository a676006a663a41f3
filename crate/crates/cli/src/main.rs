//! `qwalk`: run quantum-walk simulations and verifications from the shell.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 invalid configuration,
//! 3 a verification exceeded its tolerance.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Context;
use crate::config::{AngleValue, GaugeSpec, PhaseSpec, RunConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "qwalk", version, about = "Discrete-time quantum walks on the line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Step the walk and write spinor, PMF and trajectory CSVs.
    Evolve(WalkArgs),
    /// Evaluate the closed-form solution and its deviation from stepping.
    Closedform(WalkArgs),
    /// Exact, stationary and classical PMFs plus drift summaries.
    Observables(WalkArgs),
    /// Compare a phase-transformed walk with its reference.
    Invariance(WalkArgs),
    /// Potential shifts, electric field and the field-invariance residual.
    Gauge(WalkArgs),
    /// Data behind the reference figures, with their fixed parameters.
    Figures(FigureArgs),
}

#[derive(Args)]
struct WalkArgs {
    /// JSON configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    chi: Option<String>,
    /// CSV `n,t,theta,alpha,beta,chi` replacing the homogeneous coin.
    #[arg(long)]
    coin_file: Option<PathBuf>,
    #[arg(long)]
    t_final: Option<usize>,
    /// Output directory (beats QWALK_OUTPUT_DIR and the config file).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Also write the spinor at every step.
    #[arg(long)]
    every_step: bool,
    /// Phase family: quasi, linear or file.
    #[arg(long)]
    family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta1: Option<String>,
    /// Slope of the linear family.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// CSV `n,t,xi,zeta` for the file family.
    #[arg(long)]
    phase_file: Option<PathBuf>,
    /// Continuum pair for the residual: equal, null or wave.
    #[arg(long)]
    pair: Option<String>,
    #[arg(long)]
    resolution: Option<usize>,
}

#[derive(Args)]
struct FigureArgs {
    /// 1a, 1b, 2 or 3.
    #[arg(long)]
    which: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl WalkArgs {
    fn into_config(self) -> Result<(RunConfig, Option<PathBuf>), CliError> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let text = |v: Option<String>| v.map(AngleValue::Text);
        config.overlay(RunConfig {
            theta: text(self.theta),
            eta: text(self.eta),
            gamma: text(self.gamma),
            alpha: text(self.alpha),
            beta: text(self.beta),
            chi: text(self.chi),
            coin_file: self.coin_file,
            t_final: self.t_final,
            out: None,
            tolerance: self.tolerance,
            every_step: self.every_step.then_some(true),
            phases: PhaseSpec {
                family: self.family.clone(),
                beta0: text(self.beta0),
                beta1: text(self.beta1),
                a: text(self.a),
                path: self.phase_file.clone(),
            },
            gauge: GaugeSpec { pair: self.pair, resolution: self.resolution },
        });
        // a phase file on the command line implies the file family
        if self.phase_file.is_some() && self.family.is_none() {
            config.phases.family = Some("file".into());
        }
        Ok((config, self.out))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qwalk: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let context = |args: WalkArgs| -> Result<Context, CliError> {
        let (config, flag) = args.into_config()?;
        let out_dir = config.output_dir(flag.as_deref());
        Ok(Context { config, out_dir })
    };
    match cli.command {
        Command::Evolve(a) => commands::evolve_cmd(&context(a)?),
        Command::Closedform(a) => commands::closedform_cmd(&context(a)?),
        Command::Observables(a) => commands::observables_cmd(&context(a)?),
        Command::Invariance(a) => commands::invariance_cmd(&context(a)?),
        Command::Gauge(a) => commands::gauge_cmd(&context(a)?),
        Command::Figures(f) => {
            let config = RunConfig::default();
            let out_dir = config.output_dir(f.out.as_deref());
            commands::figures_cmd(&Context { config, out_dir }, &f.which)
        }
    }
}
