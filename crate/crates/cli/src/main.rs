//! Command-line front end for the entanglia toolkit.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

mod commands;
mod input;
mod report;

use report::{Report, Tolerances};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("precondition failed: {0}")]
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "entanglia", version, about = "Majorization, LOCC conversion and bound entanglement toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Human,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Seed for every randomized routine.
    #[arg(long, global = true, env = "ENTANGLIA_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Human)]
    pub output: Output,
    /// Shorthand for `--output json`.
    #[arg(long, global = true)]
    pub json: bool,
    /// Largest Hilbert-space dimension accepted from files or built on request.
    #[arg(long, global = true, default_value_t = 4096)]
    pub max_dim: usize,
    /// Largest tensor power accepted by `multicopy`.
    #[arg(long, global = true, default_value_t = 8)]
    pub max_copies: usize,
}

impl RunConfig {
    pub fn structured(&self) -> bool {
        self.json || self.output == Output::Json
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Majorization verdict between two vectors.
    #[command(allow_negative_numbers = true)]
    Majorize { x: String, y: String },
    /// Pure-state conversion test `a -> b` on Schmidt vectors.
    #[command(allow_negative_numbers = true)]
    Nielsen { a: String, b: String },
    /// Comparability class of a pair of Schmidt vectors.
    #[command(allow_negative_numbers = true)]
    Classify { a: String, b: String },
    /// Two-level catalyst search.
    #[command(allow_negative_numbers = true)]
    Catalyst {
        a: String,
        b: String,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Conversion of `k` copies.
    #[command(allow_negative_numbers = true)]
    Multicopy { a: String, b: String, k: usize },
    /// Assisted conversion with a maximally entangled or minimal resource.
    #[command(allow_negative_numbers = true)]
    Assist {
        a: String,
        b: String,
        #[arg(long)]
        min: bool,
    },
    /// Cooperative conversion plan for an incomparable pair.
    #[command(allow_negative_numbers = true)]
    Coop { a: String, b: String },
    /// Two-copy split range for an incomparable pair.
    #[command(allow_negative_numbers = true)]
    Split2 { a: String, b: String },
    /// Entanglement measures of a state file.
    Measure {
        #[arg(value_enum)]
        kind: MeasureKind,
        statefile: PathBuf,
        /// Subsystems on one side of the cut.
        #[arg(long, default_value = "0")]
        cut: String,
    },
    /// Separability and distillability criteria of a state file.
    Witness {
        statefile: PathBuf,
        #[arg(long, default_value = "0")]
        cut: String,
    },
    /// Flip gadget on `|0>, a|0>+b|1>, c|0>+d e^{i theta}|1>`.
    #[command(allow_negative_numbers = true)]
    Flip {
        a: f64,
        b: f64,
        c: f64,
        d: f64,
        theta: f64,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        #[arg(long, default_value_t = 0.0)]
        nu: f64,
    },
    /// Anti-unitary gadget on the axis probe.
    #[command(allow_negative_numbers = true)]
    Antiunitary { theta: f64, alpha: f64, beta: f64 },
    /// Angle-preserving gadget; `alpha` and `beta` as `re` or `re,im`.
    #[command(allow_negative_numbers = true)]
    Angle {
        alpha: Option<String>,
        beta: Option<String>,
        /// Sweep real `(cos t, sin t)` instead.
        #[arg(long)]
        sweep: bool,
        #[arg(long, default_value_t = 36)]
        points: usize,
    },
    /// Bound entangled family and related constructions.
    Bound {
        #[arg(value_enum)]
        action: BoundAction,
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Member for `unlock`: rho+, rho-, sigma+ or sigma-.
        #[arg(long, default_value = "rho+")]
        label: String,
        /// Mixing parameter for `horodecki`.
        #[arg(long, default_value_t = 0.5)]
        a: f64,
        /// Seesaw restarts for `upb`.
        #[arg(long, default_value_t = 64)]
        trials: usize,
    },
    /// Data hiding in the bound entangled family.
    Hide {
        #[arg(value_enum)]
        action: HideAction,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureKind {
    Entropy,
    Concurrence,
    Eof,
    Negativity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundAction {
    Build,
    Verify,
    Unlock,
    Horodecki,
    Upb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HideAction {
    Demo,
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Majorize { .. } => "majorize",
        Command::Nielsen { .. } => "nielsen",
        Command::Classify { .. } => "classify",
        Command::Catalyst { .. } => "catalyst",
        Command::Multicopy { .. } => "multicopy",
        Command::Assist { .. } => "assist",
        Command::Coop { .. } => "coop",
        Command::Split2 { .. } => "split2",
        Command::Measure { .. } => "measure",
        Command::Witness { .. } => "witness",
        Command::Flip { .. } => "flip",
        Command::Antiunitary { .. } => "antiunitary",
        Command::Angle { .. } => "angle",
        Command::Bound { .. } => "bound",
        Command::Hide { .. } => "hide",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = cli.config.clone();
    match commands::run(&cli.command, &cfg) {
        Ok((outcome, failed)) => {
            let text = if cfg.structured() {
                let r = Report {
                    command: command_name(&cli.command).to_string(),
                    seed: cfg.seed,
                    tolerances: Tolerances::current(),
                    result: outcome.data,
                };
                serde_json::to_string_pretty(&r).expect("report serializes")
            } else {
                let t = Tolerances::current();
                format!(
                    "{}\nseed {}; tolerances herm {:e} resid {:e} psd_clamp {:e} maj {:e} ppt {:e}",
                    outcome.human.trim_end(),
                    cfg.seed,
                    t.herm,
                    t.resid,
                    t.psd_clamp,
                    t.maj,
                    t.ppt
                )
            };
            // a closed pipe is not an error
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            if failed {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("entanglia: {e}");
            ExitCode::from(e.code())
        }
    }
}
