//! `softheat` command-line front end.
//!
//! Exit codes: 0 success, 2 domain or constraint error, 64 usage error,
//! 74 I/O error.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Model(#[from] crate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) | CliError::Model(crate::Error::Io { .. }) => EXIT_IO,
            CliError::Model(_) => EXIT_DOMAIN,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "softheat",
    version,
    about = "Ideal-gas cycle models, lever-load design and experiment analysis for soft heat engines"
)]
pub struct Cli {
    #[command(flatten)]
    pub shared: SharedArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SharedArgs {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set rig.r_a=0.05`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output directory, created if absent [default: out].
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed for synthetic log generation.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for parallel sweeps; 1 evaluates serially.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    /// Write output files only; skip the stdout summary.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and evaluate one ideal cycle; write its PV trace and a summary.
    Simulate(SimulateArgs),
    /// Sweep the constant-load/Otto efficiency ratio and write CSV and SVG.
    Heatmap(HeatmapArgs),
    /// Solve lever masses for target pressures and tabulate load profiles.
    Design(DesignArgs),
    /// Analyze constant-load and/or Otto sensor logs.
    Analyze(AnalyzeArgs),
    /// Expansion ratio and adiabatic estimates from characterization pressures.
    Characterize(CharacterizeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CycleType {
    ConstantLoad,
    Otto,
}

impl CycleType {
    pub fn file_stem(self) -> &'static str {
        match self {
            CycleType::ConstantLoad => "constant_load",
            CycleType::Otto => "otto",
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub cycle: CycleType,
    /// Expansion ratio r.
    #[arg(long)]
    pub ratio: f64,
    /// Minimum (starting) temperature, K.
    #[arg(long, default_value_t = 300.0)]
    pub t_min: f64,
    /// Maximum cycle temperature, K. Required unless --p-high is given.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Constant-load high pressure, Pa absolute. Overrides --t-max.
    #[arg(long)]
    pub p_high: Option<f64>,
    /// Starting pressure, Pa absolute [default: ambient_pressure].
    #[arg(long)]
    pub p_start: Option<f64>,
    /// Starting volume, m³.
    #[arg(long, default_value_t = 1e-4)]
    pub v_start: f64,
    /// Trace points per process.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(2..))]
    pub points: u64,
}

#[derive(Debug, Args)]
pub struct HeatmapArgs {
    #[arg(long, default_value_t = 1.05)]
    pub x_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 1.01)]
    pub r_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub r_max: f64,
    /// Temperature-ratio samples.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(2..))]
    pub nx: u64,
    /// Expansion-ratio samples.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(2..))]
    pub nr: u64,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long, value_enum)]
    pub mode: CycleType,
    /// Expansion (constant-load) or peak (Otto) target, kPa gauge
    /// [default: 13.0 constant-load, 14.0 Otto].
    #[arg(long, allow_negative_numbers = true)]
    pub expand_kpa: Option<f64>,
    /// Restoring target at the start angle, kPa gauge [default: 11.0
    /// constant-load; Otto uses otto.m1 unless this is given].
    #[arg(long, allow_negative_numbers = true)]
    pub restore_kpa: Option<f64>,
    /// Fixed mass for the Otto rig, kg [default: otto.m1].
    #[arg(long)]
    pub m1: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta0_deg: f64,
    #[arg(long, default_value_t = 1.4, allow_negative_numbers = true)]
    pub theta1_deg: f64,
    #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u64).range(2..))]
    pub points: u64,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Constant-load log CSV.
    #[arg(long, value_name = "PATH")]
    pub cl_log: Option<PathBuf>,
    /// Otto log CSV.
    #[arg(long, value_name = "PATH")]
    pub otto_log: Option<PathBuf>,
    /// Generate reference logs for both modes (seeded by --seed) and analyze them.
    #[arg(long, conflicts_with_all = ["cl_log", "otto_log"])]
    pub synthetic: bool,
    /// Angle noise for --synthetic, degrees.
    #[arg(long, default_value_t = 0.0)]
    pub noise_angle_deg: f64,
    /// Name of a logged heater-current column, A.
    #[arg(long)]
    pub current_column: Option<String>,
}

#[derive(Debug, Args)]
pub struct CharacterizeArgs {
    /// Gauge pressure before the isothermal expansion, kPa.
    #[arg(long, default_value_t = 6.9, allow_negative_numbers = true)]
    pub before_kpa: f64,
    /// Gauge pressure after returning to the starting temperature, kPa.
    #[arg(long, default_value_t = 4.055, allow_negative_numbers = true)]
    pub after_kpa: f64,
    /// Otto peak pressure target, kPa gauge.
    #[arg(long, default_value_t = 14.0, allow_negative_numbers = true)]
    pub otto_target_kpa: f64,
    /// Observed pressure rise during compression, kPa.
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub observed_rise_kpa: f64,
    /// Observed pressure span during expansion, kPa.
    #[arg(long, default_value_t = 4.5, allow_negative_numbers = true)]
    pub observed_span_kpa: f64,
    #[arg(long, default_value_t = 13.0, allow_negative_numbers = true)]
    pub cl_expand_kpa: f64,
    #[arg(long, default_value_t = 11.0, allow_negative_numbers = true)]
    pub cl_restore_kpa: f64,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match commands::dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("softheat: error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_64() {
        assert_eq!(run(["softheat"]), EXIT_USAGE);
        assert_eq!(run(["softheat", "heatmap", "--nx", "1"]), EXIT_USAGE);
        assert_eq!(
            run(["softheat", "simulate", "--cycle", "diesel", "--ratio", "2"]),
            EXIT_USAGE
        );
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(["softheat", "design", "--help"]), EXIT_OK);
    }

    #[test]
    fn exit_code_mapping() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), EXIT_USAGE);
        assert_eq!(CliError::Io("x".into()).exit_code(), EXIT_IO);
        assert_eq!(
            CliError::Model(crate::Error::Domain("x".into())).exit_code(),
            EXIT_DOMAIN
        );
        let io = crate::Error::Io {
            path: "p".into(),
            source: std::io::Error::other("x"),
        };
        assert_eq!(CliError::Model(io).exit_code(), EXIT_IO);
    }
}
